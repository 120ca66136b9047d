#include <doctest.h>

#include <cmath>

#include "bino/bie.hpp"

using namespace bino;

namespace {
ProblemSpec laplace_spec() {
  ProblemSpec s;
  s.pde = PdeKind::kLaplace2D;
  s.curve_family = CurveFamily::kLaplaceStar;
  return s;
}

ProblemSpec helmholtz_spec() {
  ProblemSpec s;
  s.pde = PdeKind::kHelmholtz3D;
  s.t_min = 0.0;
  s.t_max = 0.5;
  return s;
}

ProblemSpec biharmonic_spec() {
  ProblemSpec s;
  s.pde = PdeKind::kBiharmonic2D;
  s.curve_family = CurveFamily::kBiharmonicStar;
  return s;
}

NetworkConfig tiny_net(const ProblemSpec& spec) {
  NetworkConfig net;
  net.coord_dim = spec.coord_dim();
  net.n_out = spec.n_out();
  net.encoder_depth = 2;
  net.encoder_width = 8;
  net.latent_p = 8;
  net.decoder_depth = 2;
  net.decoder_width = 8;
  net.fourier_features = 4;
  return net;
}
} // namespace

TEST_CASE("make_batch produces the configured shapes") {
  const ProblemSpec spec = laplace_spec();
  const TrainBatch b = make_batch(spec, {10, 100, 300}, 1, 0);
  CHECK(b.geoms.size() == 10);
  for (const auto& g : b.geoms) {
    CHECK(g.quad.count() == 300);
    CHECK(g.obs.count() == 100);
    CHECK(g.targets.rows == 100);
    CHECK(g.targets.cols == 1);
    CHECK(g.t >= 1.0);
    CHECK(g.t <= 2.0);
    g.quad.validate();
    g.obs.validate();
  }
}

TEST_CASE("degenerate t range pins every geometry draw") {
  ProblemSpec spec = laplace_spec();
  spec.t_min = spec.t_max = 1.15;
  const TrainBatch b = make_batch(spec, {5, 10, 20}, 3, 2);
  for (const auto& g : b.geoms) CHECK(g.t == 1.15);
}

TEST_CASE("helmholtz batch shapes (paper-scale smoke)") {
  const ProblemSpec spec = helmholtz_spec();
  const TrainBatch b = make_batch(spec, {2, 188, 560}, 1, 0);
  CHECK(b.geoms.size() == 2);
  CHECK(b.geoms[0].quad.count() == 560);
  CHECK(b.geoms[0].targets.cols == 2);
}

TEST_CASE("zero potential gives loss = mean |u0|^2") {
  const ProblemSpec spec = laplace_spec();
  const TrainBatch b = make_batch(spec, {4, 50, 100}, 5, 0);
  const PotentialFn zero = [](double, const BoundarySample& q) { return Mat(q.count(), 1); };
  const double loss = mc_loss(spec, b, zero);
  double expect = 0;
  long n = 0;
  for (const auto& g : b.geoms)
    for (int i = 0; i < g.targets.rows; ++i) {
      expect += g.targets(i, 0) * g.targets(i, 0);
      ++n;
    }
  expect /= static_cast<double>(n);
  CHECK(loss == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("zero potential gives a zero field and far field") {
  const ProblemSpec spec = helmholtz_spec();
  RngStream rng(2, StreamPurpose::kEvalQuadrature);
  const BoundarySample quad = sample_hemispheres(0.1, 500, rng);
  const Mat v(500, 2);
  Mat pts(2, 3);
  pts(0, 0) = 2.0;
  pts(1, 2) = -3.0;
  const Mat field = eval_representation(spec, quad, v, pts);
  CHECK(field(0, 0) == 0.0);
  CHECK(field(1, 1) == 0.0);
  const Mat dirs = latlong_directions(4, 8);
  const Mat ff = far_field(spec, quad, v, dirs);
  for (double x : ff.a) CHECK(x == 0.0);
}

TEST_CASE("representation is linear in the potential") {
  const ProblemSpec spec = laplace_spec();
  RngStream rng(3, StreamPurpose::kEvalQuadrature);
  const ParamCurve2D curve = ParamCurve2D::laplace_star();
  const BoundarySample quad = sample_curve(curve, 1.3, 400, rng);
  Mat v1(400, 1), v2(400, 1), vsum(400, 1);
  RngStream vr(4, {9});
  for (int k = 0; k < 400; ++k) {
    v1(k, 0) = vr.uniform(-1.0, 1.0);
    v2(k, 0) = vr.uniform(-1.0, 1.0);
    vsum(k, 0) = v1(k, 0) + v2(k, 0);
  }
  Mat pts(3, 2);
  pts(0, 0) = 0.2;
  pts(1, 1) = -0.3;
  pts(2, 0) = 0.1;
  pts(2, 1) = 0.4;
  const Mat f1 = eval_representation(spec, quad, v1, pts);
  const Mat f2 = eval_representation(spec, quad, v2, pts);
  const Mat fs = eval_representation(spec, quad, vsum, pts);
  for (int i = 0; i < 3; ++i)
    CHECK(fs(i, 0) == doctest::Approx(f1(i, 0) + f2(i, 0)).epsilon(1e-12));
}

TEST_CASE("scaling the data and the density scales the field") {
  const ProblemSpec spec = laplace_spec();
  RngStream rng(5, StreamPurpose::kEvalQuadrature);
  const ParamCurve2D curve = ParamCurve2D::laplace_star();
  const BoundarySample quad = sample_curve(curve, 1.2, 300, rng);
  Mat v(300, 1);
  RngStream vr(6, {9});
  for (double& x : v.a) x = vr.uniform(-1.0, 1.0);
  Mat vc = v;
  const double c = -3.7;
  for (double& x : vc.a) x *= c;
  Mat pts(1, 2);
  pts(0, 0) = 0.25;
  const Mat f = eval_representation(spec, quad, v, pts);
  const Mat fc = eval_representation(spec, quad, vc, pts);
  CHECK(fc(0, 0) == doctest::Approx(c * f(0, 0)).epsilon(1e-13));
}

TEST_CASE("MC boundary integration is unbiased on a smooth integrand") {
  // integrand f(alpha) = cos(alpha) + 0.5 sin(2 alpha) + 1, jacobian-free;
  // its parameter-domain integral is exactly 2 pi.
  const ParamCurve2D curve = ParamCurve2D::laplace_star();
  const double exact = 2.0 * kPi;
  const int m = 2000, n_seeds = 100;
  double mean = 0;
  std::vector<double> vals(n_seeds);
  for (int s = 0; s < n_seeds; ++s) {
    RngStream rng(s, StreamPurpose::kQuadrature, 0, 0);
    const BoundarySample sample = sample_curve(curve, 1.5, m, rng);
    double acc = 0;
    for (int k = 0; k < m; ++k) {
      const double a = sample.params(k, 0);
      acc += std::cos(a) + 0.5 * std::sin(2.0 * a) + 1.0;
    }
    vals[s] = acc * sample.domain_measure / m;
    mean += vals[s];
  }
  mean /= n_seeds;
  double var = 0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= (n_seeds - 1);
  const double stderr_mean = std::sqrt(var / n_seeds);
  CHECK(std::abs(mean - exact) < 3.0 * stderr_mean + 1e-12);
}

TEST_CASE("loss noise shrinks like 1/sqrt(M) when doubling M") {
  // Fixed model and fixed (t, observation) draws; only the quadrature set is
  // redrawn, so the loss scatter across seeds is pure MC noise.
  const ProblemSpec spec = laplace_spec();
  NetworkConfig net = tiny_net(spec);
  OperatorModel model(net, 3);
  const PotentialFn fn = model_potential_fn(model);
  const ParamCurve2D curve = ParamCurve2D::laplace_star();
  auto loss_std = [&](int m) {
    std::vector<double> losses;
    for (uint64_t s = 0; s < 20; ++s) {
      TrainBatch batch = make_batch(spec, {2, 40, m}, 100, 0);
      for (size_t j = 0; j < batch.geoms.size(); ++j) {
        RngStream rng(500 + s, StreamPurpose::kQuadrature, 0, j);
        batch.geoms[j].quad = sample_curve(curve, batch.geoms[j].t, m, rng);
      }
      losses.push_back(mc_loss(spec, batch, fn));
    }
    double mean = 0;
    for (double l : losses) mean += l;
    mean /= losses.size();
    double var = 0;
    for (double l : losses) var += (l - mean) * (l - mean);
    return std::sqrt(var / (losses.size() - 1));
  };
  const double s1 = loss_std(500);
  const double s2 = loss_std(1000);
  // scatter ratio should sit near sqrt(2) ~ 1.41
  CHECK(s1 / s2 > 1.1);
  CHECK(s1 / s2 < 1.9);
}

TEST_CASE("graph loss equals the plain Monte-Carlo loss for every pde") {
  for (const ProblemSpec& spec : {laplace_spec(), biharmonic_spec(), helmholtz_spec()}) {
    NetworkConfig net = tiny_net(spec);
    OperatorModel model(net, 29);
    const BatchShape shape{3, spec.pde == PdeKind::kHelmholtz3D ? 8 : 7,
                           spec.pde == PdeKind::kHelmholtz3D ? 10 : 9};
    LossGraph graph(model, spec, shape, {false, true});
    const TrainBatch batch = make_batch(spec, shape, 31, 4);
    const double graph_loss = graph.forward(batch);
    const double plain_loss = mc_loss(spec, batch, model_potential_fn(model));
    CHECK(graph_loss == doctest::Approx(plain_loss).epsilon(1e-12));
  }
}

TEST_CASE("relative_l2 basics") {
  Mat a(3, 1), b(3, 1);
  a.a = {1.0, 2.0, -1.0};
  b.a = {1.0, 2.0, -1.0};
  CHECK(relative_l2(a, b) == 0.0);
  Mat zero(3, 1);
  CHECK(relative_l2(zero, b) == doctest::Approx(1.0));
  Mat scaled = b;
  for (double& v : scaled.a) v *= 1.1;
  CHECK(relative_l2(scaled, b) == doctest::Approx(0.01).epsilon(1e-10));
  CHECK_THROWS_AS(relative_l2(b, zero), std::domain_error);
}

TEST_CASE("scattered field of a random potential decays like 1/r along a ray") {
  const ProblemSpec spec = helmholtz_spec();
  NetworkConfig net = tiny_net(spec);
  OperatorModel model(net, 41);
  const std::vector<double> radii{5, 10, 20, 40};
  Mat pts(4, 3);
  for (int i = 0; i < 4; ++i) {
    pts(i, 0) = radii[i] * 0.6;
    pts(i, 1) = radii[i] * 0.64;
    pts(i, 2) = radii[i] * 0.48;
  }
  const Mat field = eval_field(model, spec, 0.25, pts, 2000, 9);
  // fit log|u_s| vs log r
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 4; ++i) {
    const double mag = std::hypot(field(i, 0), field(i, 1));
    REQUIRE(mag > 0);
    const double lx = std::log(radii[i]), ly = std::log(mag);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.15));
}

TEST_CASE("interior grid masks points near and outside the boundary") {
  const ParamCurve2D curve = ParamCurve2D::laplace_star();
  const double t = 1.15, delta = 0.01;
  const FieldGrid grid = make_interior_grid(curve, t, 60, delta);
  CHECK(grid.points.rows > 500);
  for (int i = 0; i < grid.points.rows; ++i) {
    const double x = grid.points(i, 0), y = grid.points(i, 1);
    const double rho = std::hypot(x, y);
    CHECK(rho < curve.radius(std::atan2(y, x), t));
  }
}

TEST_CASE("slice grid masks the obstacles and the collar") {
  const FieldGrid grid = make_slice_grid(0.25, 80, -4.0, 4.0, 0.01);
  CHECK(grid.points.rows > 1000);
  for (int i = 0; i < grid.points.rows; ++i) {
    const Vec3 p{grid.points(i, 0), grid.points(i, 1), grid.points(i, 2)};
    const Vec3 qup{p.x, p.y, p.z - 0.25};
    if (qup.z > 0) CHECK(std::abs(norm(qup) - 1.0) > 0.009);
  }
}

TEST_CASE("total field of a zero model is the incident wave") {
  const ProblemSpec spec = helmholtz_spec();
  NetworkConfig net = tiny_net(spec);
  OperatorModel model(net, 51);
  // zero the decoder output layer
  for (auto& e : model.params().entries())
    if (e.name == "dec.out_w" || e.name == "dec.out_b") e.value.set_zero();
  Mat pts(1, 3);
  pts(0, 0) = 2.5;
  pts(0, 2) = 1.0;
  const Mat tot = total_field(model, spec, 0.1, pts, 400, 3);
  const KernelValue ui = helmholtz_incident({2.5, 0.0, 1.0}, spec.wavenumber);
  CHECK(tot(0, 0) == doctest::Approx(ui.re).epsilon(1e-14));
  CHECK(tot(0, 1) == doctest::Approx(ui.im).epsilon(1e-14));
}
