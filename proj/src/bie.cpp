#include "bino/bie.hpp"

#include <cmath>
#include <stdexcept>

namespace bino {

TrainBatch make_batch(const ProblemSpec& spec, const BatchShape& shape, uint64_t seed,
                      uint64_t step) {
  if (shape.n_t < 1 || shape.n_y < 1 || shape.m < 1)
    throw std::invalid_argument("make_batch: counts must be positive");
  if (!(spec.t_min <= spec.t_max))
    throw std::invalid_argument("make_batch: empty t range");
  TrainBatch batch;
  batch.shape = shape;
  batch.geoms.resize(shape.n_t);
  RngStream tdraws(seed, StreamPurpose::kGeomParams, step);
  for (int j = 0; j < shape.n_t; ++j)
    batch.geoms[j].t = tdraws.uniform(spec.t_min, spec.t_max);
  for (int j = 0; j < shape.n_t; ++j) {
    GeomBatch& g = batch.geoms[j];
    RngStream quad_rng(seed, StreamPurpose::kQuadrature, step, static_cast<uint64_t>(j));
    RngStream obs_rng(seed, StreamPurpose::kObservation, step, static_cast<uint64_t>(j));
    g.quad = spec.sample_boundary(g.t, shape.m, quad_rng);
    g.obs = spec.sample_boundary(g.t, shape.n_y, obs_rng);
    boundary_targets(spec, g.obs, g.targets);
  }
  return batch;
}

namespace {

// One row of kernel values against every quadrature point.
template <class Fn>
void for_each_obs_row(int n_rows, const ExecPolicy& pol, Fn fn) {
#pragma omp parallel for schedule(static) if (pol.parallel && n_rows > 1)
  for (int i = 0; i < n_rows; ++i) fn(i);
}

} // namespace

Mat eval_representation(const ProblemSpec& spec, const BoundarySample& quad, const Mat& v,
                        const Mat& pts) {
  const ExecPolicy pol = par::config();
  const int m = quad.count();
  const int n = pts.rows;
  const double s = quad.domain_measure / m;
  Mat out;
  switch (spec.pde) {
    case PdeKind::kLaplace2D: {
      out.resize(n, 1);
      for_each_obs_row(n, pol, [&](int i) {
        const Vec2 y{pts(i, 0), pts(i, 1)};
        double acc = 0;
        for (int k = 0; k < m; ++k)
          acc += v(k, 0) * laplace2d(quad.point2(k), y, spec.trunc).re;
        out(i, 0) = s * acc;
      });
      return out;
    }
    case PdeKind::kBiharmonic2D: {
      out.resize(n, 1);
      for_each_obs_row(n, pol, [&](int i) {
        const Vec2 y{pts(i, 0), pts(i, 1)};
        double acc = 0;
        for (int k = 0; k < m; ++k) {
          const BiharmonicKernels kv =
              biharmonic2d_all(quad.point2(k), y, quad.normal2(k), {0, 0}, spec.trunc);
          acc += v(k, 1) * kv.g + v(k, 0) * kv.gnx;
        }
        out(i, 0) = -s * acc;
      });
      return out;
    }
    case PdeKind::kHelmholtz3D: {
      out.resize(n, 2);
      for_each_obs_row(n, pol, [&](int i) {
        const Vec3 y{pts(i, 0), pts(i, 1), pts(i, 2)};
        double re = 0, im = 0;
        for (int k = 0; k < m; ++k) {
          const KernelValue g = helmholtz3d(quad.point3(k), y, spec.wavenumber, spec.trunc);
          re += v(k, 0) * g.re - v(k, 1) * g.im;
          im += v(k, 0) * g.im + v(k, 1) * g.re;
        }
        out(i, 0) = s * re;
        out(i, 1) = s * im;
      });
      return out;
    }
  }
  throw std::logic_error("eval_representation: bad pde");
}

Mat eval_representation_dn(const ProblemSpec& spec, const BoundarySample& quad,
                           const Mat& v, const BoundarySample& obs) {
  if (spec.pde != PdeKind::kBiharmonic2D)
    throw std::invalid_argument("eval_representation_dn: biharmonic only");
  const ExecPolicy pol = par::config();
  const int m = quad.count();
  const int n = obs.count();
  const double s = quad.domain_measure / m;
  Mat out(n, 1);
  for_each_obs_row(n, pol, [&](int i) {
    const Vec2 y = obs.point2(i);
    const Vec2 ny = obs.normal2(i);
    double acc = 0;
    for (int k = 0; k < m; ++k) {
      const BiharmonicKernels kv =
          biharmonic2d_all(quad.point2(k), y, quad.normal2(k), ny, spec.trunc);
      acc += v(k, 1) * kv.gny + v(k, 0) * kv.gnxny;
    }
    out(i, 0) = -s * acc;
  });
  return out;
}

double mc_loss(const ProblemSpec& spec, const TrainBatch& batch, const PotentialFn& fn) {
  double total = 0;
  long terms = 0;
  for (const GeomBatch& g : batch.geoms) {
    const Mat v = fn(g.t, g.quad);
    const Mat rep = eval_representation(spec, g.quad, v, g.obs.points);
    const int n = g.obs.count();
    if (spec.pde == PdeKind::kHelmholtz3D) {
      for (int i = 0; i < n; ++i) {
        const double rre = rep(i, 0) - g.targets(i, 0);
        const double rim = rep(i, 1) - g.targets(i, 1);
        total += rre * rre + rim * rim;
      }
    } else {
      for (int i = 0; i < n; ++i) {
        const double r = rep(i, 0) - g.targets(i, 0);
        total += r * r;
      }
      if (spec.pde == PdeKind::kBiharmonic2D) {
        const Mat dn = eval_representation_dn(spec, g.quad, v, g.obs);
        for (int i = 0; i < n; ++i) {
          const double r = dn(i, 0) - g.targets(i, 1);
          total += r * r;
        }
      }
    }
    terms += n;
  }
  return total / static_cast<double>(terms);
}

PotentialFn model_potential_fn(const OperatorModel& model) {
  return [&model](double t, const BoundarySample& quad) {
    return model.potential(t, quad.points);
  };
}

namespace {

/// Fill the pde-dependent kernel matrices for one geometry: entries are
/// truncated kernel evaluations between quadrature point k (column) and
/// observation point i (row).
void assemble_kernel_inputs(const ProblemSpec& spec, const BoundarySample& quad,
                            const BoundarySample& obs, std::vector<Mat*> km,
                            const ExecPolicy& pol) {
  const int m = quad.count(), n = obs.count();
  for (Mat* k : km)
    if (k->rows != n || k->cols != m) k->resize(n, m);
  switch (spec.pde) {
    case PdeKind::kLaplace2D: {
      Mat& k0 = *km[0];
      for_each_obs_row(n, pol, [&](int i) {
        const Vec2 y = obs.point2(i);
        double* row = k0.row(i);
        for (int k = 0; k < m; ++k) row[k] = laplace2d(quad.point2(k), y, spec.trunc).re;
      });
      return;
    }
    case PdeKind::kBiharmonic2D: {
      Mat& kg = *km[0];
      Mat& kgnx = *km[1];
      Mat& kgny = *km[2];
      Mat& kgxy = *km[3];
      for_each_obs_row(n, pol, [&](int i) {
        const Vec2 y = obs.point2(i);
        const Vec2 ny = obs.normal2(i);
        for (int k = 0; k < m; ++k) {
          const BiharmonicKernels kv =
              biharmonic2d_all(quad.point2(k), y, quad.normal2(k), ny, spec.trunc);
          kg(i, k) = kv.g;
          kgnx(i, k) = kv.gnx;
          kgny(i, k) = kv.gny;
          kgxy(i, k) = kv.gnxny;
        }
      });
      return;
    }
    case PdeKind::kHelmholtz3D: {
      Mat& kre = *km[0];
      Mat& kim = *km[1];
      for_each_obs_row(n, pol, [&](int i) {
        const Vec3 y = obs.point3(i);
        for (int k = 0; k < m; ++k) {
          const KernelValue g = helmholtz3d(quad.point3(k), y, spec.wavenumber, spec.trunc);
          kre(i, k) = g.re;
          kim(i, k) = g.im;
        }
      });
      return;
    }
  }
}

int kernel_count(PdeKind pde) {
  switch (pde) {
    case PdeKind::kLaplace2D: return 1;
    case PdeKind::kBiharmonic2D: return 4;
    case PdeKind::kHelmholtz3D: return 2;
  }
  return 0;
}

} // namespace

LossGraph::LossGraph(OperatorModel& model, const ProblemSpec& spec, const BatchShape& shape,
                     ExecPolicy pol)
    : model_(model), spec_(spec), shape_(shape), tape_(pol) {
  spec_.validate();
  if (model.config().coord_dim != spec_.coord_dim() ||
      model.config().n_out != spec_.n_out())
    throw std::invalid_argument("LossGraph: model shape does not match problem");

  // Record the graph structure against a canonical batch of the right shape.
  const TrainBatch proto = make_batch(spec_, shape_, 0, 0);
  const double scale = proto.geoms[0].quad.domain_measure / shape_.m;

  Mat tcol(shape_.n_t, 1);
  for (int j = 0; j < shape_.n_t; ++j) tcol(j, 0) = proto.geoms[j].t;
  t_in_ = tape_.input(std::move(tcol));

  const TapeBinding bind = model_.bind(tape_);
  const int beta = model_.encode_tape(tape_, bind, t_in_);

  const int nk = kernel_count(spec_.pde);
  int loss_sum = -1;
  for (int j = 0; j < shape_.n_t; ++j) {
    const GeomBatch& g = proto.geoms[j];
    GeomNodes gn;
    gn.x = tape_.input(g.quad.points);
    for (int q = 0; q < nk; ++q) gn.kmats.push_back(tape_.input(Mat(shape_.n_y, shape_.m)));
    for (int c = 0; c < spec_.n_targets(); ++c) {
      Mat tgt(shape_.n_y, 1);
      for (int i = 0; i < shape_.n_y; ++i) tgt(i, 0) = g.targets(i, c);
      gn.targets.push_back(tape_.input(std::move(tgt)));
    }

    const int beta_j = tape_.slice_row(beta, j);
    const int v = model_.decode_tape(tape_, bind, beta_j, gn.x);

    int lj = -1;
    switch (spec_.pde) {
      case PdeKind::kLaplace2D: {
        const int r = tape_.sub(tape_.scale(tape_.matmul(gn.kmats[0], v), scale),
                                gn.targets[0]);
        lj = tape_.sum_all(tape_.mul(r, r));
        break;
      }
      case PdeKind::kBiharmonic2D: {
        const int vv = tape_.slice_cols(v, 0, 1);
        const int ww = tape_.slice_cols(v, 1, 2);
        const int rd = tape_.sub(
            tape_.scale(tape_.add(tape_.matmul(gn.kmats[0], ww), tape_.matmul(gn.kmats[1], vv)),
                        -scale),
            gn.targets[0]);
        const int rn = tape_.sub(
            tape_.scale(tape_.add(tape_.matmul(gn.kmats[2], ww), tape_.matmul(gn.kmats[3], vv)),
                        -scale),
            gn.targets[1]);
        lj = tape_.add(tape_.sum_all(tape_.mul(rd, rd)), tape_.sum_all(tape_.mul(rn, rn)));
        break;
      }
      case PdeKind::kHelmholtz3D: {
        const int vre = tape_.slice_cols(v, 0, 1);
        const int vim = tape_.slice_cols(v, 1, 2);
        const int rre = tape_.sub(
            tape_.scale(tape_.sub(tape_.matmul(gn.kmats[0], vre), tape_.matmul(gn.kmats[1], vim)),
                        scale),
            gn.targets[0]);
        const int rim = tape_.sub(
            tape_.scale(tape_.add(tape_.matmul(gn.kmats[0], vim), tape_.matmul(gn.kmats[1], vre)),
                        scale),
            gn.targets[1]);
        lj = tape_.add(tape_.sum_all(tape_.mul(rre, rre)), tape_.sum_all(tape_.mul(rim, rim)));
        break;
      }
    }
    loss_sum = (j == 0) ? lj : tape_.add(loss_sum, lj);
    gnodes_.push_back(std::move(gn));
  }
  loss_ = tape_.scale(loss_sum,
                      1.0 / (static_cast<double>(shape_.n_y) * static_cast<double>(shape_.n_t)));
  load(proto);
  tape_.forward();
}

void LossGraph::load(const TrainBatch& batch) {
  if (static_cast<int>(batch.geoms.size()) != shape_.n_t ||
      batch.shape.n_y != shape_.n_y || batch.shape.m != shape_.m)
    throw std::invalid_argument("LossGraph: batch shape mismatch");
  Mat& tcol = tape_.input_value(t_in_);
  for (int j = 0; j < shape_.n_t; ++j) tcol(j, 0) = batch.geoms[j].t;
  const int nk = kernel_count(spec_.pde);
  for (int j = 0; j < shape_.n_t; ++j) {
    const GeomBatch& g = batch.geoms[j];
    tape_.input_value(gnodes_[j].x) = g.quad.points;
    std::vector<Mat*> km;
    for (int q = 0; q < nk; ++q) km.push_back(&tape_.input_value(gnodes_[j].kmats[q]));
    assemble_kernel_inputs(spec_, g.quad, g.obs, km, tape_.policy());
    for (int c = 0; c < spec_.n_targets(); ++c) {
      Mat& tgt = tape_.input_value(gnodes_[j].targets[c]);
      for (int i = 0; i < shape_.n_y; ++i) tgt(i, 0) = g.targets(i, c);
    }
  }
}

double LossGraph::forward(const TrainBatch& batch) {
  load(batch);
  tape_.forward();
  return loss_value();
}

double LossGraph::refresh() {
  tape_.forward();
  return loss_value();
}

void LossGraph::backward() { tape_.backward(loss_); }

double LossGraph::loss_value() const { return tape_.value(loss_).a[0]; }

Mat far_field(const ProblemSpec& spec, const BoundarySample& quad, const Mat& v,
              const Mat& directions) {
  if (spec.pde != PdeKind::kHelmholtz3D)
    throw std::invalid_argument("far_field: Helmholtz only");
  const ExecPolicy pol = par::config();
  const int m = quad.count();
  const int n = directions.rows;
  const double s = quad.domain_measure / m / (4.0 * kPi);
  const double k = spec.wavenumber;
  Mat out(n, 2);
  for_each_obs_row(n, pol, [&](int i) {
    const Vec3 dir{directions(i, 0), directions(i, 1), directions(i, 2)};
    double re = 0, im = 0;
    for (int q = 0; q < m; ++q) {
      const double phase = -k * dot(dir, quad.point3(q));
      const double c = std::cos(phase), sn = std::sin(phase);
      re += c * v(q, 0) - sn * v(q, 1);
      im += c * v(q, 1) + sn * v(q, 0);
    }
    out(i, 0) = s * re;
    out(i, 1) = s * im;
  });
  return out;
}

double relative_l2(const Mat& pred, const Mat& truth) {
  if (pred.rows != truth.rows || pred.cols != truth.cols)
    throw std::invalid_argument("relative_l2: shape mismatch");
  double num = 0, den = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    const double d = pred.a[i] - truth.a[i];
    num += d * d;
    den += truth.a[i] * truth.a[i];
  }
  if (den == 0.0) throw std::domain_error("relative_l2: zero reference");
  return num / den;
}

namespace {
BoundarySample eval_quadrature(const ProblemSpec& spec, double t, int m_eval,
                               uint64_t eval_seed) {
  RngStream rng(eval_seed, StreamPurpose::kEvalQuadrature);
  return spec.sample_boundary(t, m_eval, rng);
}
} // namespace

Mat eval_field(const OperatorModel& model, const ProblemSpec& spec, double t,
               const Mat& pts, int m_eval, uint64_t eval_seed) {
  const BoundarySample quad = eval_quadrature(spec, t, m_eval, eval_seed);
  const Mat v = model.potential(t, quad.points);
  return eval_representation(spec, quad, v, pts);
}

Mat far_field_model(const OperatorModel& model, const ProblemSpec& spec, double t,
                    const Mat& directions, int m_eval, uint64_t eval_seed) {
  const BoundarySample quad = eval_quadrature(spec, t, m_eval, eval_seed);
  const Mat v = model.potential(t, quad.points);
  return far_field(spec, quad, v, directions);
}

Mat total_field(const OperatorModel& model, const ProblemSpec& spec, double t,
                const Mat& pts, int m_eval, uint64_t eval_seed) {
  if (spec.pde != PdeKind::kHelmholtz3D)
    throw std::invalid_argument("total_field: Helmholtz only");
  Mat out = eval_field(model, spec, t, pts, m_eval, eval_seed);
  for (int i = 0; i < pts.rows; ++i) {
    const KernelValue ui =
        helmholtz_incident({pts(i, 0), pts(i, 1), pts(i, 2)}, spec.wavenumber);
    out(i, 0) += ui.re;
    out(i, 1) += ui.im;
  }
  return out;
}

FieldGrid make_interior_grid(const ParamCurve2D& curve, double t, int n, double delta) {
  if (n < 2) throw std::invalid_argument("make_interior_grid: n must be >= 2");
  double rmax = 0;
  for (int i = 0; i < 2048; ++i)
    rmax = std::max(rmax, curve.radius(2.0 * kPi * i / 2048, t));
  const double b = rmax * 1.02;
  std::vector<double> kept;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double x = -b + 2.0 * b * ix / (n - 1);
      const double y = -b + 2.0 * b * iy / (n - 1);
      const double rho = std::hypot(x, y);
      const double phi = std::atan2(y, x);
      const double r = curve.radius(phi, t);
      const double dr = curve.radius_derivative(phi, t);
      const double jac = std::sqrt(r * r + dr * dr);
      // radial margin equivalent to normal clearance delta
      if (rho <= r - delta * jac / r) {
        kept.push_back(x);
        kept.push_back(y);
      }
    }
  }
  if (kept.empty()) throw std::runtime_error("make_interior_grid: all points masked");
  const int n_kept = static_cast<int>(kept.size() / 2);
  FieldGrid grid;
  grid.points = Mat(n_kept, 2, std::move(kept));
  return grid;
}

namespace {
double hemisphere_surface_distance(const Vec3& p, double center_z, bool upper) {
  const Vec3 q{p.x, p.y, p.z - center_z};
  const double qz = upper ? q.z : -q.z;
  if (qz >= 0.0) return std::abs(norm(q) - 1.0);
  const double rho = std::hypot(q.x, q.y);
  return std::hypot(rho - 1.0, q.z);
}
bool inside_hemisphere_solid(const Vec3& p, double center_z, bool upper) {
  const Vec3 q{p.x, p.y, p.z - center_z};
  const double qz = upper ? q.z : -q.z;
  return qz > 0.0 && norm(q) < 1.0;
}
} // namespace

FieldGrid make_slice_grid(double t, int n, double box_lo, double box_hi, double delta) {
  if (n < 2) throw std::invalid_argument("make_slice_grid: n must be >= 2");
  std::vector<double> kept;
  for (int iz = 0; iz < n; ++iz) {
    for (int ix = 0; ix < n; ++ix) {
      const double x = box_lo + (box_hi - box_lo) * ix / (n - 1);
      const double z = box_lo + (box_hi - box_lo) * iz / (n - 1);
      const Vec3 p{x, 0.0, z};
      if (inside_hemisphere_solid(p, t, true) || inside_hemisphere_solid(p, -t, false))
        continue;
      if (hemisphere_surface_distance(p, t, true) < delta ||
          hemisphere_surface_distance(p, -t, false) < delta)
        continue;
      kept.push_back(x);
      kept.push_back(0.0);
      kept.push_back(z);
    }
  }
  if (kept.empty()) throw std::runtime_error("make_slice_grid: all points masked");
  const int n_kept = static_cast<int>(kept.size() / 3);
  FieldGrid grid;
  grid.points = Mat(n_kept, 3, std::move(kept));
  return grid;
}

Mat latlong_directions(int n_theta, int n_phi, std::vector<double>* thetas,
                       std::vector<double>* phis) {
  Mat dirs(n_theta * n_phi, 3);
  if (thetas) thetas->clear();
  if (phis) phis->clear();
  for (int it = 0; it < n_theta; ++it) {
    const double theta = kPi * (it + 0.5) / n_theta;
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = 2.0 * kPi * ip / n_phi;
      const int row = it * n_phi + ip;
      dirs(row, 0) = std::sin(theta) * std::cos(phi);
      dirs(row, 1) = std::sin(theta) * std::sin(phi);
      dirs(row, 2) = std::cos(theta);
      if (thetas) thetas->push_back(theta);
      if (phis) phis->push_back(phi);
    }
  }
  return dirs;
}

} // namespace bino
