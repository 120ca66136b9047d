#include <doctest.h>

#include <cmath>

#include "bino/rng.hpp"
#include "bino/tape.hpp"

using namespace bino;

namespace {
Mat random_mat(int r, int c, uint64_t seed) {
  Mat m(r, c);
  RngStream rng(seed, {7});
  for (double& v : m.a) v = rng.uniform(-1.0, 1.0);
  return m;
}

// FD check of d(scalar_root)/d(param) for an arbitrary recorded graph.
double max_grad_error(Tape& tape, int root, Mat& theta, const Mat& grad) {
  tape.backward(root);
  double worst = 0, gmax = 0;
  Mat g_ad = grad; // copy: the backward below would overwrite it
  for (size_t i = 0; i < theta.size(); ++i) {
    const double orig = theta.a[i];
    const double h = 1e-6 * std::max(1.0, std::abs(orig));
    theta.a[i] = orig + h;
    tape.forward();
    const double lp = tape.value(root).a[0];
    theta.a[i] = orig - h;
    tape.forward();
    const double lm = tape.value(root).a[0];
    theta.a[i] = orig;
    const double fd = (lp - lm) / (2.0 * h);
    worst = std::max(worst, std::abs(g_ad.a[i] - fd));
    gmax = std::max(gmax, std::abs(fd));
  }
  tape.forward();
  return worst / std::max(gmax, 1e-12);
}
} // namespace

TEST_CASE("square function gradient: d(w^2)/dw = 2w") {
  Mat w(1, 1), g(1, 1);
  w.a[0] = 3.0;
  Tape tape({false, true});
  const int p = tape.param(&w, &g);
  const int y = tape.sum_all(tape.mul(p, p));
  tape.backward(y);
  CHECK(g.a[0] == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("every primitive op passes a finite-difference gradient check") {
  Mat theta = random_mat(4, 3, 1);
  Mat grad(4, 3);
  const Mat other = random_mat(4, 3, 2);
  const Mat weights = random_mat(3, 5, 3);
  const Mat bias = random_mat(1, 5, 4);
  Mat bias_g(1, 5);
  Mat bias_param = bias;

  Tape tape({false, true});
  const int p = tape.param(&theta, &grad);
  const int b = tape.param(&bias_param, &bias_g);
  const int c = tape.input(other);
  const int w = tape.input(weights);

  // chain touching matmul, add_bias, gelu, cos, sin, mul, add, sub, scale,
  // concat, slices, broadcast, row_sum, clamp
  const int mm = tape.matmul(p, w);              // [4,5]
  const int ab = tape.add_bias(mm, b);           // [4,5]
  const int ge = tape.gelu(ab);
  const int cs = tape.cos_op(ge);
  const int sn = tape.sin_op(ge);
  const int cc = tape.concat_cols(cs, sn);       // [4,10]
  const int sl = tape.slice_cols(cc, 2, 7);      // [4,5]
  const int row = tape.slice_row(sl, 1);         // [1,5]
  const int bc = tape.broadcast_row(row, 4);     // [4,5]
  const int mu = tape.mul(bc, ge);
  const int ad = tape.add(mu, ab);
  const int su = tape.sub(ad, tape.scale(ge, 0.37));
  const int cl = tape.clamp(su, -0.8, 0.8);
  const int rs = tape.row_sum(cl);               // [4,1]
  const int addc = tape.add(rs, tape.mul(rs, rs));
  const int root = tape.sum_all(addc);

  CHECK(max_grad_error(tape, root, theta, grad) < 1e-6);
  tape.backward(root);
  Mat bias_copy = bias_g;
  CHECK(max_grad_error(tape, root, bias_param, bias_copy) < 1e-6);
}

TEST_CASE("clamp saturates with zero adjoint") {
  Mat w(1, 3), g(1, 3);
  w.a = {5.0, 0.2, -9.0};
  Tape tape({false, true});
  const int p = tape.param(&w, &g);
  const int y = tape.sum_all(tape.clamp(p, -1.0, 1.0));
  CHECK(tape.value(y).a[0] == doctest::Approx(1.0 + 0.2 - 1.0));
  tape.backward(y);
  CHECK(g.a[0] == 0.0);
  CHECK(g.a[1] == 1.0);
  CHECK(g.a[2] == 0.0);
}

TEST_CASE("clamp maps NaN to the upper bound with zero adjoint") {
  Mat w(1, 2), g(1, 2);
  w.a = {std::nan(""), 0.5};
  Tape tape({false, true});
  const int p = tape.param(&w, &g);
  const int c = tape.clamp(p, -2.0, 2.0);
  CHECK(tape.value(c).a[0] == 2.0);
  tape.backward(tape.sum_all(c));
  CHECK(g.a[0] == 0.0);
  CHECK(g.a[1] == 1.0);
}

TEST_CASE("gelu identities") {
  CHECK(gelu_scalar(0.0) == 0.0);
  for (double z : {0.3, 1.7, -2.2}) CHECK(gelu_scalar(z) - gelu_scalar(-z) == doctest::Approx(z).epsilon(1e-14));
  CHECK(gelu_derivative(0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("backward rejects non-scalar roots") {
  Mat w(2, 2), g(2, 2);
  Tape tape({false, true});
  const int p = tape.param(&w, &g);
  CHECK_THROWS_AS(tape.backward(p), std::invalid_argument);
}

TEST_CASE("forward() reproduces recorded values after input updates") {
  Mat w = random_mat(3, 3, 9);
  Mat g(3, 3);
  Tape tape({false, true});
  const int p = tape.param(&w, &g);
  const int x = tape.input(random_mat(5, 3, 10));
  const int y = tape.sum_all(tape.gelu(tape.matmul(x, p)));
  const double v1 = tape.value(y).a[0];
  tape.input_value(x) = random_mat(5, 3, 11);
  tape.forward();
  const double v2 = tape.value(y).a[0];
  CHECK(v1 != v2);
  tape.input_value(x) = random_mat(5, 3, 10);
  tape.forward();
  CHECK(tape.value(y).a[0] == v1);
}

TEST_CASE("corrupted gelu adjoint is caught by the finite-difference check") {
  Mat theta = random_mat(3, 3, 21);
  Mat grad(3, 3);
  Tape tape({false, true});
  tape.corrupt_gelu_adjoint(true);
  const int p = tape.param(&theta, &grad);
  const int root = tape.sum_all(tape.gelu(p));
  CHECK(max_grad_error(tape, root, theta, grad) > 1e-6);
}

TEST_CASE("parallel and serial tapes agree bit for bit") {
  Mat w1 = random_mat(64, 32, 30), g1(64, 32);
  Mat w2 = w1, g2(64, 32);
  const Mat x = random_mat(128, 64, 31);
  auto build = [&](Tape& tape, Mat& w, Mat& g) {
    const int p = tape.param(&w, &g);
    const int xi = tape.input(x);
    const int h = tape.gelu(tape.matmul(xi, p));
    const int root = tape.sum_all(tape.mul(h, h));
    tape.backward(root);
    return tape.value(root).a[0];
  };
  Tape serial({false, true});
  Tape parallel({true, true});
  const double v1 = build(serial, w1, g1);
  const double v2 = build(parallel, w2, g2);
  CHECK(v1 == v2);
  CHECK(g1.a == g2.a);
}
