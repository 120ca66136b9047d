#include <doctest.h>

#include <cmath>

#include "bino/optim.hpp"

using namespace bino;

TEST_CASE("xavier bounds for a 1x1 matrix") {
  RngStream rng(1, StreamPurpose::kInit, 0);
  for (int i = 0; i < 200; ++i) {
    const Mat w = xavier_init(1, 1, rng);
    CHECK(std::abs(w.a[0]) <= std::sqrt(3.0)); // sqrt(6/2)
  }
}

TEST_CASE("xavier variance matches 2/(fan_in+fan_out)") {
  RngStream rng(2, StreamPurpose::kInit, 0);
  double m2 = 0;
  long n = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Mat w = xavier_init(100, 100, rng);
    for (double v : w.a) m2 += v * v;
    n += static_cast<long>(w.size());
  }
  const double var = m2 / n;
  CHECK(var == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("xavier draws are reproducible per stream") {
  RngStream a(3, StreamPurpose::kInit, 4);
  RngStream b(3, StreamPurpose::kInit, 4);
  const Mat w1 = xavier_init(7, 9, a);
  const Mat w2 = xavier_init(7, 9, b);
  CHECK(w1.a == w2.a);
}

TEST_CASE("learning-rate schedule is a floor-function step decay") {
  const LrSchedule sched{1e-3, 0.95, 20000};
  CHECK(sched.rate(0) == doctest::Approx(1e-3));
  CHECK(sched.rate(19999) == doctest::Approx(1e-3));
  CHECK(sched.rate(20000) == doctest::Approx(9.5e-4).epsilon(1e-12));
  CHECK(sched.rate(40001) == doctest::Approx(1e-3 * 0.95 * 0.95).epsilon(1e-12));
  CHECK(sched.rate(200000) > 0);
}

TEST_CASE("adam leaves parameters alone when the gradient is zero") {
  ParamStore params;
  Mat w(2, 2);
  w.a = {1.0, -2.0, 3.0, 0.5};
  params.add("w", w);
  AdamState state;
  state.init(params);
  adam_step(params, state, {1e-3, 0.95, 20000});
  CHECK(params[0].value.a == w.a);
}

TEST_CASE("one adam step from zero state is a bias-corrected signed step") {
  ParamStore params;
  Mat w(1, 2);
  w.a = {0.4, -0.4};
  params.add("w", w);
  params[0].grad.a = {2.5, -0.03};
  AdamState state;
  state.init(params);
  const LrSchedule sched{1e-3, 0.95, 20000};
  adam_step(params, state, sched);
  // m_hat = g, v_hat = g^2 -> update = -lr * g / (|g| + eps) ~= -lr sign(g)
  CHECK(params[0].value.a[0] == doctest::Approx(0.4 - 1e-3).epsilon(1e-6));
  CHECK(params[0].value.a[1] == doctest::Approx(-0.4 + 1e-3).epsilon(1e-6));
  CHECK(state.step == 1);
}

TEST_CASE("adam skips frozen parameters") {
  ParamStore params;
  Mat w(1, 1);
  w.a = {1.0};
  params.add("w", w);
  params[0].trainable = false;
  params[0].grad.a = {10.0};
  AdamState state;
  state.init(params);
  adam_step(params, state, {1e-3, 0.95, 20000});
  CHECK(params[0].value.a[0] == 1.0);
}
