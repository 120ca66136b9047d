#include "bino/optim.hpp"

namespace bino {

Mat xavier_init(int fan_in, int fan_out, RngStream& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  Mat w(fan_in, fan_out);
  for (double& v : w.a) v = rng.uniform(-bound, bound);
  return w;
}

void adam_step(ParamStore& params, AdamState& state, const LrSchedule& schedule) {
  const double lr = schedule.rate(state.step);
  const long t = state.step + 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(t));
  for (int p = 0; p < params.count(); ++p) {
    ParamEntry& e = params[p];
    if (!e.trainable) continue;
    Mat& m = state.m[p];
    Mat& v = state.v[p];
    const long n = static_cast<long>(e.value.size());
#pragma omp parallel for schedule(static) if (n >= 65536)
    for (long i = 0; i < n; ++i) {
      const double g = e.grad.a[i];
      m.a[i] = state.beta1 * m.a[i] + (1.0 - state.beta1) * g;
      v.a[i] = state.beta2 * v.a[i] + (1.0 - state.beta2) * g * g;
      const double mhat = m.a[i] / bc1;
      const double vhat = v.a[i] / bc2;
      e.value.a[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
  state.step = t;
}

} // namespace bino
