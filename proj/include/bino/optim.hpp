#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bino/mat.hpp"
#include "bino/rng.hpp"

namespace bino {

/// Named parameter array with its gradient accumulator. The tape references
/// these through pointers; the optimizer updates them in place.
struct ParamEntry {
  std::string name;
  Mat value;
  Mat grad;
  bool trainable = true;
};

class ParamStore {
 public:
  int add(const std::string& name, Mat value) {
    ParamEntry e;
    e.name = name;
    e.grad = Mat(value.rows, value.cols);
    e.value = std::move(value);
    entries_.push_back(std::move(e));
    return static_cast<int>(entries_.size()) - 1;
  }
  ParamEntry& operator[](int i) { return entries_[i]; }
  const ParamEntry& operator[](int i) const { return entries_[i]; }
  int count() const { return static_cast<int>(entries_.size()); }
  long scalar_count() const {
    long n = 0;
    for (const auto& e : entries_) n += static_cast<long>(e.value.size());
    return n;
  }
  void zero_grads() {
    for (auto& e : entries_) e.grad.set_zero();
  }
  std::vector<ParamEntry>& entries() { return entries_; }
  const std::vector<ParamEntry>& entries() const { return entries_; }

 private:
  std::vector<ParamEntry> entries_;
};

/// Step-decayed learning rate: base * rate^floor(step / period).
struct LrSchedule {
  double base = 1e-3;
  double decay_rate = 0.95;
  long decay_period = 20000;
  double rate(long step) const {
    return base * std::pow(decay_rate, static_cast<double>(step / decay_period));
  }
};

struct AdamState {
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long step = 0; // number of updates applied so far
  std::vector<Mat> m, v;

  void init(const ParamStore& params) {
    step = 0;
    m.clear();
    v.clear();
    for (const auto& e : params.entries()) {
      m.emplace_back(e.value.rows, e.value.cols);
      v.emplace_back(e.value.rows, e.value.cols);
    }
  }
};

/// Uniform Xavier/Glorot entries in +-sqrt(6 / (fan_in + fan_out)) for a
/// [fan_in x fan_out] weight matrix.
Mat xavier_init(int fan_in, int fan_out, RngStream& rng);

/// One bias-corrected Adam update of every parameter, at the schedule rate
/// for the current step counter.
void adam_step(ParamStore& params, AdamState& state, const LrSchedule& schedule);

} // namespace bino
