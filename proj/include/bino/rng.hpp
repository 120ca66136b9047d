#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace bino {

/// Labels for derived random streams. Each (seed, purpose, indices...) tuple
/// names an independent stream, so samplers running in parallel draw the
/// same numbers no matter how work is scheduled.
enum class StreamPurpose : uint64_t {
  kInit = 1,          // network parameter initialization
  kGeomParams = 2,    // per-step draws of the geometry parameter t
  kQuadrature = 3,    // integration point sets B
  kObservation = 4,   // observation point sets T
  kEvalQuadrature = 5 // fixed-seed quadrature for field reconstruction
};

/// Counter-based stream: the n-th draw is a pure function of (key, n), via
/// the splitmix64 finalizer on key + n * golden ratio. Random access through
/// at(), sequential use through next()/uniform()/gaussian().
class RngStream {
 public:
  RngStream(uint64_t seed, std::initializer_list<uint64_t> ids) : key_(seed) {
    for (uint64_t id : ids) key_ = mix64(key_ ^ (id + 0x9e3779b97f4a7c15ull + (key_ << 6) + (key_ >> 2)));
  }
  RngStream(uint64_t seed, StreamPurpose p, uint64_t i0 = 0, uint64_t i1 = 0)
      : RngStream(seed, {static_cast<uint64_t>(p), i0, i1}) {}

  uint64_t at(uint64_t n) const { return mix64(key_ + (n + 1) * 0x9e3779b97f4a7c15ull); }
  uint64_t next() { return at(counter_++); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; consumes two counter slots.
  double gaussian() {
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
  }

  uint64_t counter() const { return counter_; }
  void set_counter(uint64_t c) { counter_ = c; }

  static uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

} // namespace bino
