#pragma once

#include <cmath>

namespace bino {

struct Vec2 {
  double x = 0, y = 0;
};
struct Vec3 {
  double x = 0, y = 0, z = 0;
};

inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// One kernel evaluation; im stays zero for the real kernels.
struct KernelValue {
  double re = 0, im = 0;
};

/// Clamp for near-singular kernel evaluations.
struct TruncationRule {
  double beta = 1.0e5;
};

inline double truncate_component(double c, const TruncationRule& rule) {
  if (std::isnan(c)) return rule.beta;
  if (c > rule.beta) return rule.beta;
  if (c < -rule.beta) return -rule.beta;
  return c;
}

inline KernelValue truncate(KernelValue v, const TruncationRule& rule) {
  return {truncate_component(v.re, rule), truncate_component(v.im, rule)};
}

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// -(1/2pi) ln|x-y|
inline KernelValue laplace2d(const Vec2& x, const Vec2& y,
                             const TruncationRule& rule = {}) {
  const double r = norm(x - y);
  return truncate({-std::log(r) / (2.0 * kPi), 0.0}, rule);
}

/// 1/(4pi |x-y|)
inline KernelValue laplace3d(const Vec3& x, const Vec3& y,
                             const TruncationRule& rule = {}) {
  const double r = norm(x - y);
  return truncate({1.0 / (4.0 * kPi * r), 0.0}, rule);
}

/// (1/8pi) r^2 ln r, extended by 0 at r = 0.
inline KernelValue biharmonic2d(const Vec2& x, const Vec2& y,
                                const TruncationRule& rule = {}) {
  const double r = norm(x - y);
  if (r == 0.0) return {0.0, 0.0};
  return truncate({r * r * std::log(r) / (8.0 * kPi), 0.0}, rule);
}

/// d/dn_x of the biharmonic kernel: (1/8pi)(2 ln r + 1)((x-y).n_x),
/// extended by 0 at r = 0.
inline KernelValue biharmonic2d_dnx(const Vec2& x, const Vec2& y, const Vec2& n_x,
                                    const TruncationRule& rule = {}) {
  const Vec2 d = x - y;
  const double r = norm(d);
  if (r == 0.0) return {0.0, 0.0};
  return truncate({(2.0 * std::log(r) + 1.0) * dot(d, n_x) / (8.0 * kPi), 0.0}, rule);
}

/// d/dn_y of the biharmonic kernel: -(1/8pi)(2 ln r + 1)((x-y).n_y).
inline KernelValue biharmonic2d_dny(const Vec2& x, const Vec2& y, const Vec2& n_y,
                                    const TruncationRule& rule = {}) {
  const Vec2 d = x - y;
  const double r = norm(d);
  if (r == 0.0) return {0.0, 0.0};
  return truncate({-(2.0 * std::log(r) + 1.0) * dot(d, n_y) / (8.0 * kPi), 0.0}, rule);
}

/// Mixed normal derivative d^2/(dn_x dn_y) of the biharmonic kernel:
/// -(1/8pi) [ 2 ((x-y).n_x)((x-y).n_y)/r^2 + (2 ln r + 1)(n_x.n_y) ].
/// Log-singular; the clamp absorbs coincident points.
inline KernelValue biharmonic2d_dnxdny(const Vec2& x, const Vec2& y, const Vec2& n_x,
                                       const Vec2& n_y, const TruncationRule& rule = {}) {
  const Vec2 d = x - y;
  const double r2 = dot(d, d);
  const double r = std::sqrt(r2);
  const double v = -(2.0 * dot(d, n_x) * dot(d, n_y) / r2 +
                     (2.0 * std::log(r) + 1.0) * dot(n_x, n_y)) /
                   (8.0 * kPi);
  return truncate({v, 0.0}, rule);
}

/// e^{ik|x-y|} / (4pi |x-y|), componentwise truncation.
inline KernelValue helmholtz3d(const Vec3& x, const Vec3& y, double k,
                               const TruncationRule& rule = {}) {
  const double r = norm(x - y);
  const double inv = 1.0 / (4.0 * kPi * r);
  return truncate({std::cos(k * r) * inv, std::sin(k * r) * inv}, rule);
}

/// All four biharmonic kernels of one point pair in a single evaluation
/// (one sqrt and one log); identical values to the individual functions.
struct BiharmonicKernels {
  double g = 0, gnx = 0, gny = 0, gnxny = 0;
};

inline BiharmonicKernels biharmonic2d_all(const Vec2& x, const Vec2& y, const Vec2& n_x,
                                          const Vec2& n_y, const TruncationRule& rule = {}) {
  const Vec2 d = x - y;
  const double r2 = dot(d, d);
  BiharmonicKernels out;
  if (r2 == 0.0) {
    out.gnxny = rule.beta; // NaN rule: log singularity clamps up
    return out;
  }
  const double r = std::sqrt(r2);
  const double lg = std::log(r);
  const double dnx = dot(d, n_x), dny = dot(d, n_y);
  constexpr double c8 = 1.0 / (8.0 * kPi);
  out.g = truncate_component(r2 * lg * c8, rule);
  out.gnx = truncate_component((2.0 * lg + 1.0) * dnx * c8, rule);
  out.gny = truncate_component(-(2.0 * lg + 1.0) * dny * c8, rule);
  out.gnxny =
      truncate_component(-(2.0 * dnx * dny / r2 + (2.0 * lg + 1.0) * dot(n_x, n_y)) * c8, rule);
  return out;
}

} // namespace bino
