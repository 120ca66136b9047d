#include "bino/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace bino {

std::string to_string(CurveFamily f) {
  switch (f) {
    case CurveFamily::kLaplaceStar: return "laplace-star";
    case CurveFamily::kBiharmonicStar: return "biharmonic-star";
    case CurveFamily::kUnitCircle: return "unit-circle";
  }
  return "?";
}

CurveFamily curve_family_from_string(const std::string& s) {
  if (s == "laplace-star") return CurveFamily::kLaplaceStar;
  if (s == "biharmonic-star") return CurveFamily::kBiharmonicStar;
  if (s == "unit-circle") return CurveFamily::kUnitCircle;
  throw std::invalid_argument("unknown curve family: " + s);
}

ParamCurve2D::ParamCurve2D(CurveFamily family, double c0, std::vector<double> sin_c,
                           std::vector<double> sin_t, std::vector<double> cos_c,
                           std::vector<double> cos_t, double t_min, double t_max)
    : family_(family),
      c0_(c0),
      sin_c_(std::move(sin_c)),
      sin_t_(std::move(sin_t)),
      cos_c_(std::move(cos_c)),
      cos_t_(std::move(cos_t)),
      t_min_(t_min),
      t_max_(t_max) {
  const size_t n = std::max(std::max(sin_c_.size(), sin_t_.size()),
                            std::max(cos_c_.size(), cos_t_.size()));
  sin_c_.resize(n, 0.0);
  sin_t_.resize(n, 0.0);
  cos_c_.resize(n, 0.0);
  cos_t_.resize(n, 0.0);

  // Positivity of r over the admissible range, on a dense grid.
  const int nt = 33, na = 1024;
  for (int it = 0; it < nt; ++it) {
    const double t = t_min_ + (t_max_ - t_min_) * it / (nt - 1);
    for (int ia = 0; ia < na; ++ia) {
      const double alpha = 2.0 * kPi * ia / na;
      if (radius(alpha, t) <= 0.0)
        throw std::runtime_error("ParamCurve2D: nonpositive radius at t=" + std::to_string(t));
    }
  }
}

ParamCurve2D ParamCurve2D::laplace_star() {
  // r = 1 + 0.2 (sin 3a + t sin 4a + sin 6a + cos 2a + cos 5a), t in [1, 2]
  std::vector<double> sc(6, 0.0), st(6, 0.0), cc(6, 0.0), ct(6, 0.0);
  sc[2] = 0.2; // sin 3a
  st[3] = 0.2; // t sin 4a
  sc[5] = 0.2; // sin 6a
  cc[1] = 0.2; // cos 2a
  cc[4] = 0.2; // cos 5a
  return {CurveFamily::kLaplaceStar, 1.0, sc, st, cc, ct, 1.0, 2.0};
}

ParamCurve2D ParamCurve2D::biharmonic_star() {
  // r = 1 + 0.1 (sin a + t cos 2a + sin 3a + cos 4a), t in [1, 2]
  std::vector<double> sc(4, 0.0), st(4, 0.0), cc(4, 0.0), ct(4, 0.0);
  sc[0] = 0.1; // sin a
  ct[1] = 0.1; // t cos 2a
  sc[2] = 0.1; // sin 3a
  cc[3] = 0.1; // cos 4a
  return {CurveFamily::kBiharmonicStar, 1.0, sc, st, cc, ct, 1.0, 2.0};
}

ParamCurve2D ParamCurve2D::unit_circle() {
  return {CurveFamily::kUnitCircle, 1.0, {}, {}, {}, {}, 0.0, 10.0};
}

ParamCurve2D ParamCurve2D::from_family(CurveFamily family) {
  // The positivity scan at construction is not free; hand out copies of
  // validated instances.
  static const ParamCurve2D laplace = laplace_star();
  static const ParamCurve2D biharmonic = biharmonic_star();
  static const ParamCurve2D circle = unit_circle();
  switch (family) {
    case CurveFamily::kLaplaceStar: return laplace;
    case CurveFamily::kBiharmonicStar: return biharmonic;
    case CurveFamily::kUnitCircle: return circle;
  }
  throw std::invalid_argument("bad curve family");
}

double ParamCurve2D::radius(double alpha, double t) const {
  double r = c0_;
  for (size_t m = 0; m < sin_c_.size(); ++m) {
    const double k = static_cast<double>(m + 1);
    r += (sin_c_[m] + t * sin_t_[m]) * std::sin(k * alpha);
    r += (cos_c_[m] + t * cos_t_[m]) * std::cos(k * alpha);
  }
  return r;
}

double ParamCurve2D::radius_derivative(double alpha, double t) const {
  double dr = 0;
  for (size_t m = 0; m < sin_c_.size(); ++m) {
    const double k = static_cast<double>(m + 1);
    dr += k * (sin_c_[m] + t * sin_t_[m]) * std::cos(k * alpha);
    dr -= k * (cos_c_[m] + t * cos_t_[m]) * std::sin(k * alpha);
  }
  return dr;
}

void ParamCurve2D::check_admissible(double t) const {
  if (!(t >= t_min_ && t <= t_max_))
    throw std::domain_error("geometry parameter t=" + std::to_string(t) +
                            " outside admissible range [" + std::to_string(t_min_) +
                            ", " + std::to_string(t_max_) + "]");
}

CurvePoint curve_point(const ParamCurve2D& curve, double alpha, double t) {
  curve.check_admissible(t);
  const double r = curve.radius(alpha, t);
  if (r <= 0.0) throw std::runtime_error("curve_point: nonpositive radius");
  const double dr = curve.radius_derivative(alpha, t);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double xp = dr * ca - r * sa; // d/dalpha of r cos(alpha)
  const double yp = dr * sa + r * ca;
  const double jac = std::sqrt(xp * xp + yp * yp);
  CurvePoint out;
  out.point = {r * ca, r * sa};
  out.normal = {yp / jac, -xp / jac};
  out.jacobian = jac;
  return out;
}

BoundarySample sample_curve(const ParamCurve2D& curve, double t, int m, RngStream& rng) {
  if (m < 1) throw std::invalid_argument("sample_curve: M must be >= 1");
  BoundarySample s;
  s.points.resize(m, 2);
  s.normals.resize(m, 2);
  s.jacobians.resize(m);
  s.params.resize(m, 1);
  s.domain_measure = 2.0 * kPi;
  for (int k = 0; k < m; ++k) {
    const double alpha = rng.uniform(0.0, 2.0 * kPi);
    const CurvePoint cp = curve_point(curve, alpha, t);
    s.points(k, 0) = cp.point.x;
    s.points(k, 1) = cp.point.y;
    s.normals(k, 0) = cp.normal.x;
    s.normals(k, 1) = cp.normal.y;
    s.jacobians[k] = cp.jacobian;
    s.params(k, 0) = alpha;
  }
  return s;
}

TwinHemispheres3D::TwinHemispheres3D(double separation) : t(separation) {
  if (!(t >= kTMin && t <= kTMax))
    throw std::domain_error("TwinHemispheres3D: t outside [0, 0.5]");
}

BoundarySample sample_hemispheres(double t, int m, RngStream& rng) {
  TwinHemispheres3D geom(t); // validates t
  if (m < 2 || m % 2 != 0)
    throw std::invalid_argument("sample_hemispheres: M must be even and >= 2");
  BoundarySample s;
  s.points.resize(m, 3);
  s.normals.resize(m, 3);
  s.jacobians.resize(m);
  s.params.resize(m, 2);
  s.domain_measure = 2.0 * kPi * kPi; // two (pi/2) x (2pi) parameter rectangles
  const int half = m / 2;
  for (int k = 0; k < m; ++k) {
    const bool upper = k < half;
    const double theta = upper ? rng.uniform(0.0, kPi / 2.0) : rng.uniform(kPi / 2.0, kPi);
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    const double cz = upper ? geom.t : -geom.t;
    const double st_ = std::sin(theta), ct_ = std::cos(theta);
    const double nx = st_ * std::cos(phi), ny = st_ * std::sin(phi), nz = ct_;
    s.points(k, 0) = nx;
    s.points(k, 1) = ny;
    s.points(k, 2) = cz + nz;
    s.normals(k, 0) = nx;
    s.normals(k, 1) = ny;
    s.normals(k, 2) = nz;
    s.jacobians[k] = st_;
    s.params(k, 0) = theta;
    s.params(k, 1) = phi;
  }
  return s;
}

void BoundarySample::validate() const {
  const int m = points.rows;
  if (normals.rows != m || static_cast<int>(jacobians.size()) != m || params.rows != m)
    throw std::runtime_error("BoundarySample: count mismatch");
  if (normals.cols != points.cols) throw std::runtime_error("BoundarySample: dim mismatch");
  for (int k = 0; k < m; ++k) {
    double n2 = 0;
    for (int d = 0; d < normals.cols; ++d) n2 += normals(k, d) * normals(k, d);
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-12)
      throw std::runtime_error("BoundarySample: non-unit normal");
    if (!(jacobians[k] > 0.0)) throw std::runtime_error("BoundarySample: nonpositive jacobian");
  }
  if (!(domain_measure > 0.0)) throw std::runtime_error("BoundarySample: bad domain measure");
}

} // namespace bino
