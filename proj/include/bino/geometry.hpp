#pragma once

#include <string>
#include <vector>

#include "bino/kernels.hpp"
#include "bino/mat.hpp"
#include "bino/rng.hpp"

namespace bino {

enum class CurveFamily { kLaplaceStar, kBiharmonicStar, kUnitCircle };

std::string to_string(CurveFamily f);
CurveFamily curve_family_from_string(const std::string& s);

/// Point/normal/arclength-jacobian of a parametric curve at one angle.
struct CurvePoint {
  Vec2 point;
  Vec2 normal;
  double jacobian = 0;
};

/// Closed curve given in polar form
///   r(alpha; t) = c0 + sum_m (sin_c[m] + t sin_t[m]) sin(m alpha)
///               +        (cos_c[m] + t cos_t[m]) cos(m alpha),
/// alpha in [0, 2pi). Positivity of r over the admissible t range is
/// checked on a dense grid at construction.
class ParamCurve2D {
 public:
  ParamCurve2D(CurveFamily family, double c0, std::vector<double> sin_c,
               std::vector<double> sin_t, std::vector<double> cos_c,
               std::vector<double> cos_t, double t_min, double t_max);

  static ParamCurve2D laplace_star();
  static ParamCurve2D biharmonic_star();
  static ParamCurve2D unit_circle();
  static ParamCurve2D from_family(CurveFamily family);

  CurveFamily family() const { return family_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }

  double radius(double alpha, double t) const;
  double radius_derivative(double alpha, double t) const; // d r / d alpha

  int dim() const { return 2; }

 private:
  CurveFamily family_;
  double c0_;
  std::vector<double> sin_c_, sin_t_, cos_c_, cos_t_;
  double t_min_, t_max_;

  void check_admissible(double t) const;
  friend CurvePoint curve_point(const ParamCurve2D&, double, double);
};

/// Two open half-sphere surfaces of radius 1 centered at (0, 0, +-t).
/// At t = 0 their union is the unit sphere.
struct TwinHemispheres3D {
  double t = 0;
  static constexpr double kTMin = 0.0;
  static constexpr double kTMax = 0.5;
  explicit TwinHemispheres3D(double separation);
};

/// Monte-Carlo quadrature sample of a boundary: points and outward unit
/// normals (M x d), parameter-to-surface jacobians (M), the parameter
/// values each point came from, and the total parameter-domain measure.
/// Integrals are estimated as (domain_measure / M) * sum_k f_k * jac_k.
struct BoundarySample {
  Mat points;
  Mat normals;
  std::vector<double> jacobians;
  Mat params;
  double domain_measure = 0;

  int count() const { return points.rows; }
  int dim() const { return points.cols; }
  Vec2 point2(int k) const { return {points(k, 0), points(k, 1)}; }
  Vec3 point3(int k) const { return {points(k, 0), points(k, 1), points(k, 2)}; }
  Vec2 normal2(int k) const { return {normals(k, 0), normals(k, 1)}; }
  Vec3 normal3(int k) const { return {normals(k, 0), normals(k, 1), normals(k, 2)}; }

  /// Throws if any structural invariant fails (unit normals, positive
  /// jacobians, matching counts).
  void validate() const;
};

/// Evaluate the curve map at one parameter value. The outward normal is the
/// unit tangent rotated by -90 degrees: (y', -x') / J.
CurvePoint curve_point(const ParamCurve2D& curve, double alpha, double t);

/// M i.i.d. uniform draws of alpha in [0, 2pi) mapped through curve_point;
/// domain_measure = 2pi.
BoundarySample sample_curve(const ParamCurve2D& curve, double t, int m, RngStream& rng);

/// M/2 points on each open hemisphere, (theta, phi) uniform on the parameter
/// rectangles, area jacobian sin(theta); domain_measure = 2 pi^2. M must be
/// even.
BoundarySample sample_hemispheres(double t, int m, RngStream& rng);

} // namespace bino
