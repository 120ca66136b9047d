#include "bino/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace bino {

std::string to_string(PdeKind k) {
  switch (k) {
    case PdeKind::kLaplace2D: return "laplace2d";
    case PdeKind::kBiharmonic2D: return "biharmonic2d";
    case PdeKind::kHelmholtz3D: return "helmholtz3d";
  }
  return "?";
}

PdeKind pde_from_string(const std::string& s) {
  if (s == "laplace2d") return PdeKind::kLaplace2D;
  if (s == "biharmonic2d") return PdeKind::kBiharmonic2D;
  if (s == "helmholtz3d") return PdeKind::kHelmholtz3D;
  throw std::invalid_argument("unknown pde: " + s);
}

void ProblemSpec::validate() const {
  if (!(trunc.beta > 0)) throw std::invalid_argument("truncation threshold must be > 0");
  if (!(t_min <= t_max)) throw std::invalid_argument("empty t range");
  if (pde == PdeKind::kHelmholtz3D) {
    if (!(wavenumber > 0)) throw std::invalid_argument("Helmholtz wavenumber must be > 0");
    if (t_min < TwinHemispheres3D::kTMin || t_max > TwinHemispheres3D::kTMax)
      throw std::invalid_argument("hemisphere separation range must lie in [0, 0.5]");
  } else {
    const ParamCurve2D curve = ParamCurve2D::from_family(curve_family);
    if (t_min < curve.t_min() || t_max > curve.t_max())
      throw std::invalid_argument("t range outside the curve's admissible range");
  }
}

BoundarySample ProblemSpec::sample_boundary(double t, int m, RngStream& rng) const {
  if (pde == PdeKind::kHelmholtz3D) return sample_hemispheres(t, m, rng);
  const ParamCurve2D curve = ParamCurve2D::from_family(curve_family);
  return sample_curve(curve, t, m, rng);
}

double laplace_u0(const Vec2& p) { return std::exp(p.x) * std::sin(p.y); }

double biharmonic_u0(const Vec2& p) {
  return (p.x * p.x + p.y * p.y) * std::exp(p.x) * std::sin(p.y);
}

double biharmonic_u0_dn(const Vec2& p, const Vec2& n) {
  const double ex = std::exp(p.x), sy = std::sin(p.y), cy = std::cos(p.y);
  const double r2 = p.x * p.x + p.y * p.y;
  const double ux = (2.0 * p.x + r2) * ex * sy;
  const double uy = 2.0 * p.y * ex * sy + r2 * ex * cy;
  return ux * n.x + uy * n.y;
}

KernelValue helmholtz_incident(const Vec3& p, double k) {
  return {std::cos(k * p.z), std::sin(k * p.z)};
}

KernelValue helmholtz_u0(const Vec3& p, double k) {
  const KernelValue ui = helmholtz_incident(p, k);
  return {-ui.re, -ui.im};
}

Mat interior_truth(const ProblemSpec& spec, const Mat& pts) {
  Mat out(pts.rows, 1);
  switch (spec.pde) {
    case PdeKind::kLaplace2D:
      for (int i = 0; i < pts.rows; ++i) out(i, 0) = laplace_u0({pts(i, 0), pts(i, 1)});
      return out;
    case PdeKind::kBiharmonic2D:
      for (int i = 0; i < pts.rows; ++i) out(i, 0) = biharmonic_u0({pts(i, 0), pts(i, 1)});
      return out;
    case PdeKind::kHelmholtz3D:
      throw std::invalid_argument("interior_truth: no closed-form Helmholtz field");
  }
  throw std::logic_error("interior_truth: bad pde");
}

void boundary_targets(const ProblemSpec& spec, const BoundarySample& s, Mat& out) {
  const int n = s.count();
  out.resize(n, spec.n_targets());
  switch (spec.pde) {
    case PdeKind::kLaplace2D:
      for (int i = 0; i < n; ++i) out(i, 0) = laplace_u0(s.point2(i));
      return;
    case PdeKind::kBiharmonic2D:
      for (int i = 0; i < n; ++i) {
        out(i, 0) = biharmonic_u0(s.point2(i));
        out(i, 1) = biharmonic_u0_dn(s.point2(i), s.normal2(i));
      }
      return;
    case PdeKind::kHelmholtz3D:
      for (int i = 0; i < n; ++i) {
        const KernelValue u0 = helmholtz_u0(s.point3(i), spec.wavenumber);
        out(i, 0) = u0.re;
        out(i, 1) = u0.im;
      }
      return;
  }
}

} // namespace bino
