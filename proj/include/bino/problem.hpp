#pragma once

#include <string>

#include "bino/geometry.hpp"
#include "bino/kernels.hpp"

namespace bino {

enum class PdeKind { kLaplace2D, kBiharmonic2D, kHelmholtz3D };

std::string to_string(PdeKind k);
PdeKind pde_from_string(const std::string& s);

/// Which boundary-value problem is being solved: the PDE, the geometry
/// family with its parameter range, the boundary data, and (for Helmholtz)
/// the wavenumber. Boundary data is built in per problem:
///   Laplace     u0 = e^x sin y
///   Biharmonic  u0 = (x^2 + y^2) e^x sin y, plus its normal derivative
///   Helmholtz   u0 = -u_inc (sound-soft), u_inc = e^{ikz}
struct ProblemSpec {
  PdeKind pde = PdeKind::kLaplace2D;
  CurveFamily curve_family = CurveFamily::kLaplaceStar; // 2D problems
  double t_min = 1.0, t_max = 2.0;
  double wavenumber = 2.0 * kPi; // Helmholtz only
  TruncationRule trunc;

  int coord_dim() const { return pde == PdeKind::kHelmholtz3D ? 3 : 2; }
  /// Channels of the learned boundary potential: 1 for Laplace, 2 for the
  /// biharmonic pair (v, dv/dn) and for the complex Helmholtz density.
  int n_out() const { return pde == PdeKind::kLaplace2D ? 1 : 2; }
  /// Boundary-condition channels entering the loss (Dirichlet only, complex
  /// pair, or Dirichlet + Neumann).
  int n_targets() const { return pde == PdeKind::kLaplace2D ? 1 : 2; }

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;

  /// Sample the problem's boundary at parameter t.
  BoundarySample sample_boundary(double t, int m, RngStream& rng) const;
};

// Boundary data / manufactured solutions.
double laplace_u0(const Vec2& p);                          // e^x sin y
double biharmonic_u0(const Vec2& p);                       // (x^2+y^2) e^x sin y
double biharmonic_u0_dn(const Vec2& p, const Vec2& n);     // normal derivative
KernelValue helmholtz_incident(const Vec3& p, double k);   // e^{ikz}
KernelValue helmholtz_u0(const Vec3& p, double k);         // -e^{ikz}

/// Targets at one boundary point (n_targets columns).
void boundary_targets(const ProblemSpec& spec, const BoundarySample& s, Mat& out);

/// Analytic interior solution at the given points (the manufactured data
/// extends harmonically/biharmonically into the domain). Helmholtz has no
/// closed-form field and throws.
Mat interior_truth(const ProblemSpec& spec, const Mat& pts);

} // namespace bino
