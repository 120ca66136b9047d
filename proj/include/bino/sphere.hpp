#pragma once

#include <complex>
#include <vector>

#include "bino/mat.hpp"

namespace bino {

/// Separation-of-variables solution for plane-wave scattering by the
/// sound-soft unit sphere (incident wave e^{ikz}):
///   u_s(r, theta)   = sum_n c_n h_n(kr) P_n(cos theta)
///   c_n             = -i^n (2n+1) j_n(k) / h_n(k)
///   u_inf(theta)    = (1/k) sum_n (-i)^{n+1} c_n P_n(cos theta).
/// Terms are kept until their relative size drops below the tolerance.
struct SphereSeries {
  double k = 0;
  int n_terms = 0;
  std::vector<std::complex<double>> coeff; // c_n

  static SphereSeries build(double k, double tol = 1e-12, int max_terms = 200);

  std::complex<double> far_field(double cos_theta) const;
  std::complex<double> scattered(double r, double cos_theta) const;
};

/// Far field on unit directions [n x 3]; output [n x 2] (re, im).
/// Throws if the series has not converged at the requested order.
Mat sphere_far_field(double k, const Mat& directions);

/// Max |u_inc + u_s| over n random points of the unit sphere; the sound-soft
/// boundary condition makes this zero up to series truncation.
double sphere_near_field_residual(const SphereSeries& series, int n_probe, uint64_t seed);

/// Coarse dense collocation on the sphere, reduced to an axisymmetric ring
/// system; the singular self-cell uses the equal-area-disk integral of the
/// kernel. Returns the far field on the given directions, [n x 2].
Mat sphere_collocation_far_field(double k, int n_theta, int n_phi, const Mat& directions);

} // namespace bino
