#pragma once

#include "bino/bie.hpp"
#include "bino/problem.hpp"

namespace bino {

/// Dense collocation solve of the first-kind boundary integral equation on a
/// parametric curve, with equispaced parameter nodes and trapezoid weights.
/// Diagonal (singular) entries integrate the log factor analytically over a
/// straight panel of arclength h*J_i. Laplace solves for one density rho
/// with u = S[rho]; the biharmonic problem solves the 2x2 block system for
/// (w, v) with u = -(S[w] + D[v]) and its normal-derivative condition.
struct NystromSystem {
  PdeKind pde = PdeKind::kLaplace2D;
  int n = 0;
  BoundarySample nodes;   // equispaced nodes with exact normals/jacobians
  Mat density;            // [n x 1] rho, or [n x 2] = (v, w) matching the net layout
  double solve_residual = 0; // ||A rho - b|| / ||b||
  double condition = 0;      // sigma_max / sigma_min of the collocation matrix
};

/// Solve at parameter t with n nodes (n >= 64). Throws std::invalid_argument
/// on bad arguments and std::runtime_error (with the condition estimate) if
/// the solve residual is not small.
NystromSystem nystrom_solve(const ProblemSpec& spec, double t, int n);

/// Reconstruct the represented field at arbitrary points from the solved
/// densities (deterministic trapezoid quadrature, no Monte Carlo).
Mat nystrom_field(const ProblemSpec& spec, const NystromSystem& sys, const Mat& pts);

/// Periodic-linear interpolation of the solved density in the curve
/// parameter, times the local jacobian: a drop-in "model" for the
/// Monte-Carlo loss and the representation formulas.
PotentialFn nystrom_potential_fn(const ProblemSpec& spec, const NystromSystem& sys);

/// Finite-difference verification of the built-in manufactured solutions:
/// e^x sin y is harmonic and (x^2+y^2) e^x sin y is biharmonic.
struct ManufacturedReport {
  double max_laplacian = 0;    // of e^x sin y, 5-point stencil
  double quadratic_laplacian = 0; // of x^2+y^2 (positive control, exactly 4)
  double max_bilaplacian = 0;  // of (x^2+y^2) e^x sin y, 13-point stencil
  bool pass = false;
};
ManufacturedReport check_manufactured();

} // namespace bino
