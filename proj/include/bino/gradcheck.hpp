#pragma once

#include <string>
#include <vector>

#include "bino/problem.hpp"

namespace bino {

/// Central-finite-difference verification of the reverse-mode gradient of
/// the full composed Monte-Carlo loss on a width-10 model with 5 quadrature
/// points. The error metric is max_i |g_ad,i - g_fd,i| / ||g_fd||_inf.
struct GradCheckReport {
  PdeKind pde;
  double max_rel_error = 0;
  double grad_inf_norm = 0;
  long n_params = 0;
  bool pass = false;
};

GradCheckReport gradcheck_problem(PdeKind pde, bool corrupt_adjoint = false);

/// Runs all three problem variants; pass means every variant is below 1e-6.
std::vector<GradCheckReport> run_gradcheck(bool corrupt_adjoint = false);

} // namespace bino
