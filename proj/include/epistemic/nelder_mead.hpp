#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace epi {

struct NelderMeadOptions {
  double initial_step = 0.5;
  // Stop when the simplex's function values spread less than
  // f_abs_tol + f_rel_tol * |f_best| and its vertices lie within x_tol of the
  // best vertex (max-norm).
  double f_abs_tol = 1e-18;
  double f_rel_tol = 1e-13;
  double x_tol = 1e-10;
  std::size_t max_evaluations = 20000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;  // tolerance reached before the evaluation budget ran out
};

using Objective = std::function<double(std::span<const double>)>;

// Downhill simplex minimization with the standard coefficients
// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options = {});

}  // namespace epi
