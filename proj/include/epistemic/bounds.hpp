#pragma once

// Closed-form bounds on the overlap ratio k: noiseless, averaged and noisy.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace epi {

struct KBoundReport {
  std::size_t dim = 0;
  std::size_t subdim_used = 0;     // d', the largest prime power <= dim
  double exact_bound = 0.0;        // (1/d')(1 + sqrt(1 - 1/d'))
  double coarse_bound_subdim = 0.0;  // 2/d'
  double coarse_bound_dim = 0.0;     // 4/(dim - 1)
  std::optional<double> eps1;
  std::optional<double> eps2;
  std::optional<double> noise_adjusted;         // tight noisy form at d'
  std::optional<double> noise_adjusted_coarse;  // 2/d' + d'^2 (3 d' eps1 + 2 eps2)
  std::optional<bool> threshold_ok;             // noise_adjusted < 1
};

// Throws UnsupportedDimension for d < 4.
KBoundReport theorem2_bound(std::size_t d);
// Adds the noise-adjusted forms, evaluated at d'.
KBoundReport theorem2_bound(std::size_t d, double eps1, double eps2);

// exact_bound for each entry, in input order.
std::vector<KBoundReport> asymptotic_check(std::span<const std::size_t> dims);

struct NoisyBound {
  double tight = 0.0;   // (1/d)(1 + d^2 (d-1)(1.5 d eps1 + eps2))(1 + sqrt(1 - 1/d))
  double coarse = 0.0;  // 2/d + d^2 (3 d eps1 + 2 eps2)
};

// d must be a prime power >= 4; eps1, eps2 >= 0.
NoisyBound noisy_bound(std::size_t d, double eps1, double eps2);

// Largest eps = eps1 = eps2 with 3 d eps1 + 2 eps2 < (2/(d-1))(1 - sqrt(1-1/d) - 1/d^2).
double noise_threshold(std::size_t d);

struct AveragedBound {
  double average = 0.0;
  double bound = 0.0;      // 4/(d-1)
  bool satisfied = false;  // average < bound
  bool binding = false;    // bound < 1, i.e. the comparison says something
};

// Mean of the d^2 values k(c, e^alpha_i) compared against 4/(d-1).
AveragedBound averaged_k_bound(std::span<const double> k_values, std::size_t d);

}  // namespace epi
