#pragma once

namespace epi {

// Numerical tolerances shared by the validating constructors.
struct Tolerances {
  double orthogonality = 1e-10;
  double normalization = 1e-12;
  // Residual norm below which a Gram-Schmidt step counts as linearly dependent.
  double rank = 1e-8;
};

inline constexpr Tolerances kTolerances{};

}  // namespace epi
