#pragma once

// PP-incompatibility of state triples and the numerical search for the
// measurement basis {f1, f2, f3} with <f1|a> = <f2|b> = <f3|c> = 0.

#include <cstdint>
#include <vector>

#include "epistemic/nelder_mead.hpp"
#include "epistemic/qstate.hpp"

namespace epi {

// Pairwise fidelities in cyclic order: x1 = |<a|b>|^2, x2 = |<b|c>|^2,
// x3 = |<c|a>|^2.
struct TripleOverlaps {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  double sum() const { return x1 + x2 + x3; }
};

// Throws DegenerateSpan if a, b, c do not span three dimensions.
TripleOverlaps triple_overlaps(const PureState& a, const PureState& b, const PureState& c);

// x1 + x2 + x3 < 1 and (x1 + x2 + x3 - 1)^2 >= 4 x1 x2 x3. `slack` relaxes the
// second (non-strict) condition to >= 4 x1 x2 x3 - slack, for overlaps
// computed from rounded amplitudes that sit exactly on the boundary.
bool pp_incompatible(const TripleOverlaps& x, double slack = 0.0);

// Slack applied when the predicate is evaluated on computed states.
inline constexpr double kPredicateSlack = 1e-12;
// Epsilon below which a triple counts as exactly PP-incompatible.
inline constexpr double kZeroEpsilon = 1e-8;

// (1/3) (P(f1|a) + P(f2|b) + P(f3|c)) for the first three vectors of `basis`.
double conjugate_epsilon(const PureState& a, const PureState& b, const PureState& c,
                         const OrthonormalBasis& basis);

struct ConjugateSearchOptions {
  std::size_t restarts = 64;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // Local searches per restart; each round re-centres the chart at the
  // previous optimum.
  int max_rounds = 6;
  NelderMeadOptions local{};
};

struct ConjugateBasisResult {
  OrthonormalBasis basis;    // f1, f2, f3 inside span{a, b, c}
  double epsilon = 0.0;      // best value over all restarts
  double triple_sum = 0.0;   // 3 * epsilon
  bool converged = false;
  std::size_t restarts_used = 0;
  // Restarts whose final value agrees with the best within 1e-9 + 1e-6 * best.
  std::size_t agreeing_restarts = 0;
  bool pp_incompatible = false;  // predicate on triple_overlaps (with kPredicateSlack)
  std::vector<double> restart_values;
};

// Multi-start minimization of conjugate_epsilon over orthonormal bases of
// span{a, b, c}. Each restart starts from a Haar-random frame drawn from
// stream (seed, restart) and runs Nelder-Mead over the 6-parameter chart
// U0 exp(iH), H Hermitian with zero diagonal (per-vector phases do not affect
// epsilon). converged is false when a PP-incompatible triple misses
// kZeroEpsilon, when the best local search ran out of budget, or when more
// than one restart was requested and no second restart reproduced the best
// value.
ConjugateBasisResult find_conjugate_basis(const PureState& a, const PureState& b,
                                          const PureState& c,
                                          const ConjugateSearchOptions& options = {});

// Outcomes "f1", "f2", "f3" (rank 1) and, for d > 3, "f4" projecting onto the
// orthogonal complement of span{a, b, c}.
Measurement full_measurement(const ConjugateBasisResult& result, std::size_t d);

}  // namespace epi
