#pragma once

// The d = 3 certificate: three fixed mutually unbiased bases, a fixed state
// |c>, per-triple conjugate-basis optimization and the resulting bound
//   k <= (1 + sum_triples 3 eps) / sum_{alpha,i} omega_Q(e^alpha_i, c).

#include <array>
#include <cstdint>
#include <vector>

#include "epistemic/qstate.hpp"
#include "epistemic/triples.hpp"

namespace epi {

struct D3Instance {
  std::array<OrthonormalBasis, 3> bases;  // e^1, e^2, e^3
  PureState c;
  double c_literal_norm = 1.0;  // norm of the 3-decimal literal before rescaling
};

// The reference bases (omega = exp(2 pi i / 3)) and the reference |c>,
// renormalized.
D3Instance canonical_states();

struct EpsilonValue {
  double epsilon = 0.0;     // (1/3)(P(f1|e^a_i) + P(f2|e^b_j) + P(f3|c))
  double triple_sum = 0.0;  // 3 * epsilon
};

// Evaluates a given basis on the triple (e^alpha_i, e^beta_j, c). Throws
// InvalidArgument unless `basis` is a full orthonormal basis of C^3.
EpsilonValue quantum_epsilon(const PureState& e_alpha_i, const PureState& e_beta_j,
                             const PureState& c, const OrthonormalBasis& basis);

struct TripleEntry {
  int alpha = 0;  // 1-based basis labels, alpha < beta
  int beta = 0;
  int i = 0;  // 1-based vector labels
  int j = 0;
  ConjugateBasisResult result;
};

struct CertificateReport {
  std::vector<TripleEntry> entries;      // ordered by (alpha, beta, i, j)
  std::array<double, 3> family_sums{};   // sum of triple_sum for (1,2), (1,3), (2,3)
  double grand_noise_sum = 0.0;          // 3 * sum of all epsilons
  double overlap_weight_sum = 0.0;       // sum_{alpha,i} omega_Q(e^alpha_i, c)
  double k_bound = 0.0;
  bool all_converged = false;
  std::size_t restarts = 0;
  std::uint64_t seed = 0;
};

// 27 independent optimizations; triple t uses seed stream (seed, t).
CertificateReport optimize_all_triples(const D3Instance& instance, std::size_t restarts,
                                       std::uint64_t seed, unsigned threads = 1);

double overlap_weight_sum(const D3Instance& instance);

// (1 + grand_noise_sum) / overlap_weight_sum. Throws Precondition when a
// triple did not converge and InvalidArgument for a zero or non-finite
// denominator.
double certify_k(const CertificateReport& report);
double certify_k(double grand_noise_sum, double overlap_weight_sum);

}  // namespace epi
