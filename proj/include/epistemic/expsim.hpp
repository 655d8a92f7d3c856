#pragma once

// Finite-sample simulation of the noisy measurement protocol: every
// preparation of the design is measured in the conjugate basis of each
// triple it belongs to and in its own basis, outcome frequencies are
// recorded, and the noise terms and the resulting bound on k are estimated
// from them.

#include <cstdint>
#include <string>
#include <vector>

#include "epistemic/qstate.hpp"
#include "epistemic/triples.hpp"

namespace epi {

struct NoiseConfig {
  enum class Channel { None, Depolarizing, Misalignment };

  Channel channel = Channel::None;
  double parameter = 0.0;  // p for depolarizing, sigma (radians) for misalignment
  std::uint64_t shots = 1000;
  std::uint64_t seed = 1;
};

// Throws InvalidArgument unless p in [0, 1], sigma >= 0 and shots >= 1.
void validate(const NoiseConfig& noise);

// "none", "depolarizing:p" or "misalignment:sigma". Throws Parse.
NoiseConfig::Channel parse_channel(const std::string& spec, double& parameter);
std::string channel_name(NoiseConfig::Channel channel);

struct DesignTriple {
  int alpha = 0;  // 1-based basis labels, alpha < beta
  int beta = 0;
  int i = 0;  // 1-based vector labels
  int j = 0;
  Measurement measurement;  // f1, f2, f3 and, for dim > 3, f4
  double born_epsilon = 0.0;
  bool converged = false;
};

// Fixed state c, families e^1 .. e^m of orthonormal bases and one conjugate
// measurement per triple (c, e^alpha_i, e^beta_j) with alpha < beta.
struct ExperimentDesign {
  std::size_t dim = 0;
  PureState c = PureState::basis(2, 0);
  std::vector<OrthonormalBasis> families;
  std::vector<DesignTriple> triples;  // ordered by (alpha, beta, i, j)
  double overlap_weight_sum = 0.0;    // sum_{alpha,i} omega_Q(c, e^alpha_i)
  bool all_converged = false;
};

struct DesignOptions {
  std::size_t restarts = 32;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

// dim >= 4 a supported MUB dimension: c is the first vector of the standard
// basis and the families are the remaining dim bases. dim = 3 uses the fixed
// d = 3 certificate instance. Triple t searches with seed stream (seed, t).
ExperimentDesign build_design(std::size_t dim, const DesignOptions& options = {});

// Counts for one (preparation, measurement) setting.
struct SettingCounts {
  std::string preparation;
  std::string measurement;
  std::vector<std::string> outcomes;
  std::vector<std::uint64_t> counts;
  std::uint64_t shots = 0;
  // Born probability of f4 for the prepared state, removed before sampling.
  double f4_mass = 0.0;

  double frequency(std::size_t k) const;
};

// Settings in design order: for each triple, the preparations e^alpha_i, e^beta_j
// and c measured in its conjugate basis; then, for each family alpha and
// vector i, e^alpha_i measured in family alpha.
struct FrequencyTable {
  std::size_t dim = 0;
  std::uint64_t shots = 0;
  std::vector<SettingCounts> settings;
};

// Throws Precondition when some conjugate basis did not converge.
FrequencyTable run_experiment(const ExperimentDesign& design, const NoiseConfig& noise,
                              unsigned threads = 1);

struct TripleNoise {
  int alpha = 0;
  int beta = 0;
  int i = 0;
  int j = 0;
  double epsilon = 0.0;  // (1/3)(R[f1|e^alpha_i] + R[f2|e^beta_j] + R[f3|c])
};

struct PairNoise {
  int alpha = 0;
  int i = 0;  // i < j
  int j = 0;
  double epsilon = 0.0;  // (1/2)(R[e^alpha_j|e^alpha_i] + R[e^alpha_i|e^alpha_j])
};

struct NoiseSummary {
  std::size_t dim = 0;
  std::vector<TripleNoise> triples;
  std::vector<PairNoise> pairs;
  double eps1 = 0.0;  // mean over triples
  double eps2 = 0.0;  // mean over pairs
  double overlap_weight_sum = 0.0;
  double max_f4_mass = 0.0;
};

// Throws Precondition when the table does not match the design setting by
// setting.
NoiseSummary aggregate_eps(const FrequencyTable& table, const ExperimentDesign& design);

// (1 + 3 sum eps_triple + 2 sum eps_pair) / overlap_weight_sum. For the MUB
// designs this is the tight noisy bound at (eps1, eps2).
double experimental_k_bound(const NoiseSummary& summary);

}  // namespace epi
