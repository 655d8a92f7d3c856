#pragma once

// Pure states, orthonormal sets, projective measurements, discrete
// distributions, and the distance/overlap functionals between them.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "epistemic/config.hpp"
#include "epistemic/linalg.hpp"

namespace epi {

// Unit vector in C^dim, dim >= 2.
class PureState {
 public:
  // Validates the norm against kTolerances.normalization.
  explicit PureState(CVector amplitudes);

  // Rescales any nonzero vector to unit norm.
  static PureState normalized(CVector amplitudes);
  // |k> in C^dim.
  static PureState basis(std::size_t dim, std::size_t k);

  std::size_t dim() const { return amplitudes_.size(); }
  std::span<const cplx> amplitudes() const { return amplitudes_; }
  const CVector& vector() const { return amplitudes_; }
  cplx operator[](std::size_t i) const { return amplitudes_[i]; }

 private:
  CVector amplitudes_;
};

// Orthonormal set of k <= dim vectors of C^dim. A full basis when k == dim.
class OrthonormalBasis {
 public:
  explicit OrthonormalBasis(std::vector<PureState> vectors);
  // Orthonormalizes arbitrary independent vectors first (Gram-Schmidt).
  static OrthonormalBasis orthonormalize(std::span<const CVector> vectors);

  std::size_t dim() const { return vectors_.front().dim(); }
  std::size_t size() const { return vectors_.size(); }
  const PureState& operator[](std::size_t i) const { return vectors_[i]; }
  const std::vector<PureState>& vectors() const { return vectors_; }
  bool complete() const { return size() == dim(); }

 private:
  std::vector<PureState> vectors_;
};

// Projective measurement. Each outcome projects onto the span of an
// orthonormal set; distinct outcomes are mutually orthogonal.
class Measurement {
 public:
  struct Effect {
    std::string label;
    std::vector<CVector> span;  // orthonormal, may be empty (rank 0)
  };

  Measurement(std::size_t dim, std::vector<Effect> effects, bool complete);
  // Rank-1 outcomes labelled "0", "1", ... for each basis vector.
  static Measurement from_basis(const OrthonormalBasis& basis);

  std::size_t dim() const { return dim_; }
  std::size_t outcomes() const { return effects_.size(); }
  const Effect& effect(std::size_t k) const { return effects_[k]; }
  const std::vector<Effect>& effects() const { return effects_; }
  bool complete() const { return complete_; }
  std::size_t rank(std::size_t k) const { return effects_[k].span.size(); }

  double probability(std::size_t k, const PureState& psi) const;
  std::vector<double> probabilities(const PureState& psi) const;
  CMatrix projector(std::size_t k) const;

 private:
  std::size_t dim_;
  std::vector<Effect> effects_;
  bool complete_;
};

// Probability mass function on n points.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> weights);

  std::size_t size() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::vector<double> weights_;
};

double fidelity(const PureState& a, const PureState& b);
double born_probability(const PureState& f, const PureState& psi);
double quantum_trace_distance(const PureState& a, const PureState& b);
double quantum_overlap(const PureState& a, const PureState& b);
double helstrom_success(const PureState& a, const PureState& b);

double classical_trace_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);
double classical_overlap(const DiscreteDistribution& p, const DiscreteDistribution& q);

// Optimal two-outcome measurement for discriminating a from b: outcome 0
// ("guess a") is the positive eigenvector of |a><a| - |b><b|, outcome 1 the
// negative one; any orthogonal complement is merged into outcome 1 so the
// measurement stays complete. Requires a != b up to phase.
Measurement helstrom_measurement(const PureState& a, const PureState& b);

CMatrix gram_matrix(std::span<const PureState> states);

// Haar-distributed samples, deterministic per seed.
PureState random_state(std::size_t dim, std::uint64_t seed);
OrthonormalBasis random_unitary(std::size_t dim, std::uint64_t seed);
CMatrix random_unitary_matrix(std::size_t dim, std::uint64_t seed);

}  // namespace epi
