#include "epistemic/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "epistemic/error.hpp"
#include "epistemic/rng.hpp"

namespace epi {

namespace {

void require_same_dim(std::size_t a, std::size_t b) {
  require(a == b, ErrorCode::DimensionMismatch,
          "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

PureState::PureState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  require(amplitudes_.size() >= 2, ErrorCode::InvalidArgument,
          "pure state needs dimension >= 2");
  const double n2 = std::pow(norm(amplitudes_), 2);
  require(std::abs(n2 - 1.0) <= kTolerances.normalization, ErrorCode::InvalidArgument,
          "pure state is not normalized (|psi|^2 = " + std::to_string(n2) + ")");
}

PureState PureState::normalized(CVector amplitudes) {
  const double len = norm(amplitudes);
  require(len > 0.0 && std::isfinite(len), ErrorCode::InvalidArgument,
          "cannot normalize a zero or non-finite vector");
  for (auto& z : amplitudes) z /= len;
  return PureState(std::move(amplitudes));
}

PureState PureState::basis(std::size_t dim, std::size_t k) {
  require(k < dim, ErrorCode::InvalidArgument, "basis index out of range");
  CVector v(dim);
  v[k] = 1.0;
  return PureState(std::move(v));
}

OrthonormalBasis::OrthonormalBasis(std::vector<PureState> vectors)
    : vectors_(std::move(vectors)) {
  require(!vectors_.empty(), ErrorCode::InvalidArgument, "empty basis");
  const std::size_t d = vectors_.front().dim();
  require(vectors_.size() <= d, ErrorCode::InvalidArgument,
          "more basis vectors than the dimension");
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    require_same_dim(vectors_[i].dim(), d);
    for (std::size_t j = 0; j < i; ++j)
      require(std::abs(inner(vectors_[i].amplitudes(), vectors_[j].amplitudes())) <
                  kTolerances.orthogonality,
              ErrorCode::InvalidArgument,
              "basis vectors " + std::to_string(j) + " and " + std::to_string(i) +
                  " are not orthogonal");
  }
}

OrthonormalBasis OrthonormalBasis::orthonormalize(std::span<const CVector> vectors) {
  auto q = gram_schmidt(vectors, kTolerances.rank);
  require(q.has_value(), ErrorCode::DegenerateSpan, "vectors are linearly dependent");
  std::vector<PureState> states;
  for (auto& v : *q) states.emplace_back(std::move(v));
  return OrthonormalBasis(std::move(states));
}

Measurement::Measurement(std::size_t dim, std::vector<Effect> effects, bool complete)
    : dim_(dim), effects_(std::move(effects)), complete_(complete) {
  require(!effects_.empty(), ErrorCode::InvalidArgument, "measurement without outcomes");
  std::vector<const CVector*> all;
  for (const auto& e : effects_)
    for (const auto& v : e.span) {
      require_same_dim(v.size(), dim_);
      require(std::abs(norm(v) - 1.0) < kTolerances.orthogonality,
              ErrorCode::InvalidArgument, "effect vector of outcome '" + e.label +
                                              "' is not normalized");
      all.push_back(&v);
    }
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      require(std::abs(inner(*all[i], *all[j])) < kTolerances.orthogonality,
              ErrorCode::InvalidArgument, "measurement projectors are not orthogonal");
  if (complete_)
    require(all.size() == dim_, ErrorCode::InvalidArgument,
            "measurement marked complete but projector ranks sum to " +
                std::to_string(all.size()) + " != " + std::to_string(dim_));
}

Measurement Measurement::from_basis(const OrthonormalBasis& basis) {
  std::vector<Effect> effects;
  for (std::size_t k = 0; k < basis.size(); ++k)
    effects.push_back({std::to_string(k), {basis[k].vector()}});
  return Measurement(basis.dim(), std::move(effects), basis.complete());
}

double Measurement::probability(std::size_t k, const PureState& psi) const {
  require_same_dim(psi.dim(), dim_);
  double p = 0.0;
  for (const auto& v : effects_.at(k).span) p += std::norm(inner(v, psi.amplitudes()));
  return p;
}

std::vector<double> Measurement::probabilities(const PureState& psi) const {
  std::vector<double> out(effects_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = probability(k, psi);
  return out;
}

CMatrix Measurement::projector(std::size_t k) const {
  CMatrix p(dim_, dim_);
  for (const auto& v : effects_.at(k).span)
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) p(i, j) += v[i] * std::conj(v[j]);
  return p;
}

DiscreteDistribution::DiscreteDistribution(std::vector<double> weights)
    : weights_(std::move(weights)) {
  require(!weights_.empty(), ErrorCode::InvalidArgument, "empty distribution");
  double total = 0.0;
  for (double w : weights_) {
    require(w >= 0.0 && std::isfinite(w), ErrorCode::InvalidArgument,
            "distribution weights must be finite and non-negative");
    total += w;
  }
  require(std::abs(total - 1.0) <= kTolerances.normalization, ErrorCode::InvalidArgument,
          "distribution weights sum to " + std::to_string(total));
}

double fidelity(const PureState& a, const PureState& b) {
  require_same_dim(a.dim(), b.dim());
  return std::min(1.0, std::norm(inner(a.amplitudes(), b.amplitudes())));
}

double born_probability(const PureState& f, const PureState& psi) { return fidelity(f, psi); }

double quantum_trace_distance(const PureState& a, const PureState& b) {
  return std::sqrt(1.0 - fidelity(a, b));
}

double quantum_overlap(const PureState& a, const PureState& b) {
  return 1.0 - quantum_trace_distance(a, b);
}

double helstrom_success(const PureState& a, const PureState& b) {
  return 0.5 * (1.0 + quantum_trace_distance(a, b));
}

double classical_trace_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require(p.size() == q.size(), ErrorCode::DimensionMismatch,
          "distributions have different support sizes");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

double classical_overlap(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require(p.size() == q.size(), ErrorCode::DimensionMismatch,
          "distributions have different support sizes");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::min(p[i], q[i]);
  return acc;
}

Measurement helstrom_measurement(const PureState& a, const PureState& b) {
  require_same_dim(a.dim(), b.dim());
  const std::size_t d = a.dim();
  CVector u0 = a.vector();
  CVector u1 = b.vector();
  const cplx ab = inner(u0, u1);
  for (std::size_t i = 0; i < d; ++i) u1[i] -= ab * u0[i];
  const double len = norm(u1);
  require(len > kTolerances.rank, ErrorCode::DegenerateSpan,
          "Helstrom measurement needs two distinct states");
  for (auto& z : u1) z /= len;

  // |a><a| - |b><b| in the (u0, u1) frame; b = <a|b> u0 + len u1.
  CMatrix delta(2, 2);
  const cplx b0 = ab;
  const cplx b1 = len;
  delta(0, 0) = 1.0 - std::norm(b0);
  delta(0, 1) = -b0 * std::conj(b1);
  delta(1, 0) = std::conj(delta(0, 1));
  delta(1, 1) = -std::norm(b1);
  std::vector<double> values;
  CMatrix vecs;
  eigh(delta, values, vecs);

  auto lift = [&](std::size_t k) {
    CVector v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = vecs(0, k) * u0[i] + vecs(1, k) * u1[i];
    return v;
  };
  std::vector<CVector> guess_a{lift(1)};
  std::vector<CVector> guess_b{lift(0)};
  for (auto& v : orthonormal_complement(std::vector<CVector>{guess_a[0], guess_b[0]}, d))
    guess_b.push_back(std::move(v));
  return Measurement(d, {{"guess_a", guess_a}, {"guess_b", guess_b}}, true);
}

CMatrix gram_matrix(std::span<const PureState> states) {
  CMatrix g(states.size(), states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = 0; j < states.size(); ++j) {
      require_same_dim(states[i].dim(), states[j].dim());
      g(i, j) = inner(states[i].amplitudes(), states[j].amplitudes());
    }
  return g;
}

PureState random_state(std::size_t dim, std::uint64_t seed) {
  require(dim >= 2, ErrorCode::InvalidArgument, "random_state needs dim >= 2");
  Rng rng = make_stream(sub_seed(seed, StreamTag::State), 0);
  std::normal_distribution<double> gauss;
  CVector v(dim);
  for (auto& z : v) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    z = {re, im};
  }
  return PureState::normalized(std::move(v));
}

CMatrix random_unitary_matrix(std::size_t dim, std::uint64_t seed) {
  require(dim >= 1, ErrorCode::InvalidArgument, "random_unitary needs dim >= 1");
  Rng rng = make_stream(sub_seed(seed, StreamTag::Unitary), 0);
  std::normal_distribution<double> gauss;
  CMatrix z(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      z(i, j) = {re, im};
    }
  // Gram-Schmidt gives R with a positive real diagonal, which is exactly the
  // phase fix that makes Q Haar distributed.
  CMatrix q, r;
  qr_positive(z, q, r);
  return q;
}

OrthonormalBasis random_unitary(std::size_t dim, std::uint64_t seed) {
  require(dim >= 2, ErrorCode::InvalidArgument, "random_unitary needs dim >= 2");
  const CMatrix q = random_unitary_matrix(dim, seed);
  std::vector<PureState> cols;
  for (std::size_t c = 0; c < dim; ++c) cols.push_back(PureState::normalized(q.column(c)));
  return OrthonormalBasis(std::move(cols));
}

}  // namespace epi
