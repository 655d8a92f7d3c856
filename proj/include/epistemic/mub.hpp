#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "epistemic/qstate.hpp"

namespace epi {

// Family of pairwise mutually unbiased orthonormal sets in C^dim. After
// embedding, the sets may span a subspace of dimension subdim() < dim().
class MubFamily {
 public:
  MubFamily(std::size_t dim, std::vector<OrthonormalBasis> bases);

  std::size_t dim() const { return dim_; }
  std::size_t subdim() const { return bases_.front().size(); }
  std::size_t size() const { return bases_.size(); }
  const OrthonormalBasis& operator[](std::size_t gamma) const { return bases_[gamma]; }
  const std::vector<OrthonormalBasis>& bases() const { return bases_; }

 private:
  std::size_t dim_;
  std::vector<OrthonormalBasis> bases_;
};

struct MubReport {
  // max |fidelity - 1/subdim| over vector pairs from distinct bases
  double max_cross_deviation = 0.0;
  // max |<v_i|v_j> - delta_ij| within each basis
  double max_orthonormality_deviation = 0.0;
  bool ok = false;  // both deviations below 1e-10
};

bool mub_dimension_supported(std::size_t dim);

// d + 1 mutually unbiased bases for d in {2, 4, 8, 9} or an odd prime. The
// first basis is always the standard basis.
MubFamily generate_mub(std::size_t dim);

MubReport verify_mub(const MubFamily& family);

bool is_prime(std::size_t n);
bool is_prime_power(std::size_t n);
// Largest prime power d' with 4 <= d' <= d.
std::size_t largest_prime_power_leq(std::size_t d);

// Zero-pads each state into C^target_dim.
std::vector<PureState> embed_states(std::span<const PureState> states, std::size_t target_dim);
MubFamily embed_family(const MubFamily& family, std::size_t target_dim);

}  // namespace epi
