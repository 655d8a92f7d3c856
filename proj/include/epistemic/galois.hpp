#pragma once

#include <cstddef>
#include <vector>

namespace epi {

// Finite field GF(p^m) with full addition/multiplication tables. Elements are
// integers 0..q-1 whose base-p digits are polynomial coefficients (lowest
// degree first) modulo a fixed irreducible polynomial.
class GaloisField {
 public:
  // Fields used by the MUB construction: GF(4), GF(8), GF(9).
  static const GaloisField& of_order(std::size_t q);

  std::size_t order() const { return q_; }
  std::size_t characteristic() const { return p_; }
  std::size_t degree() const { return m_; }

  int add(int a, int b) const { return add_[a * q_ + b]; }
  int mul(int a, int b) const { return mul_[a * q_ + b]; }
  // Absolute trace a + a^p + ... + a^(p^(m-1)); lands in the prime field.
  int trace(int a) const { return trace_[a]; }

  // Basis {e_k} over the prime field with trace(e_k e_l) = delta_kl.
  // Exists for p = 2 with m odd or m = 2 (the orders used here).
  std::vector<int> self_dual_basis() const;

 private:
  GaloisField(std::size_t p, std::size_t m, std::vector<int> modulus);

  std::size_t p_;
  std::size_t m_;
  std::size_t q_;
  std::vector<int> add_;
  std::vector<int> mul_;
  std::vector<int> trace_;
};

}  // namespace epi
