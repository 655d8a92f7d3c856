#include "epistemic/galois.hpp"

#include "epistemic/error.hpp"

namespace epi {

namespace {

std::vector<int> digits(int a, std::size_t p, std::size_t m) {
  std::vector<int> d(m);
  for (std::size_t k = 0; k < m; ++k) {
    d[k] = a % static_cast<int>(p);
    a /= static_cast<int>(p);
  }
  return d;
}

int from_digits(const std::vector<int>& d, std::size_t p) {
  int a = 0;
  for (std::size_t k = d.size(); k-- > 0;) a = a * static_cast<int>(p) + d[k];
  return a;
}

}  // namespace

GaloisField::GaloisField(std::size_t p, std::size_t m, std::vector<int> modulus)
    : p_(p), m_(m), q_(1) {
  for (std::size_t k = 0; k < m; ++k) q_ *= p;
  add_.resize(q_ * q_);
  mul_.resize(q_ * q_);
  const int ip = static_cast<int>(p);
  for (std::size_t a = 0; a < q_; ++a)
    for (std::size_t b = 0; b < q_; ++b) {
      const auto da = digits(static_cast<int>(a), p, m);
      const auto db = digits(static_cast<int>(b), p, m);
      std::vector<int> sum(m);
      for (std::size_t k = 0; k < m; ++k) sum[k] = (da[k] + db[k]) % ip;
      add_[a * q_ + b] = from_digits(sum, p);

      // Schoolbook product, then reduce by the monic modulus of degree m.
      std::vector<int> prod(2 * m - 1, 0);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % ip;
      for (std::size_t deg = prod.size(); deg-- > m;) {
        const int lead = prod[deg];
        if (lead == 0) continue;
        for (std::size_t k = 0; k <= m; ++k) {
          const std::size_t idx = deg - m + k;
          prod[idx] = ((prod[idx] - lead * modulus[k]) % ip + ip) % ip;
        }
      }
      prod.resize(m);
      mul_[a * q_ + b] = from_digits(prod, p);
    }

  trace_.resize(q_);
  for (std::size_t a = 0; a < q_; ++a) {
    int power = static_cast<int>(a);
    int acc = 0;
    for (std::size_t k = 0; k < m; ++k) {
      acc = add(acc, power);
      int next = 1;
      for (std::size_t e = 0; e < p; ++e) next = mul(next, power);
      power = next;
    }
    trace_[a] = acc;
  }
}

const GaloisField& GaloisField::of_order(std::size_t q) {
  // Irreducible moduli, coefficients lowest degree first.
  static const GaloisField gf4(2, 2, {1, 1, 1});     // x^2 + x + 1
  static const GaloisField gf8(2, 3, {1, 1, 0, 1});  // x^3 + x + 1
  static const GaloisField gf9(3, 2, {1, 0, 1});     // x^2 + 1
  switch (q) {
    case 4: return gf4;
    case 8: return gf8;
    case 9: return gf9;
    default:
      fail(ErrorCode::UnsupportedDimension,
           "no built-in Galois field of order " + std::to_string(q));
  }
}

std::vector<int> GaloisField::self_dual_basis() const {
  const int q = static_cast<int>(q_);
  std::vector<int> chosen;
  // Depth-first search over m-tuples; the fields here have at most 9 elements.
  auto search = [&](auto&& self, int start) -> bool {
    if (chosen.size() == m_) return true;
    for (int e = start; e < q; ++e) {
      if (trace(mul(e, e)) != 1) continue;
      bool orthogonal = true;
      for (int c : chosen) orthogonal = orthogonal && trace(mul(c, e)) == 0;
      if (!orthogonal) continue;
      chosen.push_back(e);
      if (self(self, e + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  require(search(search, 1), ErrorCode::UnsupportedDimension,
          "GF(" + std::to_string(q_) + ") has no self-dual basis");
  return chosen;
}

}  // namespace epi
