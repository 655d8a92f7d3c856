#include "epistemic/mub.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "epistemic/error.hpp"
#include "epistemic/galois.hpp"

namespace epi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

OrthonormalBasis standard_basis(std::size_t d) {
  std::vector<PureState> v;
  for (std::size_t k = 0; k < d; ++k) v.push_back(PureState::basis(d, k));
  return OrthonormalBasis(std::move(v));
}

OrthonormalBasis basis_from_rows(std::vector<CVector> rows) {
  std::vector<PureState> v;
  for (auto& r : rows) v.push_back(PureState::normalized(std::move(r)));
  return OrthonormalBasis(std::move(v));
}

std::vector<OrthonormalBasis> qubit_mubs() {
  const double s = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  return {standard_basis(2),
          basis_from_rows({{s, s}, {s, -s}}),
          basis_from_rows({{s, s * i}, {s, -s * i}})};
}

// Quadratic-phase bases: vector b of basis a has components
// exp(2 pi i (a x^2 + b x) / p) / sqrt(p).
std::vector<OrthonormalBasis> odd_prime_mubs(std::size_t p) {
  std::vector<OrthonormalBasis> out{standard_basis(p)};
  const double s = 1.0 / std::sqrt(static_cast<double>(p));
  for (std::size_t a = 0; a < p; ++a) {
    std::vector<CVector> rows;
    for (std::size_t b = 0; b < p; ++b) {
      CVector v(p);
      for (std::size_t x = 0; x < p; ++x) {
        const std::size_t e = (a * x * x + b * x) % p;
        v[x] = std::polar(s, kTwoPi * static_cast<double>(e) / static_cast<double>(p));
      }
      rows.push_back(std::move(v));
    }
    out.push_back(basis_from_rows(std::move(rows)));
  }
  return out;
}

// Odd characteristic over GF(q): components omega_p^tr(a x^2 + b x) / sqrt(q).
std::vector<OrthonormalBasis> odd_field_mubs(const GaloisField& f) {
  const int q = static_cast<int>(f.order());
  const double p = static_cast<double>(f.characteristic());
  const double s = 1.0 / std::sqrt(static_cast<double>(q));
  std::vector<OrthonormalBasis> out{standard_basis(f.order())};
  for (int a = 0; a < q; ++a) {
    std::vector<CVector> rows;
    for (int b = 0; b < q; ++b) {
      CVector v(f.order());
      for (int x = 0; x < q; ++x) {
        const int arg = f.add(f.mul(a, f.mul(x, x)), f.mul(b, x));
        v[x] = std::polar(s, kTwoPi * f.trace(arg) / p);
      }
      rows.push_back(std::move(v));
    }
    out.push_back(basis_from_rows(std::move(rows)));
  }
  return out;
}

// Characteristic 2 over GF(2^m). With coordinates x_k = tr(x e_k) in a
// self-dual basis, basis a uses the Z4-valued quadratic form
//   Q_a(x) = sum_k M_kk x_k + 2 sum_{k<l} M_kl x_k x_l,  M_kl = tr(a e_k e_l),
// and vector b has components i^Q_a(x) (-1)^tr(b x) / sqrt(q).
std::vector<OrthonormalBasis> even_field_mubs(const GaloisField& f) {
  const int q = static_cast<int>(f.order());
  const std::size_t m = f.degree();
  const auto e = f.self_dual_basis();
  const double s = 1.0 / std::sqrt(static_cast<double>(q));
  const cplx phase[4] = {1.0, cplx(0.0, 1.0), -1.0, cplx(0.0, -1.0)};

  std::vector<std::vector<int>> coords(q, std::vector<int>(m));
  for (int x = 0; x < q; ++x)
    for (std::size_t k = 0; k < m; ++k) coords[x][k] = f.trace(f.mul(x, e[k]));

  std::vector<OrthonormalBasis> out{standard_basis(f.order())};
  for (int a = 0; a < q; ++a) {
    std::vector<std::vector<int>> form(m, std::vector<int>(m));
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t l = 0; l < m; ++l) form[k][l] = f.trace(f.mul(a, f.mul(e[k], e[l])));
    std::vector<CVector> rows;
    for (int b = 0; b < q; ++b) {
      CVector v(f.order());
      for (int x = 0; x < q; ++x) {
        const auto& c = coords[x];
        int z4 = 0;
        for (std::size_t k = 0; k < m; ++k) {
          z4 += form[k][k] * c[k];
          for (std::size_t l = k + 1; l < m; ++l) z4 += 2 * form[k][l] * c[k] * c[l];
        }
        z4 += 2 * f.trace(f.mul(b, x));
        v[x] = s * phase[z4 % 4];
      }
      rows.push_back(std::move(v));
    }
    out.push_back(basis_from_rows(std::move(rows)));
  }
  return out;
}

}  // namespace

MubFamily::MubFamily(std::size_t dim, std::vector<OrthonormalBasis> bases)
    : dim_(dim), bases_(std::move(bases)) {
  require(!bases_.empty(), ErrorCode::InvalidArgument, "empty MUB family");
  for (const auto& b : bases_) {
    require(b.dim() == dim_, ErrorCode::DimensionMismatch, "MUB family basis dimension mismatch");
    require(b.size() == bases_.front().size(), ErrorCode::InvalidArgument,
            "MUB family bases differ in size");
  }
}

bool is_prime(std::size_t n) {
  if (n < 2) return false;
  for (std::size_t k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

bool is_prime_power(std::size_t n) {
  if (n < 2) return false;
  std::size_t p = 2;
  while (n % p != 0) ++p;
  while (n % p == 0) n /= p;
  return n == 1;
}

bool mub_dimension_supported(std::size_t dim) {
  return dim == 2 || dim == 4 || dim == 8 || dim == 9 || (dim > 2 && is_prime(dim));
}

MubFamily generate_mub(std::size_t dim) {
  if (!mub_dimension_supported(dim))
    fail(ErrorCode::UnsupportedDimension,
         "unsupported dimension " + std::to_string(dim) +
             ": supported dimensions are {2, 4, 8, 9} and odd primes");
  if (dim == 2) return MubFamily(2, qubit_mubs());
  if (dim == 4 || dim == 8) return MubFamily(dim, even_field_mubs(GaloisField::of_order(dim)));
  if (dim == 9) return MubFamily(9, odd_field_mubs(GaloisField::of_order(9)));
  return MubFamily(dim, odd_prime_mubs(dim));
}

MubReport verify_mub(const MubFamily& family) {
  MubReport r;
  const double target = 1.0 / static_cast<double>(family.subdim());
  for (std::size_t g = 0; g < family.size(); ++g) {
    const auto& bg = family[g];
    for (std::size_t i = 0; i < bg.size(); ++i)
      for (std::size_t j = 0; j < bg.size(); ++j) {
        const double want = i == j ? 1.0 : 0.0;
        const double got = std::abs(inner(bg[i].amplitudes(), bg[j].amplitudes()));
        r.max_orthonormality_deviation =
            std::max(r.max_orthonormality_deviation, std::abs(got - want));
      }
    for (std::size_t h = g + 1; h < family.size(); ++h)
      for (const auto& u : bg.vectors())
        for (const auto& v : family[h].vectors())
          r.max_cross_deviation =
              std::max(r.max_cross_deviation, std::abs(fidelity(u, v) - target));
  }
  r.ok = r.max_cross_deviation < 1e-10 && r.max_orthonormality_deviation < 1e-10;
  return r;
}

std::size_t largest_prime_power_leq(std::size_t d) {
  require(d >= 4, ErrorCode::InvalidArgument, "largest_prime_power_leq needs d >= 4");
  for (std::size_t k = d; k >= 4; --k)
    if (is_prime_power(k)) return k;
  return 4;  // unreachable: 4 is a prime power
}

std::vector<PureState> embed_states(std::span<const PureState> states, std::size_t target_dim) {
  std::vector<PureState> out;
  out.reserve(states.size());
  for (const auto& s : states) {
    require(s.dim() <= target_dim, ErrorCode::DimensionMismatch,
            "cannot embed dimension " + std::to_string(s.dim()) + " into " +
                std::to_string(target_dim));
    CVector v(target_dim);
    std::copy(s.amplitudes().begin(), s.amplitudes().end(), v.begin());
    out.emplace_back(std::move(v));
  }
  return out;
}

MubFamily embed_family(const MubFamily& family, std::size_t target_dim) {
  std::vector<OrthonormalBasis> bases;
  for (const auto& b : family.bases()) bases.emplace_back(embed_states(b.vectors(), target_dim));
  return MubFamily(target_dim, std::move(bases));
}

}  // namespace epi
