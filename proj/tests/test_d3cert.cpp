#include "doctest.h"

#include <array>
#include <cmath>

#include "epistemic/d3cert.hpp"
#include "epistemic/error.hpp"
#include "epistemic/mub.hpp"

using namespace epi;

namespace {

// Last column of the three reference tables (sum of the three
// probabilities), in (alpha, beta, i, j) order.
constexpr std::array<double, 27> kReference{
    0.0,     0.0,       0.02280, 0.02046, 0.02854, 0.1119,  0.0,     0.0,        0.04198,
    0.0,     0.0001107, 0.02699, 0.02046, 0.04659, 0.09913, 0.0,     0.00006005, 0.01415,
    0.0,     0.0001284, 0.02836, 0.0,     0.0,     0.01016, 0.04370, 0.02959,    0.1035};

const CertificateReport& report() {
  static const CertificateReport r = optimize_all_triples(canonical_states(), 64, 1);
  return r;
}

}  // namespace

TEST_CASE("canonical states") {
  const D3Instance inst = canonical_states();
  CHECK(std::abs(inst.c_literal_norm - 1.0) < 5e-4);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
          CHECK(std::abs(fidelity(inst.bases[a][i], inst.bases[b][j]) - 1.0 / 3.0) < 1e-12);
  const PureState flat = PureState::normalized({1.0, 1.0, 1.0});
  CHECK(fidelity(inst.bases[2][1], flat) == doctest::Approx(1.0));
  const MubFamily fam(3, {inst.bases[0], inst.bases[1], inst.bases[2]});
  CHECK(verify_mub(fam).ok);
}

TEST_CASE("overlap weight sum") {
  const D3Instance inst = canonical_states();
  CHECK(std::abs(overlap_weight_sum(inst) - 1.739) < 2e-3);

  D3Instance moved = inst;
  moved.c = inst.bases[0][0];
  CHECK(overlap_weight_sum(moved) ==
        doctest::Approx(1.0 + 6.0 * (1.0 - std::sqrt(2.0 / 3.0))).epsilon(1e-12));

  const CMatrix u = random_unitary_matrix(3, 5);
  auto rot = [&](const PureState& s) {
    CVector v(3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) v[i] += u(i, j) * s[j];
    return PureState::normalized(std::move(v));
  };
  D3Instance rotated = inst;
  rotated.c = rot(inst.c);
  for (auto& basis : rotated.bases) {
    std::vector<PureState> v;
    for (const auto& e : basis.vectors()) v.push_back(rot(e));
    basis = OrthonormalBasis(std::move(v));
  }
  CHECK(overlap_weight_sum(rotated) == doctest::Approx(overlap_weight_sum(inst)).epsilon(1e-12));
}

TEST_CASE("quantum_epsilon with the reference (1,1) basis") {
  const D3Instance inst = canonical_states();
  const std::vector<CVector> rounded{
      {0.0, {0.8171, -0.5765}, 0.0},
      {{-0.3439, -0.6178}, 0.0, {0.3631, -0.6068}},
      {{-0.6621, -0.2482}, 0.0, {0.1161, 0.6975}}};
  const auto basis = OrthonormalBasis::orthonormalize(rounded);
  const auto v = quantum_epsilon(inst.bases[0][0], inst.bases[1][0], inst.c, basis);
  CHECK(v.epsilon < 1e-3);
  CHECK(v.triple_sum == doctest::Approx(3.0 * v.epsilon));

  const auto r = report().entries.front();
  REQUIRE(r.alpha == 1);
  REQUIRE(r.i == 1);
  CHECK(r.result.epsilon <= v.epsilon + 1e-15);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto random = random_unitary(3, 300 + s);
    for (const auto& e : report().entries) {
      const auto q = quantum_epsilon(inst.bases[e.alpha - 1][e.i - 1],
                                     inst.bases[e.beta - 1][e.j - 1], inst.c, random);
      CHECK(q.epsilon >= e.result.epsilon - 1e-12);
    }
  }

  const OrthonormalBasis partial({PureState::basis(3, 0), PureState::basis(3, 1)});
  CHECK_THROWS_AS(quantum_epsilon(inst.bases[0][0], inst.bases[1][0], inst.c, partial), Error);
}

TEST_CASE("27-triple certificate matches the reference tables") {
  const auto& r = report();
  REQUIRE(r.entries.size() == 27);
  CHECK(r.all_converged);
  const D3Instance inst = canonical_states();
  for (std::size_t t = 0; t < 27; ++t) {
    const auto& e = r.entries[t];
    CAPTURE(t);
    CHECK(e.alpha < e.beta);
    if (kReference[t] == 0.0) {
      CHECK(e.result.epsilon < 1e-8);
      CHECK(pp_incompatible(triple_overlaps(inst.bases[e.alpha - 1][e.i - 1],
                                            inst.bases[e.beta - 1][e.j - 1], inst.c),
                            kPredicateSlack));
    } else {
      CHECK(std::abs(e.result.triple_sum - kReference[t]) < 2e-3);
      CHECK_FALSE(e.result.pp_incompatible);
    }
  }
  CHECK(std::abs(r.family_sums[0] - 0.2257) < 2e-3);
  CHECK(std::abs(r.grand_noise_sum - 0.649) < 2e-3);
  CHECK(std::abs(r.overlap_weight_sum - 1.739) < 2e-3);
  CHECK(r.k_bound <= 0.95);
  CHECK(r.k_bound >= 0.94);
  CHECK(certify_k(r) == r.k_bound);

  const auto again = optimize_all_triples(inst, 64, 1, 3);
  for (std::size_t t = 0; t < 27; ++t)
    CHECK(again.entries[t].result.epsilon == r.entries[t].result.epsilon);

  // A different seed lands on the same optima.
  const auto other = optimize_all_triples(inst, 64, 2);
  for (std::size_t t = 0; t < 27; ++t)
    CHECK(std::abs(other.entries[t].result.epsilon - r.entries[t].result.epsilon) < 1e-6);
}

TEST_CASE("certify_k formula and guards") {
  CHECK(certify_k(0.0, 1.739) == doctest::Approx(1.0 / 1.739));
  CHECK(certify_k(0.739, 1.739) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(certify_k(0.5, 0.0), Error);
  CHECK_THROWS_AS(certify_k(0.5, std::nan("")), Error);

  CertificateReport r = report();
  r.entries[4].result.converged = false;
  try {
    certify_k(r);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Precondition);
  }
}
