#include "doctest.h"

#include <cmath>
#include <algorithm>
#include <limits>
#include <numbers>
#include <random>

#include "epistemic/error.hpp"
#include "epistemic/ontomodel.hpp"
#include "epistemic/rng.hpp"

using namespace epi;

namespace {

constexpr double kPi = std::numbers::pi;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 unit(const Vec3& a) {
  const double n = std::sqrt(dot(a, a));
  return {a[0] / n, a[1] / n, a[2] / n};
}

double simpson(const auto& f, double a, double b, int n = 4000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

// Second route to the overlap of two cosine densities. By symmetry the
// overlap is twice the mu_b mass of the lune {(a-b).x >= 0, b.x >= 0}. With
// the lune's edge as pole the polar integral is elementary and only the
// azimuth is integrated numerically.
double lens_overlap(const Vec3& a, const Vec3& b) {
  const Vec3 p = unit({a[0] - b[0], a[1] - b[1], a[2] - b[2]});
  const Vec3& q = b;
  const Vec3 pole = unit(cross(p, q));
  const Vec3 e1 = unit(cross(q, pole));
  const Vec3 e2 = cross(pole, e1);
  // p and q are orthogonal to the pole, so membership depends on azimuth only.
  auto inside = [&](double psi) {
    const Vec3 x{std::cos(psi) * e1[0] + std::sin(psi) * e2[0],
                 std::cos(psi) * e1[1] + std::sin(psi) * e2[1],
                 std::cos(psi) * e1[2] + std::sin(psi) * e2[2]};
    return dot(p, x) >= 0.0 && dot(q, x) >= 0.0;
  };
  // Azimuth of each half-plane boundary.
  std::vector<double> cuts;
  for (const Vec3* n : {&p, &q}) {
    const double t = std::atan2(-dot(*n, e1), dot(*n, e2));
    for (double c : {t, t + kPi}) cuts.push_back(std::fmod(c + 4.0 * kPi, 2.0 * kPi));
  }
  cuts.push_back(0.0);
  cuts.push_back(2.0 * kPi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    if (hi - lo < 1e-15 || !inside(0.5 * (lo + hi))) continue;
    // integral over theta of sin^2 is pi/2, of sin cos is 0.
    total += simpson(
        [&](double psi) {
          return (kPi / 2.0) * (dot(b, e1) * std::cos(psi) + dot(b, e2) * std::sin(psi)) / kPi;
        },
        lo, hi);
  }
  return 2.0 * total;
}

std::vector<double> random_weights(Rng& rng, std::size_t n, double zero_fraction) {
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = u(rng) < zero_fraction ? 0.0 : e(rng);
    total += x;
  }
  if (total == 0.0) {
    w[0] = 1.0;
    total = 1.0;
  }
  for (auto& x : w) x /= total;
  return w;
}

Measurement random_qubit_measurement(std::uint64_t seed) {
  return Measurement::from_basis(random_unitary(2, seed));
}

}  // namespace

TEST_CASE("sphere rule integrates smooth functions") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    std::vector<Vec3> normals;
    for (std::uint64_t k = 0; k < s % 5; ++k) normals.push_back(bloch_vector(random_state(2, 40 * s + k)));
    const SphereRule rule = crease_adapted_rule(normals, 12);
    double total = 0.0, x2 = 0.0, xyz = 0.0;
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const auto& p = rule.points[k];
      total += rule.weights[k];
      x2 += rule.weights[k] * p[0] * p[0];
      xyz += rule.weights[k] * p[0] * p[1] * p[2];
      CHECK(std::abs(dot(p, p) - 1.0) < 1e-12);
    }
    CHECK(std::abs(total - 4.0 * kPi) < 1e-9);
    CHECK(std::abs(x2 - 4.0 * kPi / 3.0) < 1e-9);
    CHECK(std::abs(xyz) < 1e-12);
  }
}

TEST_CASE("KS model construction") {
  const auto model = ks_model_d2();
  const auto mu = model->epistemic_state(random_state(2, 3));
  const std::array<EpistemicState, 1> one{mu};
  CHECK(std::abs(support_intersection_measure(one, 0.0) - 1.0) < 1e-8);
  CHECK_THROWS_AS(ks_model_d2(2), Error);
  CHECK_THROWS_AS(model->epistemic_state(random_state(3, 1)), Error);
}

TEST_CASE("KS model reproduces the Born rule") {
  const auto model = ks_model_d2();
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s)
    worst = std::max(worst, born_check(*model, random_state(2, 1000 + s),
                                       random_qubit_measurement(2000 + s)));
  MESSAGE("max Born residual " << worst);
  CHECK(worst < 1e-6);
}

TEST_CASE("KS model is maximally psi-epistemic") {
  const auto model = ks_model_d2();
  double worst = 0.0, worst_lens = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const PureState a = random_state(2, 3000 + s), b = random_state(2, 4000 + s);
    const double wc = overlap_pair(*model, a, b);
    worst = std::max(worst, std::abs(wc - quantum_overlap(a, b)));
    worst_lens = std::max(worst_lens, std::abs(wc - lens_overlap(bloch_vector(a), bloch_vector(b))));
    CHECK(wc >= 0.0);
    CHECK(wc <= 1.0);
  }
  MESSAGE("max |omega_C - omega_Q| " << worst << ", vs lens " << worst_lens);
  CHECK(worst < 1e-4);
  CHECK(worst_lens < 1e-6);

  CHECK(std::abs(overlap_pair(*model, PureState::basis(2, 0), PureState::basis(2, 1))) < 1e-9);
  const PureState a = random_state(2, 5);
  CHECK(overlap_pair(*model, a, a) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("triple overlaps") {
  const auto model = ks_model_d2();
  for (std::uint64_t s = 0; s < 10; ++s) {
    const PureState a = random_state(2, 10 * s), b = random_state(2, 10 * s + 1),
                    c = random_state(2, 10 * s + 2);
    const double t = overlap_triple(*model, a, b, c);
    CHECK(t >= 0.0);
    CHECK(t <= overlap_pair(*model, a, b) + 1e-12);
    CHECK(t <= overlap_pair(*model, b, c) + 1e-12);
    CHECK(t <= overlap_pair(*model, a, c) + 1e-12);
  }
  const PureState a = random_state(2, 77);
  CHECK(overlap_triple(*model, a, a, a) == doctest::Approx(1.0).epsilon(1e-10));

  const auto x = EpistemicState::discrete({0.5, 0.5, 0.0});
  const auto y = EpistemicState::discrete({0.0, 0.5, 0.5});
  const auto z = EpistemicState::discrete({0.5, 0.0, 0.5});
  CHECK(overlap(x, y, z) == 0.0);
  CHECK(overlap(x, y) == 0.5);
  CHECK(overlap(x, x, x) == 1.0);
}

TEST_CASE("Theorem 1 on the KS and psi-ontic models") {
  const auto model = ks_model_d2();
  std::vector<std::pair<PureState, PureState>> pairs;
  for (std::uint64_t s = 0; s < 30; ++s) pairs.emplace_back(random_state(2, 600 + s), random_state(2, 700 + s));
  const auto r = verify_theorem1(*model, pairs);
  CHECK(r.pairs == 30);
  CHECK(r.worst_violation <= 1e-4);
  CHECK(r.max_born_residual < 1e-6);

  std::vector<PureState> states{random_state(3, 1), random_state(3, 2), random_state(3, 3)};
  std::vector<Measurement> ms;
  std::vector<std::pair<PureState, PureState>> qpairs;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      ms.push_back(helstrom_measurement(states[i], states[j]));
      qpairs.emplace_back(states[i], states[j]);
    }
  ms.push_back(Measurement::from_basis(random_unitary(3, 9)));
  const DiscreteModel ontic = psi_ontic_model(states, ms);
  for (const auto& s : states)
    for (const auto& m : ms) CHECK(born_check(ontic, s, m) < 1e-15);
  CHECK(overlap_pair(ontic, states[0], states[1]) == 0.0);
  const auto t = verify_theorem1(ontic, qpairs);
  CHECK(t.worst_violation <= 0.0);
}

TEST_CASE("over-epistemic model is a precondition failure") {
  // Two qubit states sharing all their mass cannot reproduce the Born rule on
  // the measurement that discriminates them.
  const PureState a = PureState::basis(2, 0);
  const PureState b = PureState::normalized({1.0, 1.0});
  const Measurement m = helstrom_measurement(a, b);
  const DiscreteModel model(
      2, {{"a", {0.5, 0.5}, a}, {"b", {0.5, 0.5}, b}},
      {{"helstrom", {"guess_a", "guess_b"}, {{1.0, 0.0}, {0.0, 1.0}}, m}}, "over");
  const std::array<std::pair<PureState, PureState>, 1> pairs{std::pair{a, b}};
  try {
    verify_theorem1(model, pairs);
    FAIL("expected a precondition failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Precondition);
  }

  const DiscreteModel silent(2, {{"a", {1.0, 0.0}, a}, {"b", {0.0, 1.0}, b}}, {}, "silent");
  try {
    verify_theorem1(silent, pairs);
    FAIL("expected a precondition failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Precondition);
  }
}

TEST_CASE("born_check flags a corrupted response") {
  const auto mu = EpistemicState::discrete({0.25, 0.75});
  const auto good = ResponseFunction::discrete({"0", "1"}, {{1.0, 0.0}, {0.0, 1.0}});
  const std::array<double, 2> born{0.25, 0.75};
  CHECK(born_check(mu, good, born) == 0.0);
  const auto bad = unchecked_discrete_response({"0", "1"}, {{1.0, 0.1}, {0.1, 1.0}});
  CHECK(born_check(mu, bad, born) >= 0.05);
  CHECK_THROWS_AS(ResponseFunction::discrete({"0", "1"}, {{1.0, 0.1}, {0.1, 1.0}}), Error);
}

TEST_CASE("Bonferroni inequality on random discrete collections") {
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint64_t t = 0; t < 1000; ++t) {
    Rng rng = make_stream(12345, t);
    const double zeros = 0.1 * static_cast<double>(t % 9);
    std::vector<std::vector<EpistemicState>> families(2);
    for (auto& f : families)
      for (int i = 0; i < 3; ++i) f.push_back(EpistemicState::discrete(random_weights(rng, 50, zeros)));
    const auto c = EpistemicState::discrete(random_weights(rng, 50, zeros));
    const auto r = bonferroni_check(families, c);
    worst = std::min(worst, r.slack);
    REQUIRE(r.slack >= -1e-9);
  }
  MESSAGE("smallest slack " << worst);

  const auto same = EpistemicState::discrete({0.2, 0.3, 0.5});
  const std::vector<std::vector<EpistemicState>> identical(2, std::vector<EpistemicState>(3, same));
  const auto r = bonferroni_check(identical, same);
  CHECK(r.lhs == doctest::Approx(6.0));
  CHECK(r.slack >= 0.0);

  std::vector<std::vector<EpistemicState>> disjoint(2);
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 3; ++i) {
      std::vector<double> w(7, 0.0);
      w[3 * a + i] = 1.0;
      disjoint[a].push_back(EpistemicState::discrete(w));
    }
  std::vector<double> wc(7, 0.0);
  wc[6] = 1.0;
  const auto d = bonferroni_check(disjoint, EpistemicState::discrete(wc));
  CHECK(d.lhs == 0.0);
  CHECK(d.slack == 1.0);
}

TEST_CASE("response minimum bound") {
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng = make_stream(999, t);
    const std::size_t n = 2 + t % 4, points = 20;
    std::vector<EpistemicState> states;
    for (std::size_t i = 0; i < n; ++i) states.push_back(EpistemicState::discrete(random_weights(rng, points, 0.3)));
    std::vector<std::vector<double>> xi(n, std::vector<double>(points));
    for (std::size_t x = 0; x < points; ++x) {
      const auto col = random_weights(rng, n, 0.2);
      for (std::size_t f = 0; f < n; ++f) xi[f][x] = col[f];
    }
    std::vector<std::string> labels;
    for (std::size_t f = 0; f < n; ++f) labels.push_back(std::to_string(f));
    const auto r = response_min_bound(states, ResponseFunction::discrete(labels, xi));
    REQUIRE(r.slack >= -1e-9);
  }

  const auto model = ks_model_d2();
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto basis = random_unitary(2, 50 + s);
    const Measurement m = Measurement::from_basis(basis);
    const auto r = response_min_bound(*model, basis.vectors(), m);
    CHECK(r.slack >= -1e-9);
    CHECK(std::abs(r.lhs) < 1e-9);
  }

  const auto a = EpistemicState::discrete({1.0, 0.0});
  const auto b = EpistemicState::discrete({0.0, 1.0});
  const std::array<EpistemicState, 2> ab{a, b};
  const auto r = response_min_bound(ab, ResponseFunction::discrete({"0", "1"}, {{1.0, 0.0}, {0.0, 1.0}}));
  CHECK(r.lhs == 0.0);
  CHECK(r.slack == 2.0);
  CHECK_THROWS_AS(response_min_bound(ab, ResponseFunction::discrete({"0"}, {{1.0, 1.0}})), Error);
}

TEST_CASE("support intersection measure") {
  const auto a = EpistemicState::discrete({0.5, 0.5, 0.0, 0.0});
  const auto b = EpistemicState::discrete({0.0, 0.0, 0.5, 0.5});
  const std::array<EpistemicState, 2> ab{a, b};
  CHECK(support_intersection_measure(ab, 0.0) == 0.0);
  const std::array<EpistemicState, 2> aa{a, a};
  CHECK(support_intersection_measure(aa, 0.0) == 1.0);

  const auto model = ks_model_d2();
  const std::array<PureState, 2> orth{PureState::basis(2, 0), PureState::basis(2, 1)};
  CHECK(std::abs(support_intersection_measure(*model, orth, 0.0)) < 1e-9);

  // The mu_psi mass on the support of mu_phi bounds the overlap from above.
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::array<PureState, 2> pair{random_state(2, 800 + s), random_state(2, 900 + s)};
    CHECK(support_intersection_measure(*model, pair, 0.0) >=
          overlap_pair(*model, pair[0], pair[1]) - 1e-12);
    Rng rng = make_stream(4, s);
    const std::array<EpistemicState, 2> d{EpistemicState::discrete(random_weights(rng, 30, 0.5)),
                                          EpistemicState::discrete(random_weights(rng, 30, 0.5))};
    CHECK(support_intersection_measure(d, 0.0) >= overlap(d[0], d[1]) - 1e-15);
  }
}

TEST_CASE("discrete model JSON") {
  const std::string text = R"({
    "points": 3,
    "states": {"up": [1, 0, 0], "plus": [0.5, 0.5, 0]},
    "responses": {"z": {"0": [1, 0, 0.5], "1": [0, 1, 0.5]}},
    "quantum": {
      "states": {"up": {"dim": 2, "amplitudes": [[1, 0], [0, 0]]}},
      "measurements": {"z": {"0": [[[1, 0], [0, 0]]], "1": [[[0, 0], [1, 0]]]}}
    }
  })";
  const DiscreteModel m = DiscreteModel::from_json(text);
  CHECK(m.states().size() == 2);
  CHECK(m.space().points() == 3);
  const auto up = m.epistemic_state(PureState::basis(2, 0));
  CHECK(up.weights()[0] == 1.0);
  CHECK(overlap(m.state("up"), m.state("plus")) == 0.5);
  const Measurement z = Measurement::from_basis(OrthonormalBasis({PureState::basis(2, 0), PureState::basis(2, 1)}));
  CHECK(born_check(m, PureState::basis(2, 0), z) == 0.0);
  CHECK_THROWS_AS(m.epistemic_state(PureState::basis(2, 1)), Error);
  CHECK_THROWS_AS(DiscreteModel::from_json("{\"points\": 2}"), Error);
  CHECK_THROWS_AS(DiscreteModel::from_json("{\"points\": 2, \"states\": {\"a\": [0.3, 0.3]}}"), Error);
  CHECK_THROWS_AS(DiscreteModel::from_json("not json"), Error);
}

TEST_CASE("random inequality suite") {
  const auto a = random_inequality_suite(300, 100, 40, 5, 1);
  const auto b = random_inequality_suite(300, 100, 40, 5, 3);
  CHECK(a.bonferroni_min_slack >= -1e-9);
  CHECK(a.response_min_slack >= -1e-9);
  CHECK(a.bonferroni_min_slack == b.bonferroni_min_slack);
  CHECK(a.response_min_slack == b.response_min_slack);
  CHECK(random_inequality_suite(300, 100, 40, 6, 1).bonferroni_min_slack != a.bonferroni_min_slack);
  CHECK_THROWS_AS(random_inequality_suite(1, 1, 0, 5), Error);
}

TEST_CASE("discrete responses follow the measurement's outcome order") {
  const PureState zero = PureState::basis(2, 0);
  const PureState one = PureState::basis(2, 1);
  const Measurement z = Measurement::from_basis(OrthonormalBasis({zero, one}));
  const Measurement swapped = Measurement::from_basis(OrthonormalBasis({one, zero}));
  const std::array<PureState, 2> states{zero, one};
  const std::array<Measurement, 1> ms{z};
  const DiscreteModel m = psi_ontic_model(states, ms);
  const auto xi = m.response(swapped);
  CHECK(xi.label(0) == "1");
  CHECK(xi.value(0, std::size_t{1}) == 1.0);
  CHECK(born_check(m, one, swapped) == 0.0);
}
