// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "epistemic/bounds.hpp"
#include "epistemic/d3cert.hpp"
#include "epistemic/expsim.hpp"
#include "epistemic/mub.hpp"
#include "epistemic/ontomodel.hpp"
#include "epistemic/qstate.hpp"
#include "epistemic/triples.hpp"

using namespace epi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s,
               const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0.0) out.require(secs <= limit_s, "runtime over " + std::to_string(limit_s) + " s");
  if (!out.pass) ++failures;
  std::printf("[%s] %d %s:%s (%.1f s)\n", out.pass ? "PASS" : "FAIL", id, name.c_str(),
              out.detail.str().c_str(), secs);
  std::fflush(stdout);
}

// Last column of the three reference tables, (alpha, beta, i, j) order.
constexpr std::array<double, 27> kReference{
    0.0,     0.0,       0.02280, 0.02046, 0.02854, 0.1119,  0.0,     0.0,        0.04198,
    0.0,     0.0001107, 0.02699, 0.02046, 0.04659, 0.09913, 0.0,     0.00006005, 0.01415,
    0.0,     0.0001284, 0.02836, 0.0,     0.0,     0.01016, 0.04370, 0.02959,    0.1035};

bool prime_power_brute(std::size_t n) {
  if (n < 2) return false;
  std::size_t p = 2;
  while (n % p != 0) ++p;
  while (n % p == 0) n /= p;
  return n == 1;
}

std::size_t subdim_brute(std::size_t d) {
  while (!prime_power_brute(d)) --d;
  return d;
}

long double exact_ld(long double d) { return (1.0L / d) * (1.0L + std::sqrt(1.0L - 1.0L / d)); }

double omega_q_closed(const PureState& a, const PureState& b) {
  const double f = std::norm(inner(a.amplitudes(), b.amplitudes()));
  return 1.0 - std::sqrt(std::max(0.0, 1.0 - f));
}

PureState mix(const PureState& x, const PureState& y, double t) {
  CVector v(x.dim());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::cos(t) * x[i] + std::sin(t) * y[i];
  return PureState::normalized(std::move(v));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string fmt(double x, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

}  // namespace

int main() {
  CertificateReport d3;
  criterion(1, "d=3 certificate", 300.0, [&](Outcome& o) {
    d3 = optimize_all_triples(canonical_states(), 64, 1);
    o.detail << " grand=" << fmt(d3.grand_noise_sum) << " weights=" << fmt(d3.overlap_weight_sum)
             << " k=" << fmt(d3.k_bound) << " family(1,2)=" << fmt(d3.family_sums[0]);
    o.require(d3.all_converged, "all triples converged");
    o.require(std::abs(d3.grand_noise_sum - 0.649) <= 0.002, "grand noise sum 0.649 +- 0.002");
    o.require(std::abs(d3.overlap_weight_sum - 1.739) <= 0.002, "weight sum 1.739 +- 0.002");
    o.require(d3.k_bound <= 0.95, "k <= 0.95");
    o.require(std::abs(d3.family_sums[0] - 0.2257) <= 0.002, "family sum 0.2257 +- 0.002");
  });

  criterion(2, "table regression", 0.0, [&](Outcome& o) {
    o.require(d3.entries.size() == 27, "27 entries");
    double worst_zero = 0.0, worst_dev = 0.0;
    for (std::size_t t = 0; t < d3.entries.size() && t < 27; ++t) {
      const auto& r = d3.entries[t].result;
      if (kReference[t] == 0.0)
        worst_zero = std::max(worst_zero, r.epsilon);
      else
        worst_dev = std::max(worst_dev, std::abs(r.triple_sum - kReference[t]));
    }
    o.detail << " max zero-entry eps=" << fmt(worst_zero, 3) << " max deviation=" << fmt(worst_dev, 3);
    o.require(worst_zero < 1e-8, "zero entries below 1e-8");
    o.require(worst_dev <= 2e-3, "nonzero entries within 2e-3");
  });

  criterion(3, "bound calculator", 0.0, [&](Outcome& o) {
    for (std::size_t d : {4u, 10u}) {
      const auto r = theorem2_bound(d);
      const double err = std::abs(r.exact_bound - static_cast<double>(exact_ld(subdim_brute(d))));
      o.detail << " d=" << d << " err=" << fmt(err, 2);
      o.require(r.subdim_used == subdim_brute(d) && err <= 1e-12, "spot value d=" + std::to_string(d));
    }
    std::size_t bad = 0;
    for (std::size_t d = 4; d <= 1024; ++d) {
      const auto r = theorem2_bound(d);
      const double dp = static_cast<double>(r.subdim_used);
      if (r.subdim_used != subdim_brute(d) || !(r.exact_bound < 2.0 / dp) ||
          !(r.exact_bound < 4.0 / (static_cast<double>(d) - 1.0)) ||
          std::abs(r.exact_bound - static_cast<double>(exact_ld(dp))) > 1e-12)
        ++bad;
    }
    o.detail << " chain violations 4..1024=" << bad;
    o.require(bad == 0, "chains hold");
  });

  criterion(4, "noise threshold", 0.0, [&](Outcome& o) {
    const double t4 = noise_threshold(4);
    o.detail << " threshold(4)=" << fmt(t4, 8);
    o.require(std::abs(t4 - 0.0034) <= 1e-4, "0.0034 +- 1e-4");
    const std::array<std::size_t, 5> dims{4, 5, 7, 8, 9};
    for (std::size_t k = 1; k < dims.size(); ++k)
      o.require(noise_threshold(dims[k]) < noise_threshold(dims[k - 1]), "strictly decreasing");
  });

  criterion(5, "PP-incompatibility", 0.0, [&](Outcome& o) {
    for (std::size_t d : {4u, 5u, 7u}) {
      const double x = 1.0 / static_cast<double>(d);
      o.require(pp_incompatible({x, x, x}), "MUB triple d=" + std::to_string(d));
    }
    const double third = 1.0 / 3.0;
    o.require(!pp_incompatible({third, third, third}), "d=3 symmetric triple is compatible");
    const double edge = std::pow(0.75 - 1.0, 2) - 4.0 * 0.25 * 0.25 * 0.25;
    o.detail << " d=4 boundary residual=" << fmt(edge, 2);
    o.require(std::abs(edge) <= 1e-15, "d=4 equality");

    const auto f = generate_mub(4);
    int agree = 0, pp = 0;
    for (int t = 0; t < 100; ++t) {
      PureState a = random_state(4, 3 * t + 7000);
      PureState b = random_state(4, 3 * t + 7001);
      PureState c = random_state(4, 3 * t + 7002);
      if (t % 4 == 0) {
        a = f[1][t % 4];
        b = f[2][(t / 4) % 4];
        c = mix(f[3][(t / 8) % 4], a, 0.05 * (t % 40) / 4.0);
      }
      const bool predicate = pp_incompatible(triple_overlaps(a, b, c), kPredicateSlack);
      const auto r = find_conjugate_basis(a, b, c, {.restarts = 50, .seed = 9000u + t});
      if (predicate == (r.epsilon < kZeroEpsilon) && r.converged) ++agree;
      if (predicate) ++pp;
    }
    o.detail << " agreement " << agree << "/100 (" << pp << " incompatible)";
    o.require(agree == 100, "predicate matches search on all 100");
  });

  criterion(6, "Bonferroni suite", 60.0, [&](Outcome& o) {
    const auto r = random_inequality_suite(1000, 200, 50, 2024);
    o.detail << " min slack bonferroni=" << fmt(r.bonferroni_min_slack, 4)
             << " response=" << fmt(r.response_min_slack, 4);
    o.require(r.bonferroni_min_slack >= -1e-9, "bonferroni slack");
    o.require(r.response_min_slack >= -1e-9, "response bound slack");
  });

  criterion(7, "KS qubit model", 0.0, [&](Outcome& o) {
    const auto model = ks_model_d2();
    double born = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s)
      born = std::max(born, born_check(*model, random_state(2, 31000 + s),
                                       Measurement::from_basis(random_unitary(2, 32000 + s))));
    double gap = 0.0;
    std::vector<std::pair<PureState, PureState>> pairs;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const PureState a = random_state(2, 33000 + 2 * s), b = random_state(2, 33001 + 2 * s);
      gap = std::max(gap, std::abs(overlap_pair(*model, a, b) - omega_q_closed(a, b)));
      pairs.emplace_back(a, b);
    }
    const auto rep = verify_theorem1(*model, pairs);
    o.detail << " born=" << fmt(born, 2) << " |wC-wQ|=" << fmt(gap, 2)
             << " worst violation=" << fmt(rep.worst_violation, 2);
    o.require(born < 1e-6, "Born residual");
    o.require(gap < 1e-4, "maximally psi-epistemic");
    o.require(rep.worst_violation <= 1e-4, "theorem 1");
  });

  criterion(8, "simulator end-to-end d=4", 600.0, [&](Outcome& o) {
    const auto design = build_design(4, {.restarts = 32, .seed = 1});
    o.require(design.all_converged, "design converged");
    const std::uint64_t shots = 1'000'000;
    const double n = static_cast<double>(shots);

    NoiseConfig quiet;
    quiet.shots = shots;
    quiet.seed = 1;
    const auto s0 = aggregate_eps(run_experiment(design, quiet), design);
    const double exact = 0.25 * (1.0 + std::sqrt(0.75));
    // Binomial spread of k with every probability floored at 1/shots.
    const double sigma_k = std::sqrt(3.0 * static_cast<double>(design.triples.size()) / (n * n)) /
                           design.overlap_weight_sum;
    const double k0 = experimental_k_bound(s0);
    o.detail << " noiseless k=" << fmt(k0, 9) << " (exact " << fmt(exact, 9) << ")";
    o.require(std::abs(k0 - exact) <= 5.0 * sigma_k, "noiseless k within 5 sigma");

    const double p = 0.002;
    NoiseConfig dep = quiet;
    dep.channel = NoiseConfig::Channel::Depolarizing;
    dep.parameter = p;
    dep.seed = 2;
    const auto s = aggregate_eps(run_experiment(design, dep), design);
    // Oracle: (1 - p) Born + p / 3 on conjugate outcomes, p / d on basis outcomes.
    double e1 = 0.0, v1 = 0.0;
    for (const auto& t : design.triples) {
      const PureState* preps[3] = {&design.families[t.alpha - 1][t.i - 1],
                                   &design.families[t.beta - 1][t.j - 1], &design.c};
      for (std::size_t r = 0; r < 3; ++r) {
        double in = 0.0, pk = 0.0;
        for (std::size_t q = 0; q < 3; ++q) {
          const double b = std::norm(inner(t.measurement.effect(q).span[0], preps[r]->amplitudes()));
          in += b;
          if (q == r) pk = b;
        }
        const double q = (1.0 - p) * pk / in + p / 3.0;
        e1 += q / 3.0;
        v1 += q * (1.0 - q) / n / 9.0;
      }
    }
    const double nt = static_cast<double>(design.triples.size());
    e1 /= nt;
    v1 /= nt * nt;
    const double e2 = p / 4.0;
    const double np = 24.0;
    const double v2 = 0.5 * e2 * (1.0 - e2) / n / np;
    const double k = experimental_k_bound(s);
    o.detail << " eps1=" << fmt(s.eps1) << " (oracle " << fmt(e1) << ") eps2=" << fmt(s.eps2)
             << " (oracle " << fmt(e2) << ") k=" << fmt(k);
    o.require(std::abs(s.eps1 - e1) <= 5.0 * std::sqrt(v1), "eps1 within 5 sigma");
    o.require(std::abs(s.eps2 - e2) <= 5.0 * std::sqrt(v2), "eps2 within 5 sigma");
    o.require(k < 1.0, "noisy bound below 1");
  });

  criterion(9, "CLI determinism", 0.0, [&](Outcome& o) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("epi_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string cli = EPI_CLI_PATH;
    const std::string data = EPI_DATA_DIR;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"mub", "mub --dim 9"},
        {"pp-check", "pp-check --states " + data + "/mub_triple_d4.json --restarts 32"},
        {"bound", "bound --dim 12 --eps1 0.0001 --eps2 0.0002"},
        {"threshold", "bound --threshold --dim 5"},
        {"d3", "d3 --restarts 64"},
        {"model", "model verify --model ks2 --pairs 50"},
        {"model-file", "model verify --model " + data + "/psi_ontic_qubits.json"},
        {"simulate", "simulate --dim 4 --noise depolarizing:0.002 --shots 100000 --restarts 8"},
        {"bonferroni", "bonferroni"},
    };
    int identical = 0;
    for (const auto& [name, args] : commands) {
      std::vector<std::string> outputs;
      for (const char* threads : {"1", "1", "3"}) {
        const fs::path out = dir / (name + "_" + std::to_string(outputs.size()) + ".json");
        const std::string cmd = "\"" + cli + "\" " + args + " --seed 42 --threads " + threads +
                                " --out \"" + out.string() + "\" > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        o.require(rc == 0, name + " exit status");
        outputs.push_back(slurp(out));
      }
      if (!outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2]) ++identical;
      else o.require(false, name + " output differs");
    }
    fs::remove_all(dir);
    o.detail << " " << identical << "/" << commands.size()
             << " commands byte-identical across reruns and thread counts";
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}
