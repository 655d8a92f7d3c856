#include "epistemic/expsim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "epistemic/d3cert.hpp"
#include "epistemic/error.hpp"
#include "epistemic/mub.hpp"
#include "epistemic/parallel.hpp"
#include "epistemic/rng.hpp"

namespace epi {

namespace {

std::string vector_label(int alpha, int i) {
  return "e" + std::to_string(alpha) + "_" + std::to_string(i);
}

std::string triple_label(const DesignTriple& t) {
  return "T" + std::to_string(t.alpha) + std::to_string(t.beta) + "_" + std::to_string(t.i) +
         std::to_string(t.j);
}

std::string family_label(int alpha) { return "B" + std::to_string(alpha); }

// Small random unitary exp(-i sigma H), H with standard Gaussian entries.
CMatrix misalignment_unitary(std::size_t d, double sigma, Rng& rng) {
  std::normal_distribution<double> gauss;
  CMatrix h(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    h(r, r) = gauss(rng);
    for (std::size_t c = r + 1; c < d; ++c) {
      const cplx z(gauss(rng) / std::sqrt(2.0), gauss(rng) / std::sqrt(2.0));
      h(r, c) = z;
      h(c, r) = std::conj(z);
    }
  }
  return expm(cplx(0.0, -sigma) * h);
}

// Multinomial draw as a chain of conditional binomials.
std::vector<std::uint64_t> sample_counts(const std::vector<double>& probs, std::uint64_t shots,
                                         Rng& rng) {
  std::vector<std::uint64_t> counts(probs.size(), 0);
  std::uint64_t left = shots;
  double mass = 1.0;
  for (std::size_t k = 0; k + 1 < probs.size() && left > 0; ++k) {
    const double q = mass > 0.0 ? std::clamp(probs[k] / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::uint64_t> draw(left, q);
    counts[k] = draw(rng);
    left -= counts[k];
    mass -= probs[k];
  }
  counts.back() += left;
  return counts;
}

struct Plan {
  const PureState* state;
  const Measurement* measurement;
  std::string preparation;
  std::string measurement_label;
  bool conjugate;  // restrict to f1..f3
};

std::vector<Plan> plan_settings(const ExperimentDesign& design,
                                const std::vector<Measurement>& family_measurements) {
  std::vector<Plan> plans;
  for (const auto& t : design.triples) {
    const auto& a = design.families[t.alpha - 1][t.i - 1];
    const auto& b = design.families[t.beta - 1][t.j - 1];
    const std::string m = triple_label(t);
    plans.push_back({&a, &t.measurement, vector_label(t.alpha, t.i), m, true});
    plans.push_back({&b, &t.measurement, vector_label(t.beta, t.j), m, true});
    plans.push_back({&design.c, &t.measurement, "c", m, true});
  }
  for (std::size_t alpha = 0; alpha < design.families.size(); ++alpha)
    for (std::size_t i = 0; i < design.families[alpha].size(); ++i)
      plans.push_back({&design.families[alpha][i], &family_measurements[alpha],
                       vector_label(static_cast<int>(alpha + 1), static_cast<int>(i + 1)),
                       family_label(static_cast<int>(alpha + 1)), false});
  return plans;
}

std::vector<Measurement> family_measurements(const ExperimentDesign& design) {
  std::vector<Measurement> out;
  for (const auto& basis : design.families) out.push_back(Measurement::from_basis(basis));
  return out;
}

}  // namespace

void validate(const NoiseConfig& noise) {
  require(noise.shots >= 1, ErrorCode::InvalidArgument, "shots must be >= 1");
  require(std::isfinite(noise.parameter), ErrorCode::InvalidArgument,
          "noise parameter must be finite");
  if (noise.channel == NoiseConfig::Channel::Depolarizing)
    require(noise.parameter >= 0.0 && noise.parameter <= 1.0, ErrorCode::InvalidArgument,
            "depolarizing p must lie in [0, 1]");
  if (noise.channel == NoiseConfig::Channel::Misalignment)
    require(noise.parameter >= 0.0, ErrorCode::InvalidArgument,
            "misalignment sigma must be >= 0");
}

NoiseConfig::Channel parse_channel(const std::string& spec, double& parameter) {
  parameter = 0.0;
  if (spec == "none") return NoiseConfig::Channel::None;
  const auto colon = spec.find(':');
  require(colon != std::string::npos, ErrorCode::Parse,
          "noise must be none, depolarizing:p or misalignment:sigma, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string value = spec.substr(colon + 1);
  std::size_t used = 0;
  try {
    parameter = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == value.size() && !value.empty(), ErrorCode::Parse,
          "bad noise parameter '" + value + "'");
  if (kind == "depolarizing") return NoiseConfig::Channel::Depolarizing;
  if (kind == "misalignment") return NoiseConfig::Channel::Misalignment;
  fail(ErrorCode::Parse, "unknown noise channel '" + kind + "'");
}

std::string channel_name(NoiseConfig::Channel channel) {
  switch (channel) {
    case NoiseConfig::Channel::None:
      return "none";
    case NoiseConfig::Channel::Depolarizing:
      return "depolarizing";
    case NoiseConfig::Channel::Misalignment:
      return "misalignment";
  }
  return "none";
}

ExperimentDesign build_design(std::size_t dim, const DesignOptions& options) {
  ExperimentDesign design;
  design.dim = dim;
  if (dim == 3) {
    const D3Instance inst = canonical_states();
    design.c = inst.c;
    design.families.assign(inst.bases.begin(), inst.bases.end());
  } else {
    require(dim >= 4 && mub_dimension_supported(dim), ErrorCode::UnsupportedDimension,
            "experiment designs exist for d = 3 and MUB dimensions >= 4 (4, 5, 7, 8, 9, "
            "odd primes), got " + std::to_string(dim));
    const MubFamily mubs = generate_mub(dim);
    design.c = mubs[0][0];
    design.families.assign(mubs.bases().begin() + 1, mubs.bases().end());
  }

  struct Job {
    int alpha, beta, i, j;
  };
  std::vector<Job> jobs;
  const int m = static_cast<int>(design.families.size());
  const int n = static_cast<int>(dim);
  for (int a = 1; a <= m; ++a)
    for (int b = a + 1; b <= m; ++b)
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) jobs.push_back({a, b, i, j});

  std::vector<std::optional<ConjugateBasisResult>> results(jobs.size());
  parallel_for(jobs.size(), options.threads, [&](std::size_t t) {
    const Job& job = jobs[t];
    ConjugateSearchOptions search;
    search.restarts = options.restarts;
    search.seed = sub_seed(options.seed, StreamTag::Trial, t);
    results[t] = find_conjugate_basis(design.families[job.alpha - 1][job.i - 1],
                                      design.families[job.beta - 1][job.j - 1], design.c,
                                      search);
  });

  design.all_converged = true;
  for (std::size_t t = 0; t < jobs.size(); ++t) {
    const Job& job = jobs[t];
    const auto& r = *results[t];
    design.triples.push_back(
        {job.alpha, job.beta, job.i, job.j, full_measurement(r, dim), r.epsilon, r.converged});
    design.all_converged = design.all_converged && r.converged;
  }
  for (const auto& basis : design.families)
    for (const auto& e : basis.vectors()) design.overlap_weight_sum += quantum_overlap(design.c, e);
  return design;
}

double SettingCounts::frequency(std::size_t k) const {
  return shots == 0 ? 0.0 : static_cast<double>(counts[k]) / static_cast<double>(shots);
}

FrequencyTable run_experiment(const ExperimentDesign& design, const NoiseConfig& noise,
                              unsigned threads) {
  validate(noise);
  require(!design.triples.empty(), ErrorCode::Precondition, "design has no triples");
  for (const auto& t : design.triples)
    require(t.converged, ErrorCode::Precondition,
            "conjugate basis for " + triple_label(t) + " did not converge");

  const auto families = family_measurements(design);
  const auto plans = plan_settings(design, families);
  FrequencyTable table;
  table.dim = design.dim;
  table.shots = noise.shots;
  table.settings.resize(plans.size());

  const std::uint64_t sample_seed = sub_seed(noise.seed, StreamTag::Setting);
  const std::uint64_t rotate_seed = sub_seed(noise.seed, StreamTag::Misalignment);
  parallel_for(plans.size(), threads, [&](std::size_t s) {
    const Plan& plan = plans[s];
    const PureState* prepared = plan.state;
    PureState rotated = *plan.state;
    if (noise.channel == NoiseConfig::Channel::Misalignment) {
      Rng rng = make_stream(rotate_seed, s);
      const CMatrix u = misalignment_unitary(design.dim, noise.parameter, rng);
      rotated = PureState::normalized(u * plan.state->vector());
      prepared = &rotated;
    }

    std::vector<double> probs = plan.measurement->probabilities(*prepared);
    SettingCounts out;
    out.preparation = plan.preparation;
    out.measurement = plan.measurement_label;
    out.shots = noise.shots;
    std::size_t kept = probs.size();
    if (plan.conjugate) {
      kept = 3;
      double inside = probs[0] + probs[1] + probs[2];
      out.f4_mass = std::max(0.0, 1.0 - inside);
      if (inside <= 0.0) {
        probs.assign(3, 1.0 / 3.0);
        inside = 1.0;
      }
      probs.resize(3);
      for (double& p : probs) p /= inside;
    }
    if (noise.channel == NoiseConfig::Channel::Depolarizing)
      for (double& p : probs)
        p = (1.0 - noise.parameter) * p + noise.parameter / static_cast<double>(kept);
    for (std::size_t k = 0; k < kept; ++k) out.outcomes.push_back(plan.measurement->effect(k).label);

    Rng rng = make_stream(sample_seed, s);
    out.counts = sample_counts(probs, noise.shots, rng);
    table.settings[s] = std::move(out);
  });
  return table;
}

NoiseSummary aggregate_eps(const FrequencyTable& table, const ExperimentDesign& design) {
  const auto families = family_measurements(design);
  const auto plans = plan_settings(design, families);
  require(table.settings.size() == plans.size(), ErrorCode::Precondition,
          "table has " + std::to_string(table.settings.size()) + " settings, design needs " +
              std::to_string(plans.size()));
  for (std::size_t s = 0; s < plans.size(); ++s) {
    const auto& row = table.settings[s];
    const std::size_t want = plans[s].conjugate ? 3 : plans[s].measurement->outcomes();
    require(row.preparation == plans[s].preparation &&
                row.measurement == plans[s].measurement_label && row.counts.size() == want &&
                row.shots > 0,
            ErrorCode::Precondition,
            "setting " + std::to_string(s) + " does not match the design (" +
                plans[s].preparation + " in " + plans[s].measurement_label + ")");
  }

  NoiseSummary out;
  out.dim = design.dim;
  out.overlap_weight_sum = design.overlap_weight_sum;
  for (const auto& row : table.settings) out.max_f4_mass = std::max(out.max_f4_mass, row.f4_mass);

  for (std::size_t t = 0; t < design.triples.size(); ++t) {
    const auto& d = design.triples[t];
    const double r = table.settings[3 * t].frequency(0) + table.settings[3 * t + 1].frequency(1) +
                     table.settings[3 * t + 2].frequency(2);
    out.triples.push_back({d.alpha, d.beta, d.i, d.j, r / 3.0});
    out.eps1 += r / 3.0;
  }

  std::size_t base = 3 * design.triples.size();
  for (std::size_t alpha = 0; alpha < design.families.size(); ++alpha) {
    const std::size_t n = design.families[alpha].size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double e =
            0.5 * (table.settings[base + i].frequency(j) + table.settings[base + j].frequency(i));
        out.pairs.push_back({static_cast<int>(alpha + 1), static_cast<int>(i + 1),
                             static_cast<int>(j + 1), e});
        out.eps2 += e;
      }
    base += n;
  }
  if (!out.triples.empty()) out.eps1 /= static_cast<double>(out.triples.size());
  if (!out.pairs.empty()) out.eps2 /= static_cast<double>(out.pairs.size());
  return out;
}

double experimental_k_bound(const NoiseSummary& summary) {
  double total = 1.0;
  for (const auto& t : summary.triples) total += 3.0 * t.epsilon;
  for (const auto& p : summary.pairs) total += 2.0 * p.epsilon;
  return certify_k(total - 1.0, summary.overlap_weight_sum);
}

}  // namespace epi
