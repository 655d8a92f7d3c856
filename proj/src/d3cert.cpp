#include "epistemic/d3cert.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "epistemic/error.hpp"
#include "epistemic/parallel.hpp"
#include "epistemic/rng.hpp"

namespace epi {

namespace {

OrthonormalBasis basis3(std::initializer_list<CVector> rows) {
  std::vector<PureState> v;
  for (const auto& r : rows) v.push_back(PureState::normalized(r));
  return OrthonormalBasis(std::move(v));
}

constexpr std::array<std::array<int, 2>, 3> kFamilies{{{1, 2}, {1, 3}, {2, 3}}};

}  // namespace

D3Instance canonical_states() {
  const cplx w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  const cplx w2 = w * w;
  const CVector c_literal{{-0.374, -0.236}, {0.778, -0.071}, {0.018, -0.441}};
  return D3Instance{
      {basis3({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}),
       basis3({{1.0, 1.0, w2}, {1.0, w2, 1.0}, {1.0, w, w}}),
       basis3({{1.0, w, w2}, {1.0, 1.0, 1.0}, {1.0, w2, w}})},
      PureState::normalized(c_literal),
      norm(c_literal)};
}

EpsilonValue quantum_epsilon(const PureState& e_alpha_i, const PureState& e_beta_j,
                             const PureState& c, const OrthonormalBasis& basis) {
  require(basis.dim() == 3 && basis.size() == 3, ErrorCode::InvalidArgument,
          "quantum_epsilon needs a full orthonormal basis of C^3");
  for (std::size_t k = 0; k < 3; ++k)
    require(std::abs(norm(basis[k].amplitudes()) - 1.0) < kTolerances.orthogonality,
            ErrorCode::InvalidArgument, "basis vector is not normalized");
  const double eps = conjugate_epsilon(e_alpha_i, e_beta_j, c, basis);
  return {eps, 3.0 * eps};
}

CertificateReport optimize_all_triples(const D3Instance& instance, std::size_t restarts,
                                       std::uint64_t seed, unsigned threads) {
  require(restarts >= 1, ErrorCode::InvalidArgument, "restarts must be >= 1");
  struct Job {
    int alpha, beta, i, j;
  };
  std::vector<Job> jobs;
  for (const auto& fam : kFamilies)
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) jobs.push_back({fam[0], fam[1], i, j});

  std::vector<std::optional<ConjugateBasisResult>> results(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t t) {
    const auto& job = jobs[t];
    ConjugateSearchOptions opts;
    opts.restarts = restarts;
    opts.seed = sub_seed(seed, StreamTag::Trial, t);
    opts.threads = 1;
    results[t] = find_conjugate_basis(instance.bases[job.alpha - 1][job.i - 1],
                                      instance.bases[job.beta - 1][job.j - 1], instance.c, opts);
  });

  CertificateReport report;
  report.restarts = restarts;
  report.seed = seed;
  report.all_converged = true;
  for (std::size_t t = 0; t < jobs.size(); ++t) {
    const auto& job = jobs[t];
    report.entries.push_back({job.alpha, job.beta, job.i, job.j, std::move(*results[t])});
    const auto& r = report.entries.back().result;
    report.family_sums[t / 9] += r.triple_sum;
    report.grand_noise_sum += r.triple_sum;
    report.all_converged = report.all_converged && r.converged;
  }
  report.overlap_weight_sum = overlap_weight_sum(instance);
  report.k_bound = certify_k(report.grand_noise_sum, report.overlap_weight_sum);
  return report;
}

double overlap_weight_sum(const D3Instance& instance) {
  double total = 0.0;
  for (const auto& basis : instance.bases)
    for (const auto& e : basis.vectors()) total += quantum_overlap(e, instance.c);
  return total;
}

double certify_k(double grand_noise_sum, double overlap_weight_sum) {
  require(std::isfinite(grand_noise_sum) && std::isfinite(overlap_weight_sum) &&
              overlap_weight_sum > 0.0,
          ErrorCode::InvalidArgument, "k bound needs a finite positive overlap weight sum");
  return (1.0 + grand_noise_sum) / overlap_weight_sum;
}

double certify_k(const CertificateReport& report) {
  for (const auto& e : report.entries)
    require(e.result.converged, ErrorCode::Precondition,
            "triple (" + std::to_string(e.alpha) + "," + std::to_string(e.beta) + "; " +
                std::to_string(e.i) + "," + std::to_string(e.j) + ") did not converge");
  return certify_k(report.grand_noise_sum, report.overlap_weight_sum);
}

}  // namespace epi
