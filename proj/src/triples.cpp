#include "epistemic/triples.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "epistemic/config.hpp"
#include "epistemic/error.hpp"
#include "epistemic/parallel.hpp"
#include "epistemic/rng.hpp"

namespace epi {

namespace {

using M3 = Eigen::Matrix3cd;

// exp(iH) for the zero-diagonal Hermitian H encoded by six reals.
M3 chart_unitary(std::span<const double> p) {
  const cplx h01(p[0], p[1]), h02(p[2], p[3]), h12(p[4], p[5]);
  M3 h;
  h << 0.0, h01, h02, std::conj(h01), 0.0, h12, std::conj(h02), std::conj(h12), 0.0;
  return (cplx(0.0, 1.0) * h).exp();
}

// Coordinates of the three states in a fixed orthonormal frame of their span.
struct Frame {
  std::vector<CVector> axes;          // 3 orthonormal vectors of C^d
  std::array<std::array<cplx, 3>, 3> coords;  // coords[k] = frame coordinates of state k
};

Frame make_frame(const PureState& a, const PureState& b, const PureState& c) {
  require(a.dim() == b.dim() && b.dim() == c.dim(), ErrorCode::DimensionMismatch,
          "triple states have different dimensions");
  const std::vector<CVector> v{a.vector(), b.vector(), c.vector()};
  auto q = gram_schmidt(v, kTolerances.rank);
  require(q.has_value(), ErrorCode::DegenerateSpan,
          "triple spans fewer than three dimensions");
  Frame f;
  f.axes = std::move(*q);
  for (int k = 0; k < 3; ++k)
    for (int r = 0; r < 3; ++r) f.coords[k][r] = inner(f.axes[r], v[k]);
  return f;
}

// Sum_k |<u_k|s_k>|^2 where u_k is column k of U = frame * v.
double triple_sum_in_frame(const M3& u, const std::array<std::array<cplx, 3>, 3>& s) {
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    cplx amp = 0.0;
    for (int r = 0; r < 3; ++r) amp += std::conj(u(r, k)) * s[k][r];
    total += std::norm(amp);
  }
  return total;
}

M3 random_frame(std::uint64_t seed) {
  const CMatrix q = random_unitary_matrix(3, seed);
  M3 u;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) u(r, c) = q(r, c);
  return u;
}

struct RestartOutcome {
  M3 u = M3::Identity();
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
};

RestartOutcome run_restart(const Frame& frame, std::uint64_t seed,
                           const ConjugateSearchOptions& options) {
  RestartOutcome out;
  out.u = random_frame(seed);
  out.value = triple_sum_in_frame(out.u, frame.coords);
  NelderMeadOptions local = options.local;
  for (int round = 0; round < options.max_rounds; ++round) {
    const M3 base = out.u;
    auto objective = [&](std::span<const double> p) {
      return triple_sum_in_frame(base * chart_unitary(p), frame.coords);
    };
    const auto r = nelder_mead(objective, std::vector<double>(6, 0.0), local);
    const double previous = out.value;
    if (r.value <= out.value) {
      out.u = base * chart_unitary(r.x);
      out.value = r.value;
    }
    out.converged = r.converged;
    if (previous - out.value <= 1e-16 + 1e-12 * out.value) break;
    local.initial_step = std::min(local.initial_step, 0.1);
  }
  return out;
}

}  // namespace

TripleOverlaps triple_overlaps(const PureState& a, const PureState& b, const PureState& c) {
  make_frame(a, b, c);  // rank check
  return {fidelity(a, b), fidelity(b, c), fidelity(c, a)};
}

bool pp_incompatible(const TripleOverlaps& x, double slack) {
  const double s = x.sum();
  return s < 1.0 && (s - 1.0) * (s - 1.0) >= 4.0 * x.x1 * x.x2 * x.x3 - slack;
}

double conjugate_epsilon(const PureState& a, const PureState& b, const PureState& c,
                         const OrthonormalBasis& basis) {
  require(basis.size() >= 3, ErrorCode::InvalidArgument, "conjugate basis needs three vectors");
  return (born_probability(basis[0], a) + born_probability(basis[1], b) +
          born_probability(basis[2], c)) /
         3.0;
}

ConjugateBasisResult find_conjugate_basis(const PureState& a, const PureState& b,
                                          const PureState& c,
                                          const ConjugateSearchOptions& options) {
  require(options.restarts >= 1, ErrorCode::InvalidArgument, "need at least one restart");
  const Frame frame = make_frame(a, b, c);

  std::vector<RestartOutcome> runs(options.restarts);
  parallel_for(options.restarts, options.threads, [&](std::size_t r) {
    runs[r] = run_restart(frame, sub_seed(options.seed, StreamTag::Restart, r), options);
  });

  // Lowest value wins; ties go to the lowest restart index.
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].value < runs[best].value) best = r;
  const double best_sum = runs[best].value;

  std::vector<PureState> f;
  for (int k = 0; k < 3; ++k) {
    CVector v(a.dim());
    for (int r = 0; r < 3; ++r)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += runs[best].u(r, k) * frame.axes[r][i];
    f.push_back(PureState::normalized(std::move(v)));
  }

  ConjugateBasisResult out{.basis = OrthonormalBasis(std::move(f)), .restart_values = {}};
  out.epsilon = best_sum / 3.0;
  out.triple_sum = best_sum;
  out.restarts_used = options.restarts;
  out.pp_incompatible = pp_incompatible({fidelity(a, b), fidelity(b, c), fidelity(c, a)},
                                        kPredicateSlack);
  for (const auto& r : runs) {
    out.restart_values.push_back(r.value / 3.0);
    if (std::abs(r.value - best_sum) / 3.0 <= 1e-9 + 1e-6 * out.epsilon) ++out.agreeing_restarts;
  }
  out.converged = runs[best].converged;
  if (out.pp_incompatible) {
    out.converged = out.epsilon < kZeroEpsilon;
  } else if (options.restarts > 1) {
    out.converged = out.converged && out.agreeing_restarts >= 2;
  }
  return out;
}

Measurement full_measurement(const ConjugateBasisResult& result, std::size_t d) {
  require(d >= 3, ErrorCode::InvalidArgument, "full measurement needs d >= 3");
  require(result.basis.dim() == d, ErrorCode::DimensionMismatch,
          "conjugate basis lives in dimension " + std::to_string(result.basis.dim()));
  std::vector<Measurement::Effect> effects;
  std::vector<CVector> f;
  for (int k = 0; k < 3; ++k) {
    f.push_back(result.basis[k].vector());
    effects.push_back({"f" + std::to_string(k + 1), {f.back()}});
  }
  if (d > 3) effects.push_back({"f4", orthonormal_complement(f, d)});
  return Measurement(d, std::move(effects), true);
}

}  // namespace epi
