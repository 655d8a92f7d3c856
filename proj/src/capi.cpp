#include "epistemic/epistemic.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "json.hpp"

#include "epistemic/bounds.hpp"
#include "epistemic/d3cert.hpp"
#include "epistemic/error.hpp"
#include "epistemic/expsim.hpp"
#include "epistemic/mub.hpp"
#include "epistemic/ontomodel.hpp"
#include "epistemic/qstate.hpp"
#include "epistemic/rng.hpp"
#include "epistemic/triples.hpp"

#ifndef EPI_VERSION
#define EPI_VERSION "0.0.0"
#endif

struct epi_state {
  epi::PureState value;
};

struct epi_mub {
  epi::MubFamily value;
};

struct epi_model {
  std::unique_ptr<epi::OntologicalModel> value;
};

struct epi_design {
  epi::ExperimentDesign value;
  std::size_t restarts = 0;
  std::uint64_t seed = 0;
};

namespace {

using nlohmann::json;

thread_local std::string last_error;

epi_status to_status(epi::ErrorCode code) {
  return static_cast<epi_status>(static_cast<int>(code));
}

template <class Fn>
epi_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const epi::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    last_error = e.what();
    return EPI_PARSE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return EPI_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return EPI_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  epi::require(p != nullptr, epi::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char* copy_out(const json& j) {
  const std::string text = j.dump(2);
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

json state_json(const epi::PureState& s) {
  json amps = json::array();
  for (const auto& z : s.amplitudes()) amps.push_back({z.real(), z.imag()});
  return {{"dim", s.dim()}, {"amplitudes", amps}};
}

epi::PureState state_from(const json& j) {
  const auto& amps = j.at("amplitudes");
  epi::CVector v;
  for (const auto& z : amps) {
    epi::require(z.is_array() && z.size() == 2, epi::ErrorCode::Parse,
                 "amplitudes must be [re, im] pairs");
    v.emplace_back(z[0].get<double>(), z[1].get<double>());
  }
  if (j.contains("dim"))
    epi::require(j.at("dim").get<std::size_t>() == v.size(), epi::ErrorCode::Parse,
                 "dim does not match the amplitude count");
  epi::require(v.size() >= 2, epi::ErrorCode::Parse, "a state needs at least 2 amplitudes");
  return epi::PureState::normalized(std::move(v));
}

json basis_json(const epi::OrthonormalBasis& b) {
  json out = json::array();
  for (const auto& v : b.vectors()) out.push_back(state_json(v));
  return out;
}

json bound_json(const epi::KBoundReport& r) {
  json j{{"dim", r.dim},
         {"subdim_used", r.subdim_used},
         {"exact_bound", r.exact_bound},
         {"coarse_bound_subdim", r.coarse_bound_subdim},
         {"coarse_bound_dim", r.coarse_bound_dim}};
  if (r.eps1) {
    j["eps1"] = *r.eps1;
    j["eps2"] = *r.eps2;
    j["noise_adjusted"] = *r.noise_adjusted;
    j["noise_adjusted_coarse"] = *r.noise_adjusted_coarse;
    j["threshold_ok"] = *r.threshold_ok;
  }
  return j;
}

json space_json(const epi::OnticSpace& s) {
  if (s.kind() == epi::OnticSpace::Kind::Sphere) return {{"kind", "sphere"}, {"order", s.order()}};
  return {{"kind", "discrete"}, {"points", s.points()}};
}

}  // namespace

extern "C" {

const char* epi_version(void) { return EPI_VERSION; }

const char* epi_last_error(void) { return last_error.c_str(); }

const char* epi_status_name(epi_status status) {
  switch (status) {
    case EPI_OK: return "ok";
    case EPI_INVALID_ARGUMENT: return "invalid argument";
    case EPI_DIMENSION_MISMATCH: return "dimension mismatch";
    case EPI_UNSUPPORTED_DIMENSION: return "unsupported dimension";
    case EPI_DEGENERATE_SPAN: return "degenerate span";
    case EPI_NOT_CONVERGED: return "not converged";
    case EPI_PRECONDITION: return "precondition failed";
    case EPI_IO: return "i/o error";
    case EPI_PARSE: return "parse error";
    case EPI_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void epi_string_free(char* s) { std::free(s); }

epi_status epi_state_create(size_t dim, const double* re_im, epi_state** out) {
  return guarded([&] {
    need(re_im, "re_im");
    need(out, "out");
    epi::CVector v(dim);
    for (size_t k = 0; k < dim; ++k) v[k] = {re_im[2 * k], re_im[2 * k + 1]};
    epi::require(dim >= 2, epi::ErrorCode::InvalidArgument, "a state needs dim >= 2");
    *out = new epi_state{epi::PureState::normalized(std::move(v))};
    return EPI_OK;
  });
}

epi_status epi_state_from_json(const char* text, epi_state** out) {
  return guarded([&] {
    need(text, "json");
    need(out, "out");
    *out = new epi_state{state_from(json::parse(text))};
    return EPI_OK;
  });
}

epi_status epi_state_to_json(const epi_state* state, char** out) {
  return guarded([&] {
    need(state, "state");
    need(out, "out");
    *out = copy_out(state_json(state->value));
    return EPI_OK;
  });
}

epi_status epi_state_dim(const epi_state* state, size_t* dim) {
  return guarded([&] {
    need(state, "state");
    need(dim, "dim");
    *dim = state->value.dim();
    return EPI_OK;
  });
}

epi_status epi_state_fidelity(const epi_state* a, const epi_state* b, double* out) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    epi::require(a->value.dim() == b->value.dim(), epi::ErrorCode::DimensionMismatch,
                 "states live in different dimensions");
    *out = epi::fidelity(a->value, b->value);
    return EPI_OK;
  });
}

void epi_state_free(epi_state* state) { delete state; }

epi_status epi_mub_generate(size_t dim, epi_mub** out) {
  return guarded([&] {
    need(out, "out");
    *out = new epi_mub{epi::generate_mub(dim)};
    return EPI_OK;
  });
}

epi_status epi_mub_shape(const epi_mub* mub, size_t* dim, size_t* bases) {
  return guarded([&] {
    need(mub, "mub");
    if (dim) *dim = mub->value.dim();
    if (bases) *bases = mub->value.size();
    return EPI_OK;
  });
}

epi_status epi_mub_vector(const epi_mub* mub, size_t gamma, size_t k, epi_state** out) {
  return guarded([&] {
    need(mub, "mub");
    need(out, "out");
    epi::require(gamma < mub->value.size() && k < mub->value[gamma].size(),
                 epi::ErrorCode::InvalidArgument, "basis or vector index out of range");
    *out = new epi_state{mub->value[gamma][k]};
    return EPI_OK;
  });
}

epi_status epi_mub_to_json(const epi_mub* mub, char** out) {
  return guarded([&] {
    need(mub, "mub");
    need(out, "out");
    const auto& fam = mub->value;
    json bases = json::array();
    for (const auto& b : fam.bases()) bases.push_back(basis_json(b));
    const auto rep = epi::verify_mub(fam);
    *out = copy_out({{"dim", fam.dim()},
                     {"subdim", fam.subdim()},
                     {"bases", bases},
                     {"verification",
                      {{"max_cross_deviation", rep.max_cross_deviation},
                       {"max_orthonormality_deviation", rep.max_orthonormality_deviation},
                       {"ok", rep.ok}}}});
    return EPI_OK;
  });
}

void epi_mub_free(epi_mub* mub) { delete mub; }

epi_status epi_pp_incompatible(double x1, double x2, double x3, double slack, int* out) {
  return guarded([&] {
    need(out, "out");
    for (double x : {x1, x2, x3})
      epi::require(x >= 0.0 && x <= 1.0, epi::ErrorCode::InvalidArgument,
                   "overlaps must lie in [0, 1]");
    *out = epi::pp_incompatible({x1, x2, x3}, slack) ? 1 : 0;
    return EPI_OK;
  });
}

epi_status epi_pp_check_json(const epi_state* a, const epi_state* b, const epi_state* c,
                             size_t restarts, uint64_t seed, unsigned threads, char** out) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(c, "c");
    need(out, "out");
    const auto x = epi::triple_overlaps(a->value, b->value, c->value);
    epi::ConjugateSearchOptions opts;
    opts.restarts = restarts;
    opts.seed = seed;
    opts.threads = threads;
    const auto r = epi::find_conjugate_basis(a->value, b->value, c->value, opts);
    *out = copy_out({{"x1", x.x1},
                     {"x2", x.x2},
                     {"x3", x.x3},
                     {"pp_incompatible", epi::pp_incompatible(x, epi::kPredicateSlack)},
                     {"epsilon", r.epsilon},
                     {"triple_sum", r.triple_sum},
                     {"converged", r.converged},
                     {"restarts", r.restarts_used},
                     {"agreeing_restarts", r.agreeing_restarts},
                     {"seed", seed},
                     {"basis", basis_json(r.basis)}});
    if (!r.converged) {
      last_error = "conjugate basis search did not converge";
      return EPI_NOT_CONVERGED;
    }
    return EPI_OK;
  });
}

epi_status epi_bound_json(size_t dim, int with_noise, double eps1, double eps2, char** out) {
  return guarded([&] {
    need(out, "out");
    const auto r = with_noise ? epi::theorem2_bound(dim, eps1, eps2) : epi::theorem2_bound(dim);
    *out = copy_out(bound_json(r));
    return EPI_OK;
  });
}

epi_status epi_noise_threshold(size_t dim, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = epi::noise_threshold(dim);
    return EPI_OK;
  });
}

epi_status epi_threshold_json(size_t dim, char** out) {
  return guarded([&] {
    need(out, "out");
    const double t = epi::noise_threshold(dim);
    const auto at = epi::noisy_bound(dim, t, t);
    *out = copy_out({{"dim", dim},
                     {"threshold", t},
                     {"tight_bound_at_threshold", at.tight},
                     {"coarse_bound_at_threshold", at.coarse},
                     {"noiseless_bound", epi::theorem2_bound(dim).exact_bound}});
    return EPI_OK;
  });
}

epi_status epi_d3_certificate_json(size_t restarts, uint64_t seed, unsigned threads, char** out) {
  return guarded([&] {
    need(out, "out");
    epi::require(restarts >= 1, epi::ErrorCode::InvalidArgument, "restarts must be >= 1");
    const auto inst = epi::canonical_states();
    const auto r = epi::optimize_all_triples(inst, restarts, seed, threads);
    json bases = json::array();
    for (const auto& b : inst.bases) bases.push_back(basis_json(b));
    json entries = json::array();
    for (const auto& e : r.entries)
      entries.push_back({{"alpha", e.alpha},
                         {"beta", e.beta},
                         {"i", e.i},
                         {"j", e.j},
                         {"epsilon", e.result.epsilon},
                         {"triple_sum", e.result.triple_sum},
                         {"pp_incompatible", e.result.pp_incompatible},
                         {"converged", e.result.converged},
                         {"agreeing_restarts", e.result.agreeing_restarts},
                         {"basis", basis_json(e.result.basis)}});
    *out = copy_out({{"restarts", r.restarts},
                     {"seed", r.seed},
                     {"c", state_json(inst.c)},
                     {"bases", bases},
                     {"entries", entries},
                     {"family_sums",
                      {{"12", r.family_sums[0]}, {"13", r.family_sums[1]}, {"23", r.family_sums[2]}}},
                     {"grand_noise_sum", r.grand_noise_sum},
                     {"overlap_weight_sum", r.overlap_weight_sum},
                     {"k_bound", r.k_bound},
                     {"all_converged", r.all_converged}});
    if (!r.all_converged) {
      last_error = "some triple did not converge; k_bound is not certified";
      return EPI_NOT_CONVERGED;
    }
    return EPI_OK;
  });
}

epi_status epi_model_ks2(int order, epi_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = new epi_model{epi::ks_model_d2(order)};
    return EPI_OK;
  });
}

epi_status epi_model_from_json(const char* text, epi_model** out) {
  return guarded([&] {
    need(text, "json");
    need(out, "out");
    *out = new epi_model{std::make_unique<epi::DiscreteModel>(epi::DiscreteModel::from_json(text))};
    return EPI_OK;
  });
}

epi_status epi_model_verify_json(const epi_model* model, size_t pairs, uint64_t seed, char** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const auto& m = *model->value;
    std::vector<std::pair<epi::PureState, epi::PureState>> list;
    json labels = json::array();
    if (const auto* d = dynamic_cast<const epi::DiscreteModel*>(&m)) {
      std::vector<const epi::DiscreteModel::State*> quantum;
      for (const auto& s : d->states())
        if (s.quantum) quantum.push_back(&s);
      for (std::size_t i = 0; i < quantum.size(); ++i)
        for (std::size_t j = i + 1; j < quantum.size(); ++j) {
          if (pairs > 0 && list.size() == pairs) break;
          list.emplace_back(*quantum[i]->quantum, *quantum[j]->quantum);
          labels.push_back({quantum[i]->label, quantum[j]->label});
        }
      epi::require(!list.empty(), epi::ErrorCode::Precondition,
                   "model has fewer than two states with quantum counterparts");
    } else {
      epi::require(pairs >= 1, epi::ErrorCode::InvalidArgument, "pairs must be >= 1");
      const std::uint64_t base = epi::sub_seed(seed, epi::StreamTag::State);
      for (std::size_t k = 0; k < pairs; ++k)
        list.emplace_back(epi::random_state(2, epi::mix64(base + 2 * k)),
                          epi::random_state(2, epi::mix64(base + 2 * k + 1)));
    }

    const auto rep = epi::verify_theorem1(m, list);
    json entries = json::array();
    double max_gap = 0.0;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const auto& [a, b] = list[k];
      const double wc = epi::overlap_pair(m, a, b);
      const double wq = epi::quantum_overlap(a, b);
      max_gap = std::max(max_gap, std::abs(wc - wq));
      json e{{"fidelity", epi::fidelity(a, b)}, {"omega_c", wc}, {"omega_q", wq}};
      if (!labels.empty()) e["states"] = labels[k];
      entries.push_back(e);
    }
    *out = copy_out({{"model", m.name()},
                     {"space", space_json(m.space())},
                     {"pairs", list.size()},
                     {"seed", seed},
                     {"max_born_residual", rep.max_born_residual},
                     {"worst_violation", rep.worst_violation},
                     {"worst_pair", rep.worst_pair},
                     {"max_abs_gap", max_gap},
                     {"entries", entries}});
    return EPI_OK;
  });
}

void epi_model_free(epi_model* model) { delete model; }

epi_status epi_design_build(size_t dim, size_t restarts, uint64_t seed, unsigned threads,
                            epi_design** out) {
  return guarded([&] {
    need(out, "out");
    epi::require(restarts >= 1, epi::ErrorCode::InvalidArgument, "restarts must be >= 1");
    auto d = epi::build_design(dim, {.restarts = restarts, .seed = seed, .threads = threads});
    *out = new epi_design{std::move(d), restarts, seed};
    return EPI_OK;
  });
}

epi_status epi_design_simulate_json(const epi_design* design, const char* noise, uint64_t shots,
                                    uint64_t seed, unsigned threads, char** out) {
  return guarded([&] {
    need(design, "design");
    need(noise, "noise");
    need(out, "out");
    const auto& d = design->value;
    epi::NoiseConfig cfg;
    cfg.channel = epi::parse_channel(noise, cfg.parameter);
    cfg.shots = shots;
    cfg.seed = seed;
    const auto table = epi::run_experiment(d, cfg, threads);
    const auto s = epi::aggregate_eps(table, d);
    const double k = epi::experimental_k_bound(s);

    json triples = json::array();
    for (const auto& t : d.triples)
      triples.push_back({{"alpha", t.alpha},
                         {"beta", t.beta},
                         {"i", t.i},
                         {"j", t.j},
                         {"born_epsilon", t.born_epsilon},
                         {"converged", t.converged}});
    json settings = json::array();
    for (const auto& row : table.settings)
      settings.push_back({{"preparation", row.preparation},
                          {"measurement", row.measurement},
                          {"outcomes", row.outcomes},
                          {"counts", row.counts},
                          {"shots", row.shots},
                          {"f4_mass", row.f4_mass}});
    json eps_t = json::array();
    for (const auto& t : s.triples)
      eps_t.push_back({{"alpha", t.alpha}, {"beta", t.beta}, {"i", t.i}, {"j", t.j},
                       {"epsilon", t.epsilon}});
    json eps_p = json::array();
    for (const auto& p : s.pairs)
      eps_p.push_back({{"alpha", p.alpha}, {"i", p.i}, {"j", p.j}, {"epsilon", p.epsilon}});

    epi::NoiseSummary exact;
    exact.overlap_weight_sum = d.overlap_weight_sum;
    for (const auto& t : d.triples)
      exact.triples.push_back({t.alpha, t.beta, t.i, t.j, t.born_epsilon});
    json threshold = nullptr;
    if (d.dim >= 4) {
      const double t = epi::noise_threshold(d.dim);
      threshold = {{"value", t}, {"eps1_below", s.eps1 < t}, {"eps2_below", s.eps2 < t}};
    }

    *out = copy_out({{"dim", d.dim},
                     {"noise",
                      {{"channel", epi::channel_name(cfg.channel)},
                       {"parameter", cfg.parameter},
                       {"shots", cfg.shots},
                       {"seed", cfg.seed}}},
                     {"design",
                      {{"restarts", design->restarts},
                       {"seed", design->seed},
                       {"overlap_weight_sum", d.overlap_weight_sum},
                       {"all_converged", d.all_converged},
                       {"triples", triples}}},
                     {"frequency_table", {{"shots", table.shots}, {"settings", settings}}},
                     {"noise_summary",
                      {{"eps1", s.eps1}, {"eps2", s.eps2}, {"triples", eps_t}, {"pairs", eps_p}}},
                     {"max_f4_mass", s.max_f4_mass},
                     {"k_bound", k},
                     {"k_below_one", k < 1.0},
                     {"noiseless_k_bound", epi::experimental_k_bound(exact)},
                     {"threshold", threshold}});
    return EPI_OK;
  });
}

void epi_design_free(epi_design* design) { delete design; }

epi_status epi_inequality_suite_json(size_t bonferroni_instances, size_t response_instances,
                                     size_t points, uint64_t seed, unsigned threads, char** out) {
  return guarded([&] {
    need(out, "out");
    epi::require(bonferroni_instances >= 1 && response_instances >= 1,
                 epi::ErrorCode::InvalidArgument, "instance counts must be >= 1");
    const auto r = epi::random_inequality_suite(bonferroni_instances, response_instances, points,
                                                seed, threads);
    constexpr double tol = -1e-9;
    *out = copy_out({{"points", r.points},
                     {"seed", seed},
                     {"bonferroni",
                      {{"instances", r.bonferroni_instances},
                       {"min_slack", r.bonferroni_min_slack},
                       {"holds", r.bonferroni_min_slack >= tol}}},
                     {"response_min_bound",
                      {{"instances", r.response_instances},
                       {"min_slack", r.response_min_slack},
                       {"holds", r.response_min_slack >= tol}}}});
    return EPI_OK;
  });
}

}  // extern "C"
