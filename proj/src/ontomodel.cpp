#include "epistemic/ontomodel.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <random>

#include "json.hpp"

#include "epistemic/error.hpp"
#include "epistemic/parallel.hpp"
#include "epistemic/rng.hpp"

namespace epi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMassTolerance = 1e-9;

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double len3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

Vec3 unit3(const Vec3& a) {
  const double n = len3(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}

// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
  std::vector<double> x, w;
};

GaussRule gauss_rule(int order) {
  gsl_integration_glfixed_table* t =
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order));
  require(t != nullptr, ErrorCode::InvalidArgument, "cannot build Gauss-Legendre table");
  GaussRule r;
  for (int i = 0; i < order; ++i) {
    double xi = 0.0, wi = 0.0;
    gsl_integration_glfixed_point(0.0, 1.0, static_cast<std::size_t>(i), &xi, &wi, t);
    r.x.push_back(xi);
    r.w.push_back(wi);
  }
  gsl_integration_glfixed_table_free(t);
  return r;
}

double wrap_angle(double phi) {
  phi = std::fmod(phi, 2.0 * kPi);
  return phi < 0.0 ? phi + 2.0 * kPi : phi;
}

void require_same_space(const OnticSpace& a, const OnticSpace& b) {
  require(a.kind() == b.kind() && a.points() == b.points(), ErrorCode::DimensionMismatch,
          "ontic spaces differ");
}

// Kinks of min(mu_a, mu_b, ...) and of response indicators sit on great
// circles; collect their normals.
void add_state_creases(std::span<const EpistemicState* const> states, std::vector<Vec3>& out) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i]->is_discrete()) return;
    const auto& a = states[i]->cosine();
    out.push_back(a.axis);
    for (std::size_t j = 0; j < i; ++j) {
      const auto& b = states[j]->cosine();
      out.push_back({a.scale * a.axis[0] - b.scale * b.axis[0],
                     a.scale * a.axis[1] - b.scale * b.axis[1],
                     a.scale * a.axis[2] - b.scale * b.axis[2]});
    }
  }
}

void add_response_creases(const ResponseFunction& xi, std::vector<Vec3>& out) {
  for (const auto& o : xi.sphere_outcomes())
    if (const auto* h = std::get_if<Hemisphere>(&o)) out.push_back(h->axis);
}

// Sums f(point index, lambda) * weight over the space; discrete spaces use
// counting measure.
template <class F>
double integrate(const OnticSpace& space, const std::vector<Vec3>& creases, F&& f) {
  double total = 0.0;
  if (space.kind() == OnticSpace::Kind::Discrete) {
    for (std::size_t x = 0; x < space.points(); ++x) total += f(x, Vec3{});
    return total;
  }
  const SphereRule rule = crease_adapted_rule(creases, space.order());
  for (std::size_t k = 0; k < rule.points.size(); ++k)
    total += rule.weights[k] * f(std::size_t{0}, rule.points[k]);
  return total;
}

double density_at(const EpistemicState& m, std::size_t x, const Vec3& p) {
  return m.is_discrete() ? m.weights()[x] : m.density(p);
}

double response_at(const ResponseFunction& r, std::size_t f, std::size_t x, const Vec3& p) {
  return r.space().kind() == OnticSpace::Kind::Discrete ? r.value(f, x) : r.value(f, p);
}

double min_overlap(std::span<const EpistemicState* const> states) {
  for (const auto* s : states) require_same_space(states[0]->space(), s->space());
  std::vector<Vec3> creases;
  add_state_creases(states, creases);
  return integrate(states[0]->space(), creases, [&](std::size_t x, const Vec3& p) {
    double m = density_at(*states[0], x, p);
    for (const auto* s : states.subspan(1)) m = std::min(m, density_at(*s, x, p));
    return m;
  });
}

CVector parse_amplitudes(const nlohmann::json& j) {
  CVector v;
  for (const auto& z : j) v.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  return v;
}

PureState parse_state(const nlohmann::json& j) {
  PureState s(parse_amplitudes(j.at("amplitudes")));
  require(s.dim() == j.at("dim").get<std::size_t>(), ErrorCode::Parse,
          "state dim does not match its amplitudes");
  return s;
}

// For each outcome of b, the outcome of a with the same projector; empty if
// the two measurements differ.
std::vector<std::size_t> match_outcomes(const Measurement& a, const Measurement& b) {
  if (a.dim() != b.dim() || a.outcomes() != b.outcomes()) return {};
  std::vector<std::size_t> map(b.outcomes());
  std::vector<bool> used(a.outcomes(), false);
  for (std::size_t f = 0; f < b.outcomes(); ++f) {
    const CMatrix pb = b.projector(f);
    bool found = false;
    for (std::size_t g = 0; g < a.outcomes() && !found; ++g)
      if (!used[g] && distance(a.projector(g), pb) <= 1e-8) {
        map[f] = g;
        used[g] = found = true;
      }
    if (!found) return {};
  }
  return map;
}

}  // namespace

OnticSpace OnticSpace::discrete(std::size_t points) {
  require(points >= 1, ErrorCode::InvalidArgument, "discrete ontic space needs >= 1 point");
  OnticSpace s;
  s.kind_ = Kind::Discrete;
  s.points_ = points;
  return s;
}

OnticSpace OnticSpace::sphere(int order) {
  require(order >= 1, ErrorCode::InvalidArgument, "quadrature order must be positive");
  OnticSpace s;
  s.kind_ = Kind::Sphere;
  s.order_ = order;
  return s;
}

SphereRule crease_adapted_rule(std::span<const Vec3> normals, int order) {
  std::vector<Vec3> circles;
  for (const auto& n : normals) {
    if (len3(n) < 1e-12) continue;
    const Vec3 u = unit3(n);
    const bool duplicate = std::any_of(circles.begin(), circles.end(),
                                       [&](const Vec3& c) { return len3(cross3(c, u)) < 1e-12; });
    if (!duplicate) circles.push_back(u);
  }

  // Pole on the first two circles, so both become pairs of meridians.
  Vec3 pole{0.0, 0.0, 1.0};
  if (circles.size() >= 2) {
    pole = unit3(cross3(circles[0], circles[1]));
  } else if (circles.size() == 1) {
    const Vec3& c = circles[0];
    pole = unit3(std::abs(c[0]) < 0.9 ? cross3(c, {1.0, 0.0, 0.0}) : cross3(c, {0.0, 1.0, 0.0}));
  }
  const Vec3 e1 = unit3(std::abs(pole[0]) < 0.9 ? cross3(pole, {1.0, 0.0, 0.0})
                                                : cross3(pole, {0.0, 1.0, 0.0}));
  const Vec3 e2 = cross3(pole, e1);
  auto local = [&](const Vec3& v) { return Vec3{dot3(v, e1), dot3(v, e2), dot3(v, pole)}; };

  std::vector<double> phi_breaks;
  for (int k = 0; k < 8; ++k) phi_breaks.push_back(k * kPi / 4.0);
  std::vector<Vec3> curves;  // circles not through the pole, local coordinates
  for (const auto& c : circles) {
    const Vec3 v = local(c);
    // Where v_x cos(phi) + v_y sin(phi) = 0 the circle is steepest (or is a meridian).
    const double phi0 = std::atan2(-v[0], v[1]);
    phi_breaks.push_back(wrap_angle(phi0));
    phi_breaks.push_back(wrap_angle(phi0 + kPi));
    if (std::abs(v[2]) > 1e-9) curves.push_back(v);
  }
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const Vec3 p = cross3(curves[i], curves[j]);
      if (std::hypot(p[0], p[1]) < 1e-12) continue;
      phi_breaks.push_back(wrap_angle(std::atan2(p[1], p[0])));
      phi_breaks.push_back(wrap_angle(std::atan2(-p[1], -p[0])));
    }
  std::sort(phi_breaks.begin(), phi_breaks.end());
  phi_breaks.push_back(2.0 * kPi);

  const GaussRule g = gauss_rule(order);
  SphereRule rule;
  std::vector<double> theta_breaks;
  for (std::size_t b = 0; b + 1 < phi_breaks.size(); ++b) {
    const double pa = phi_breaks[b], pw = phi_breaks[b + 1] - pa;
    if (pw < 1e-14) continue;
    for (int i = 0; i < order; ++i) {
      const double phi = pa + pw * g.x[i];
      const double cp = std::cos(phi), sp = std::sin(phi);
      theta_breaks.assign({0.0, kPi});
      for (const auto& v : curves) {
        double t = std::atan2(-v[2], v[0] * cp + v[1] * sp);
        if (t < 0.0) t += kPi;
        theta_breaks.push_back(t);
      }
      std::sort(theta_breaks.begin(), theta_breaks.end());
      for (std::size_t c = 0; c + 1 < theta_breaks.size(); ++c) {
        const double ta = theta_breaks[c], tw = theta_breaks[c + 1] - ta;
        if (tw < 1e-15) continue;
        for (int j = 0; j < order; ++j) {
          const double theta = ta + tw * g.x[j];
          const double st = std::sin(theta), ct = std::cos(theta);
          Vec3 p;
          for (int k = 0; k < 3; ++k) p[k] = st * cp * e1[k] + st * sp * e2[k] + ct * pole[k];
          rule.points.push_back(p);
          rule.weights.push_back(pw * g.w[i] * tw * g.w[j] * st);
        }
      }
    }
  }
  return rule;
}

EpistemicState EpistemicState::discrete(std::vector<double> weights) {
  require(!weights.empty(), ErrorCode::InvalidArgument, "epistemic state needs >= 1 point");
  double total = 0.0;
  for (double w : weights) {
    require(std::isfinite(w) && w >= 0.0, ErrorCode::InvalidArgument,
            "epistemic weights must be non-negative");
    total += w;
  }
  require(std::abs(total - 1.0) <= kMassTolerance, ErrorCode::InvalidArgument,
          "epistemic weights must sum to 1");
  EpistemicState s;
  s.space_ = OnticSpace::discrete(weights.size());
  s.density_ = std::move(weights);
  return s;
}

EpistemicState EpistemicState::clipped_cosine(const OnticSpace& sphere, const Vec3& axis) {
  require(sphere.kind() == OnticSpace::Kind::Sphere, ErrorCode::InvalidArgument,
          "cosine densities live on the sphere");
  require(std::abs(len3(axis) - 1.0) < 1e-9, ErrorCode::InvalidArgument, "axis must be a unit vector");
  EpistemicState s;
  s.space_ = sphere;
  s.density_ = ClippedCosine{axis, 1.0 / kPi};
  return s;
}

const std::vector<double>& EpistemicState::weights() const {
  require(is_discrete(), ErrorCode::InvalidArgument, "state has no discrete weights");
  return std::get<std::vector<double>>(density_);
}

const ClippedCosine& EpistemicState::cosine() const {
  require(!is_discrete(), ErrorCode::InvalidArgument, "state is not a sphere density");
  return std::get<ClippedCosine>(density_);
}

double EpistemicState::density(const Vec3& lambda) const {
  const auto& c = cosine();
  return c.scale * std::max(0.0, dot3(c.axis, lambda));
}

ResponseFunction ResponseFunction::discrete(std::vector<std::string> labels,
                                            std::vector<std::vector<double>> values) {
  require(!values.empty() && labels.size() == values.size(), ErrorCode::InvalidArgument,
          "one value list per outcome label");
  const std::size_t n = values.front().size();
  for (const auto& v : values)
    require(v.size() == n, ErrorCode::DimensionMismatch, "response value lists differ in length");
  for (std::size_t x = 0; x < n; ++x) {
    double total = 0.0;
    for (const auto& v : values) {
      require(v[x] >= 0.0 && v[x] <= 1.0, ErrorCode::Precondition,
              "response values must lie in [0, 1]");
      total += v[x];
    }
    require(std::abs(total - 1.0) <= kMassTolerance, ErrorCode::Precondition,
            "response function is not normalized at point " + std::to_string(x));
  }
  return unchecked_discrete_response(std::move(labels), std::move(values));
}

ResponseFunction unchecked_discrete_response(std::vector<std::string> labels,
                                             std::vector<std::vector<double>> values) {
  require(!values.empty() && labels.size() == values.size(), ErrorCode::InvalidArgument,
          "one value list per outcome label");
  ResponseFunction r;
  r.space_ = OnticSpace::discrete(values.front().size());
  r.labels_ = std::move(labels);
  r.discrete_ = std::move(values);
  return r;
}

ResponseFunction ResponseFunction::sphere(const OnticSpace& space, std::vector<std::string> labels,
                                          std::vector<SphereResponse> outcomes) {
  require(space.kind() == OnticSpace::Kind::Sphere, ErrorCode::InvalidArgument,
          "sphere response on a discrete space");
  require(labels.size() == outcomes.size(), ErrorCode::InvalidArgument,
          "one response per outcome label");
  double constant = 0.0;
  std::vector<Vec3> axes;
  for (const auto& o : outcomes) {
    if (const auto* c = std::get_if<ConstantResponse>(&o)) {
      require(c->value >= 0.0 && c->value <= 1.0, ErrorCode::Precondition,
              "response values must lie in [0, 1]");
      constant += c->value;
    } else {
      axes.push_back(std::get<Hemisphere>(o).axis);
    }
  }
  const bool normalized =
      (axes.empty() && std::abs(constant - 1.0) <= kMassTolerance) ||
      (axes.size() == 2 && std::abs(constant) <= kMassTolerance &&
       len3({axes[0][0] + axes[1][0], axes[0][1] + axes[1][1], axes[0][2] + axes[1][2]}) < 1e-9);
  require(normalized, ErrorCode::Precondition, "sphere response function is not normalized");
  ResponseFunction r;
  r.space_ = space;
  r.labels_ = std::move(labels);
  r.sphere_ = std::move(outcomes);
  return r;
}

double ResponseFunction::value(std::size_t f, std::size_t point) const { return discrete_[f][point]; }

double ResponseFunction::value(std::size_t f, const Vec3& lambda) const {
  if (const auto* c = std::get_if<ConstantResponse>(&sphere_[f])) return c->value;
  return dot3(std::get<Hemisphere>(sphere_[f]).axis, lambda) > 0.0 ? 1.0 : 0.0;
}

Vec3 bloch_vector(const PureState& psi) {
  require(psi.dim() == 2, ErrorCode::DimensionMismatch, "Bloch vectors need a qubit state");
  const cplx ab = std::conj(psi[0]) * psi[1];
  return unit3({2.0 * ab.real(), 2.0 * ab.imag(), std::norm(psi[0]) - std::norm(psi[1])});
}

KsModel::KsModel(int order) : space_(OnticSpace::sphere(order)) {}

EpistemicState KsModel::epistemic_state(const PureState& psi) const {
  return EpistemicState::clipped_cosine(space_, bloch_vector(psi));
}

ResponseFunction KsModel::response(const Measurement& m) const {
  require(m.dim() == 2 && m.complete(), ErrorCode::InvalidArgument,
          "the qubit model answers complete qubit measurements only");
  std::vector<std::string> labels;
  std::vector<SphereResponse> outcomes;
  for (std::size_t f = 0; f < m.outcomes(); ++f) {
    labels.push_back(m.effect(f).label);
    if (m.rank(f) == 1)
      outcomes.push_back(Hemisphere{bloch_vector(PureState::normalized(m.effect(f).span[0]))});
    else
      outcomes.push_back(ConstantResponse{m.rank(f) == 2 ? 1.0 : 0.0});
  }
  return ResponseFunction::sphere(space_, std::move(labels), std::move(outcomes));
}

std::unique_ptr<KsModel> ks_model_d2(int order) {
  require(order >= kMinSphereOrder, ErrorCode::InvalidArgument,
          "quadrature order " + std::to_string(order) + " is below the minimum " +
              std::to_string(kMinSphereOrder));
  auto model = std::make_unique<KsModel>(order);
  const auto mu = model->epistemic_state(PureState::basis(2, 0));
  const std::vector<Vec3> creases{mu.cosine().axis};
  const double mass = integrate(model->space(), creases,
                                [&](std::size_t, const Vec3& p) { return mu.density(p); });
  require(std::abs(mass - 1.0) < 1e-8, ErrorCode::Precondition,
          "quadrature too coarse: density integrates to " + std::to_string(mass));
  return model;
}

DiscreteModel::DiscreteModel(std::size_t points, std::vector<State> states,
                             std::vector<Response> responses, std::string name)
    : space_(OnticSpace::discrete(points)),
      states_(std::move(states)),
      responses_(std::move(responses)),
      name_(std::move(name)) {
  for (const auto& s : states_) {
    require(s.weights.size() == points, ErrorCode::DimensionMismatch,
            "state '" + s.label + "' has the wrong number of weights");
    EpistemicState::discrete(s.weights);
  }
  for (const auto& r : responses_) {
    for (const auto& v : r.values)
      require(v.size() == points, ErrorCode::DimensionMismatch,
              "response '" + r.label + "' has the wrong number of values");
    ResponseFunction::discrete(r.outcomes, r.values);
    if (r.quantum)
      require(r.quantum->outcomes() == r.outcomes.size(), ErrorCode::InvalidArgument,
              "response '" + r.label + "' and its measurement differ in outcome count");
  }
}

DiscreteModel DiscreteModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("model JSON: ") + e.what());
  }
  try {
    const auto points = j.at("points").get<std::size_t>();
    const nlohmann::json quantum = j.value("quantum", nlohmann::json::object());
    const nlohmann::json qstates = quantum.value("states", nlohmann::json::object());
    const nlohmann::json qmeas = quantum.value("measurements", nlohmann::json::object());

    std::vector<State> states;
    for (const auto& [label, w] : j.at("states").items()) {
      State s{label, w.get<std::vector<double>>(), std::nullopt};
      if (qstates.contains(label)) s.quantum = parse_state(qstates.at(label));
      states.push_back(std::move(s));
    }
    std::vector<Response> responses;
    const nlohmann::json rjson = j.value("responses", nlohmann::json::object());
    for (const auto& [label, outs] : rjson.items()) {
      Response r{label, {}, {}, std::nullopt};
      for (const auto& [f, v] : outs.items()) {
        r.outcomes.push_back(f);
        r.values.push_back(v.get<std::vector<double>>());
      }
      if (qmeas.contains(label)) {
        std::vector<Measurement::Effect> effects;
        std::size_t dim = 0;
        for (const auto& f : r.outcomes) {
          Measurement::Effect e{f, {}};
          for (const auto& vec : qmeas.at(label).at(f)) {
            e.span.push_back(parse_amplitudes(vec));
            dim = e.span.back().size();
          }
          effects.push_back(std::move(e));
        }
        require(dim >= 2, ErrorCode::Parse, "measurement '" + label + "' has no vectors");
        r.quantum = Measurement(dim, std::move(effects), true);
      }
      responses.push_back(std::move(r));
    }
    return DiscreteModel(points, std::move(states), std::move(responses),
                         j.value("name", std::string("discrete")));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("model JSON: ") + e.what());
  }
}

EpistemicState DiscreteModel::epistemic_state(const PureState& psi) const {
  for (const auto& s : states_)
    if (s.quantum && s.quantum->dim() == psi.dim() && fidelity(*s.quantum, psi) > 1.0 - 1e-10)
      return EpistemicState::discrete(s.weights);
  fail(ErrorCode::InvalidArgument, "model '" + name_ + "' has no epistemic state for this vector");
}

ResponseFunction DiscreteModel::response(const Measurement& m) const {
  for (const auto& r : responses_) {
    if (!r.quantum) continue;
    const auto map = match_outcomes(*r.quantum, m);
    if (map.empty()) continue;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values;
    for (std::size_t g : map) {
      labels.push_back(r.outcomes[g]);
      values.push_back(r.values[g]);
    }
    return ResponseFunction::discrete(std::move(labels), std::move(values));
  }
  fail(ErrorCode::InvalidArgument, "model '" + name_ + "' has no response for this measurement");
}

EpistemicState DiscreteModel::state(const std::string& label) const {
  for (const auto& s : states_)
    if (s.label == label) return EpistemicState::discrete(s.weights);
  fail(ErrorCode::InvalidArgument, "unknown state label '" + label + "'");
}

ResponseFunction DiscreteModel::response(const std::string& label) const {
  for (const auto& r : responses_)
    if (r.label == label) return ResponseFunction::discrete(r.outcomes, r.values);
  fail(ErrorCode::InvalidArgument, "unknown measurement label '" + label + "'");
}

DiscreteModel psi_ontic_model(std::span<const PureState> states,
                              std::span<const Measurement> measurements) {
  const std::size_t n = states.size();
  std::vector<DiscreteModel::State> ms;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> w(n, 0.0);
    w[k] = 1.0;
    ms.push_back({"s" + std::to_string(k), std::move(w), states[k]});
  }
  std::vector<DiscreteModel::Response> rs;
  for (std::size_t m = 0; m < measurements.size(); ++m) {
    const Measurement& meas = measurements[m];
    DiscreteModel::Response r{"m" + std::to_string(m), {}, {}, meas};
    for (std::size_t f = 0; f < meas.outcomes(); ++f) {
      r.outcomes.push_back(meas.effect(f).label);
      std::vector<double> v(n);
      for (std::size_t k = 0; k < n; ++k) v[k] = meas.probability(f, states[k]);
      r.values.push_back(std::move(v));
    }
    // Absorb rounding so each point sums to exactly 1.
    for (std::size_t k = 0; k < n; ++k) {
      double total = 0.0;
      for (const auto& v : r.values) total += v[k];
      for (auto& v : r.values) v[k] /= total;
    }
    rs.push_back(std::move(r));
  }
  return DiscreteModel(n, std::move(ms), std::move(rs), "psi-ontic");
}

double response_probability(const EpistemicState& mu, const ResponseFunction& xi, std::size_t f) {
  require_same_space(mu.space(), xi.space());
  require(f < xi.outcomes(), ErrorCode::InvalidArgument, "outcome index out of range");
  std::vector<Vec3> creases;
  const std::array<const EpistemicState*, 1> one{&mu};
  add_state_creases(one, creases);
  add_response_creases(xi, creases);
  return integrate(mu.space(), creases, [&](std::size_t x, const Vec3& p) {
    return response_at(xi, f, x, p) * density_at(mu, x, p);
  });
}

double born_check(const EpistemicState& mu, const ResponseFunction& xi,
                  std::span<const double> born) {
  require(born.size() == xi.outcomes(), ErrorCode::InvalidArgument,
          "one Born probability per outcome");
  double worst = 0.0;
  for (std::size_t f = 0; f < xi.outcomes(); ++f)
    worst = std::max(worst, std::abs(response_probability(mu, xi, f) - born[f]));
  return worst;
}

double born_check(const OntologicalModel& model, const PureState& psi, const Measurement& m) {
  const auto born = m.probabilities(psi);
  return born_check(model.epistemic_state(psi), model.response(m), born);
}

double overlap(const EpistemicState& a, const EpistemicState& b) {
  const std::array<const EpistemicState*, 2> s{&a, &b};
  return min_overlap(s);
}

double overlap(const EpistemicState& a, const EpistemicState& b, const EpistemicState& c) {
  const std::array<const EpistemicState*, 3> s{&a, &b, &c};
  return min_overlap(s);
}

double overlap_pair(const OntologicalModel& model, const PureState& psi, const PureState& phi) {
  return overlap(model.epistemic_state(psi), model.epistemic_state(phi));
}

double overlap_triple(const OntologicalModel& model, const PureState& a, const PureState& b,
                      const PureState& c) {
  return overlap(model.epistemic_state(a), model.epistemic_state(b), model.epistemic_state(c));
}

InequalityCheck bonferroni_check(const std::vector<std::vector<EpistemicState>>& families,
                                 const EpistemicState& c) {
  InequalityCheck r;
  r.rhs = 1.0;
  for (std::size_t a = 0; a < families.size(); ++a) {
    for (std::size_t i = 0; i < families[a].size(); ++i) {
      r.lhs += overlap(c, families[a][i]);
      for (std::size_t j = i + 1; j < families[a].size(); ++j)
        r.rhs += overlap(families[a][i], families[a][j]);
      for (std::size_t b = a + 1; b < families.size(); ++b)
        for (const auto& e : families[b]) r.rhs += overlap(c, families[a][i], e);
    }
  }
  r.slack = r.rhs - r.lhs;
  return r;
}

InequalityCheck response_min_bound(std::span<const EpistemicState> states,
                                   const ResponseFunction& xi) {
  require(!states.empty() && states.size() == xi.outcomes(), ErrorCode::InvalidArgument,
          "need one outcome per state, got " + std::to_string(xi.outcomes()) + " outcomes for " +
              std::to_string(states.size()) + " states");
  std::vector<const EpistemicState*> ptrs;
  for (const auto& s : states) ptrs.push_back(&s);
  InequalityCheck r;
  r.lhs = min_overlap(ptrs);
  for (std::size_t i = 0; i < states.size(); ++i) r.rhs += response_probability(states[i], xi, i);
  r.slack = r.rhs - r.lhs;
  return r;
}

InequalityCheck response_min_bound(const OntologicalModel& model,
                                   std::span<const PureState> states, const Measurement& m) {
  std::vector<EpistemicState> mus;
  for (const auto& s : states) mus.push_back(model.epistemic_state(s));
  return response_min_bound(mus, model.response(m));
}

Theorem1Report verify_theorem1(const OntologicalModel& model,
                               std::span<const std::pair<PureState, PureState>> pairs,
                               double born_tolerance) {
  Theorem1Report r;
  r.worst_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [psi, phi] = pairs[k];
    const Measurement m = helstrom_measurement(psi, phi);
    double residual = 0.0;
    try {
      residual = std::max(born_check(model, psi, m), born_check(model, phi, m));
    } catch (const Error& e) {
      fail(ErrorCode::Precondition, "pair " + std::to_string(k) +
                                        ": model cannot evaluate the discriminating measurement (" +
                                        e.what() + ")");
    }
    require(residual <= born_tolerance, ErrorCode::Precondition,
            "pair " + std::to_string(k) + ": Born residual " + std::to_string(residual) +
                " on the discriminating measurement");
    r.max_born_residual = std::max(r.max_born_residual, residual);
    const double v = overlap_pair(model, psi, phi) - quantum_overlap(psi, phi);
    if (v > r.worst_violation) {
      r.worst_violation = v;
      r.worst_pair = k;
    }
  }
  r.pairs = pairs.size();
  if (pairs.empty()) r.worst_violation = 0.0;
  return r;
}

double support_intersection_measure(std::span<const EpistemicState> states, double tolerance) {
  require(!states.empty(), ErrorCode::InvalidArgument, "need at least one state");
  std::vector<const EpistemicState*> ptrs;
  for (const auto& s : states) {
    require_same_space(states[0].space(), s.space());
    ptrs.push_back(&s);
  }
  std::vector<Vec3> creases;
  add_state_creases(ptrs, creases);
  return integrate(states[0].space(), creases, [&](std::size_t x, const Vec3& p) {
    for (const auto* s : ptrs)
      if (!(density_at(*s, x, p) > tolerance)) return 0.0;
    return density_at(states[0], x, p);
  });
}

double support_intersection_measure(const OntologicalModel& model,
                                    std::span<const PureState> states, double tolerance) {
  std::vector<EpistemicState> mus;
  for (const auto& s : states) mus.push_back(model.epistemic_state(s));
  return support_intersection_measure(mus, tolerance);
}

namespace {

std::vector<double> sparse_weights(Rng& rng, std::size_t n, double zero_fraction) {
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  for (auto& x : w) x = u(rng) < zero_fraction ? 0.0 : e(rng);
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total == 0.0) {
    w[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 1.0;
    total = 1.0;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace

InequalitySuiteReport random_inequality_suite(std::size_t bonferroni_instances,
                                              std::size_t response_instances, std::size_t points,
                                              std::uint64_t seed, unsigned threads) {
  require(points >= 1, ErrorCode::InvalidArgument, "instances need at least one point");
  InequalitySuiteReport out;
  out.bonferroni_instances = bonferroni_instances;
  out.response_instances = response_instances;
  out.points = points;

  std::vector<double> slack(bonferroni_instances + response_instances);
  const std::uint64_t base = sub_seed(seed, StreamTag::Trial);
  parallel_for(slack.size(), threads, [&](std::size_t t) {
    Rng rng = make_stream(base, t);
    const double zeros = 0.1 * static_cast<double>(t % 9);
    if (t < bonferroni_instances) {
      std::vector<std::vector<EpistemicState>> families(2 + t % 3);
      for (std::size_t a = 0; a < families.size(); ++a)
        for (std::size_t i = 0; i < 2 + (t + a) % 3; ++i)
          families[a].push_back(EpistemicState::discrete(sparse_weights(rng, points, zeros)));
      const auto c = EpistemicState::discrete(sparse_weights(rng, points, zeros));
      slack[t] = bonferroni_check(families, c).slack;
      return;
    }
    const std::size_t n = 2 + t % 4;
    std::vector<EpistemicState> states;
    for (std::size_t i = 0; i < n; ++i)
      states.push_back(EpistemicState::discrete(sparse_weights(rng, points, zeros)));
    std::vector<std::vector<double>> xi(n, std::vector<double>(points));
    for (std::size_t x = 0; x < points; ++x) {
      const auto col = sparse_weights(rng, n, 0.3);
      for (std::size_t f = 0; f < n; ++f) xi[f][x] = col[f];
    }
    std::vector<std::string> labels;
    for (std::size_t f = 0; f < n; ++f) labels.push_back(std::to_string(f));
    slack[t] = response_min_bound(states, ResponseFunction::discrete(labels, xi)).slack;
  });

  const auto mid = slack.begin() + static_cast<std::ptrdiff_t>(bonferroni_instances);
  const double inf = std::numeric_limits<double>::infinity();
  out.bonferroni_min_slack = bonferroni_instances ? *std::min_element(slack.begin(), mid) : inf;
  out.response_min_slack = response_instances ? *std::min_element(mid, slack.end()) : inf;
  return out;
}

}  // namespace epi
