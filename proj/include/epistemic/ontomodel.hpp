#pragma once

// Ontological models: ontic spaces, epistemic states, response functions,
// and the overlap integrals and inequalities evaluated on them.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "epistemic/qstate.hpp"

namespace epi {

using Vec3 = std::array<double, 3>;

// Either n discrete points or the unit 2-sphere. Sphere integrals use a
// product Gauss-Legendre rule split along the great circles where the
// integrand has kinks; `order` is the node count per panel and direction.
class OnticSpace {
 public:
  enum class Kind { Discrete, Sphere };

  static OnticSpace discrete(std::size_t points);
  static OnticSpace sphere(int order);

  Kind kind() const { return kind_; }
  std::size_t points() const { return points_; }
  int order() const { return order_; }

  friend bool operator==(const OnticSpace&, const OnticSpace&) = default;

 private:
  Kind kind_ = Kind::Discrete;
  std::size_t points_ = 0;
  int order_ = 0;
};

inline constexpr int kMinSphereOrder = 4;
inline constexpr int kDefaultSphereOrder = 24;

struct SphereRule {
  std::vector<Vec3> points;
  std::vector<double> weights;  // sum to 4 pi
};

// Quadrature on the unit sphere that is exact up to Gauss-Legendre error for
// integrands that are smooth away from the great circles {x : n.x = 0} of
// the given normals. Near-zero normals are ignored.
SphereRule crease_adapted_rule(std::span<const Vec3> normals, int order);

// Density scale * max(0, axis . lambda) on the sphere.
struct ClippedCosine {
  Vec3 axis{};
  double scale = 0.0;
};

class EpistemicState {
 public:
  // Validates non-negativity and unit mass within 1e-9.
  static EpistemicState discrete(std::vector<double> weights);
  // Normalized cosine density (scale 1/pi) around a unit axis.
  static EpistemicState clipped_cosine(const OnticSpace& sphere, const Vec3& axis);

  const OnticSpace& space() const { return space_; }
  bool is_discrete() const { return space_.kind() == OnticSpace::Kind::Discrete; }
  const std::vector<double>& weights() const;
  const ClippedCosine& cosine() const;
  double density(const Vec3& lambda) const;

 private:
  OnticSpace space_;
  std::variant<std::vector<double>, ClippedCosine> density_;
};

// xi = 1 on {axis . lambda > 0}, 0 elsewhere.
struct Hemisphere {
  Vec3 axis{};
};
// xi = constant everywhere.
struct ConstantResponse {
  double value = 0.0;
};
using SphereResponse = std::variant<Hemisphere, ConstantResponse>;

class ResponseFunction {
 public:
  // values[f][x] = xi(f | x). Throws Precondition unless every value lies in
  // [0, 1] and sum_f xi(f | x) = 1 within 1e-9 at every point.
  static ResponseFunction discrete(std::vector<std::string> labels,
                                   std::vector<std::vector<double>> values);
  // Throws Precondition unless the outcomes cover the sphere exactly once
  // (up to measure zero).
  static ResponseFunction sphere(const OnticSpace& space, std::vector<std::string> labels,
                                 std::vector<SphereResponse> outcomes);

  const OnticSpace& space() const { return space_; }
  std::size_t outcomes() const { return labels_.size(); }
  const std::string& label(std::size_t f) const { return labels_[f]; }
  double value(std::size_t f, std::size_t point) const;
  double value(std::size_t f, const Vec3& lambda) const;
  const std::vector<SphereResponse>& sphere_outcomes() const { return sphere_; }

 private:
  friend ResponseFunction unchecked_discrete_response(std::vector<std::string> labels,
                                                      std::vector<std::vector<double>> values);

  OnticSpace space_;
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> discrete_;
  std::vector<SphereResponse> sphere_;
};

// Unchecked construction, for fault-injection tests of born_check.
ResponseFunction unchecked_discrete_response(std::vector<std::string> labels,
                                             std::vector<std::vector<double>> values);

class OntologicalModel {
 public:
  virtual ~OntologicalModel() = default;
  virtual std::string name() const = 0;
  virtual const OnticSpace& space() const = 0;
  // Throws InvalidArgument for states or measurements the model does not
  // describe. Response outcomes follow the order of m's outcomes.
  virtual EpistemicState epistemic_state(const PureState& psi) const = 0;
  virtual ResponseFunction response(const Measurement& m) const = 0;
};

// Qubit model on the Bloch sphere: mu_psi = (1/pi) max(0, n_psi . lambda),
// xi(phi | lambda) = [n_phi . lambda > 0].
class KsModel final : public OntologicalModel {
 public:
  explicit KsModel(int order);
  std::string name() const override { return "ks2"; }
  const OnticSpace& space() const override { return space_; }
  EpistemicState epistemic_state(const PureState& psi) const override;
  ResponseFunction response(const Measurement& m) const override;

 private:
  OnticSpace space_;
};

// Throws InvalidArgument when order < kMinSphereOrder and Precondition when
// the density fails to integrate to 1 within 1e-8.
std::unique_ptr<KsModel> ks_model_d2(int order = kDefaultSphereOrder);

Vec3 bloch_vector(const PureState& psi);

// Finite model with labeled states and measurements. States and measurements
// may carry their quantum counterparts, which is how epistemic_state() and
// response() find them.
class DiscreteModel final : public OntologicalModel {
 public:
  struct State {
    std::string label;
    std::vector<double> weights;
    std::optional<PureState> quantum;
  };
  struct Response {
    std::string label;
    std::vector<std::string> outcomes;
    std::vector<std::vector<double>> values;
    std::optional<Measurement> quantum;
  };

  DiscreteModel(std::size_t points, std::vector<State> states, std::vector<Response> responses,
                std::string name = "discrete");

  // {"points": n, "states": {label: [w...]}, "responses": {m: {f: [xi...]}},
  //  "quantum": {"states": {label: state}, "measurements": {m: {f: [[v...]...]}}}}
  // where state is {"dim": d, "amplitudes": [[re, im], ...]} and every
  // outcome lists orthonormal spanning vectors in the same amplitude form.
  static DiscreteModel from_json(const std::string& text);

  std::string name() const override { return name_; }
  const OnticSpace& space() const override { return space_; }
  EpistemicState epistemic_state(const PureState& psi) const override;
  ResponseFunction response(const Measurement& m) const override;

  const std::vector<State>& states() const { return states_; }
  const std::vector<Response>& responses() const { return responses_; }
  EpistemicState state(const std::string& label) const;
  ResponseFunction response(const std::string& label) const;

 private:
  OnticSpace space_;
  std::vector<State> states_;
  std::vector<Response> responses_;
  std::string name_;
};

// One ontic point per state carrying that state's Born probabilities.
DiscreteModel psi_ontic_model(std::span<const PureState> states,
                              std::span<const Measurement> measurements);

// max_f |integral xi(f) mu - |<f|psi>|^2|, with the model's own state and
// response for (psi, m).
double born_check(const OntologicalModel& model, const PureState& psi, const Measurement& m);
double born_check(const EpistemicState& mu, const ResponseFunction& xi,
                  std::span<const double> born);

// Integrals of pointwise minima. All arguments must share one space.
double overlap(const EpistemicState& a, const EpistemicState& b);
double overlap(const EpistemicState& a, const EpistemicState& b, const EpistemicState& c);
double overlap_pair(const OntologicalModel& model, const PureState& psi, const PureState& phi);
double overlap_triple(const OntologicalModel& model, const PureState& a, const PureState& b,
                      const PureState& c);

// integral of xi(f) mu.
double response_probability(const EpistemicState& mu, const ResponseFunction& xi,
                            std::size_t f);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
};

// sum_{alpha,i} w(c, e^alpha_i)
//   <= 1 + sum_{alpha<beta,i,j} w(c, e^alpha_i, e^beta_j) + sum_{alpha,i<j} w(e^alpha_i, e^alpha_j)
// with w the pointwise-minimum integral. families[alpha][i] = e^alpha_i.
InequalityCheck bonferroni_check(const std::vector<std::vector<EpistemicState>>& families,
                                 const EpistemicState& c);

// integral min_j mu_j <= sum_i integral xi(f_i) mu_i, outcome i paired with state i.
InequalityCheck response_min_bound(std::span<const EpistemicState> states,
                                   const ResponseFunction& xi);
InequalityCheck response_min_bound(const OntologicalModel& model,
                                   std::span<const PureState> states, const Measurement& m);

struct Theorem1Report {
  double worst_violation = 0.0;  // max over pairs of omega_C - omega_Q
  std::size_t worst_pair = 0;
  double max_born_residual = 0.0;
  std::size_t pairs = 0;
};

inline constexpr double kBornTolerance = 1e-6;

// Throws Precondition when the model misses the Born rule (by more than
// born_tolerance) on the optimal discriminating measurement of some pair.
Theorem1Report verify_theorem1(const OntologicalModel& model,
                               std::span<const std::pair<PureState, PureState>> pairs,
                               double born_tolerance = kBornTolerance);

// mu_first-measure of {lambda : every density > tolerance}.
double support_intersection_measure(std::span<const EpistemicState> states, double tolerance);
double support_intersection_measure(const OntologicalModel& model,
                                    std::span<const PureState> states, double tolerance);

struct InequalitySuiteReport {
  std::size_t bonferroni_instances = 0;
  double bonferroni_min_slack = 0.0;
  std::size_t response_instances = 0;
  double response_min_slack = 0.0;
  std::size_t points = 0;
};

// Random discrete instances: 2 to 4 families of 2 to 4 states plus c for
// bonferroni_check, and 2 to 5 states with a random response for
// response_min_bound. Instance t draws from stream (seed, t), so the report
// does not depend on `threads`.
InequalitySuiteReport random_inequality_suite(std::size_t bonferroni_instances,
                                              std::size_t response_instances, std::size_t points,
                                              std::uint64_t seed, unsigned threads = 1);

}  // namespace epi
