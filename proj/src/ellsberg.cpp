#include "qdu/ellsberg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace qdu {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_ellsberg_colors(const Act& act) {
  for (const char* c : {"red", "yellow", "black"})
    require(act.payoffs.count(c) == 1, ErrorKind::ColorMismatch, "act " + act.name + " has no payoff for " + c);
  require(act.payoffs.size() == 3, ErrorKind::ColorMismatch, "act " + act.name + " is not a three-color act");
}

bool is_ambiguous(const Act& act) { return act.payoffs.at("yellow") != act.payoffs.at("black"); }

double largest_utility(const UrnExperiment& exp, const UtilityFunction& u) {
  double m = 0.0;
  for (const auto& a : exp.acts)
    for (const auto& [c, x] : a.payoffs) m = std::max(m, u(x));
  return m;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::string_view to_string(Mechanism m) noexcept {
  switch (m) {
    case Mechanism::Contextual: return "contextual";
    case Mechanism::Rotated: return "rotated";
    case Mechanism::Canonical: return "canonical";
  }
  return "?";
}

Mechanism parse_mechanism(const std::string& text) {
  if (text == "contextual") return Mechanism::Contextual;
  if (text == "rotated") return Mechanism::Rotated;
  if (text == "canonical") return Mechanism::Canonical;
  fail(ErrorKind::InvalidSpec, "unknown mechanism '" + text + "'");
}

CMatrix BlockRotation::matrix() const {
  const double c = std::cos(theta), s = std::sin(theta);
  CMatrix r(2, 2);
  r(0, 0) = c;
  r(1, 0) = std::polar(s, phi);
  r(0, 1) = -std::polar(s, -phi);
  r(1, 1) = c;
  return r;
}

CMatrix embed_blocks(int n, const std::vector<std::pair<int, CMatrix>>& blocks) {
  CMatrix m = CMatrix::Identity(n, n);
  for (const auto& [offset, b] : blocks) m.block(offset, offset, b.rows(), b.cols()) = b;
  return m;
}

EllsbergState::EllsbergState(StateVector v) : v_(std::move(v)) {
  require(v_.dim() == 3, ErrorKind::DimensionMismatch, "Ellsberg state lives in C^3");
  require(std::abs(v_.weight(0) - kRedProbability) <= tol::kAlgebraic, ErrorKind::ConstraintViolated,
          "red probability " + std::to_string(v_.weight(0)) + " != 1/3");
}

EllsbergState build_ellsberg_state(double y_weight, double phase_y, double phase_b) {
  require(std::isfinite(y_weight) && y_weight >= 0.0 && y_weight <= 2.0 / 3.0, ErrorKind::OutOfRange,
          "y_weight must lie in [0, 2/3]");
  require(std::isfinite(phase_y) && std::isfinite(phase_b), ErrorKind::OutOfRange, "phases must be finite");
  CVector v(3);
  v(0) = std::sqrt(kRedProbability);
  v(1) = std::polar(std::sqrt(y_weight), phase_y);
  v(2) = std::polar(std::sqrt(std::max(0.0, 2.0 / 3.0 - y_weight)), phase_b);
  return EllsbergState(StateVector(v));
}

Pvm color_context() { return Pvm::canonical({"red", "yellow", "black"}); }

BlockRotation AmbiguityAttitudeModel::rotation_for(const std::string& act) const {
  const auto it = rotations.find(act);
  return it == rotations.end() ? BlockRotation{} : it->second;
}

ActOperator act_operator(const Act& act, const UtilityFunction& u, const AmbiguityAttitudeModel& model) {
  require_ellsberg_colors(act);
  const double ur = u(act.payoffs.at("red"));
  const double uy = u(act.payoffs.at("yellow"));
  const double ub = u(act.payoffs.at("black"));
  const BlockRotation rot = model.mechanism == Mechanism::Rotated ? model.rotation_for(act.name) : BlockRotation{};
  const CMatrix r = rot.matrix();
  CMatrix block = CMatrix::Zero(2, 2);
  block(0, 0) = uy;
  block(1, 1) = ub;
  CMatrix f = CMatrix::Zero(3, 3);
  f(0, 0) = ur;
  f.block(1, 1, 2, 2) = r * block * r.adjoint();
  std::string recipe = "u(" + std::to_string(act.payoffs.at("red")) + ") P_red + u(" +
                       std::to_string(act.payoffs.at("yellow")) + ") P_yellow' + u(" +
                       std::to_string(act.payoffs.at("black")) + ") P_black'";
  if (rot.theta != 0.0 || rot.phi != 0.0)
    recipe += " [theta=" + std::to_string(rot.theta) + ", phi=" + std::to_string(rot.phi) + "]";
  return {act.name, HermitianOperator(f), std::move(recipe)};
}

ActOperator act_operator(const UrnExperiment& exp, const std::string& act, const UtilityFunction& u,
                         const AmbiguityAttitudeModel& model) {
  return act_operator(exp.act(act), u, model);
}

double quantum_expected_utility(const EllsbergState& state, const ActOperator& f) {
  return expectation(state.vector(), f.op);
}

UnitaryOperator context_unitary(const BlockRotation& r) {
  return UnitaryOperator(embed_blocks(3, {{1, r.matrix().adjoint()}}));
}

EllsbergState apply_context(const EllsbergState& state, const UnitaryOperator& context) {
  const StateVector moved = normalize(context.apply(state.vector().amplitudes()));
  const double red = moved.weight(0);
  if (std::abs(red - kRedProbability) > 1e-8)
    fail(ErrorKind::ConstraintViolated, "context moves red probability to " + std::to_string(red));
  // Re-pin the red weight to the constraint so the invariant holds exactly.
  CVector v = moved.amplitudes();
  v(0) *= std::sqrt(kRedProbability / red);
  return EllsbergState(normalize(v));
}

double model_expected_utility(const EllsbergState& state, const Act& act, const UtilityFunction& u,
                              const AmbiguityAttitudeModel& model) {
  switch (model.mechanism) {
    case Mechanism::Rotated: return quantum_expected_utility(state, act_operator(act, u, model));
    case Mechanism::Contextual: {
      const EllsbergState moved = apply_context(state, context_unitary(model.rotation_for(act.name)));
      return quantum_expected_utility(moved, act_operator(act, u, model));
    }
    case Mechanism::Canonical: break;
  }
  return quantum_expected_utility(state, act_operator(act, u, model));
}

PatternModel find_pattern_model(const UrnExperiment& exp, const PreferencePattern& pattern, Mechanism mechanism,
                                std::uint64_t seed, const PatternSearchOptions& options) {
  pattern.check_acts(exp);
  require(exp.urn.colors == std::vector<std::string>{"red", "yellow", "black"}, ErrorKind::ColorMismatch,
          "quantum Ellsberg model needs colors (red, yellow, black)");
  require(std::abs(known_probability(exp.urn, "red") - kRedProbability) <= 1e-12, ErrorKind::ColorMismatch,
          "quantum Ellsberg model needs p(red) = 1/3");
  const UtilityFunction& u = exp.utility;
  const double required = options.margin_fraction * largest_utility(exp, u);
  const double scale = std::max(largest_utility(exp, u), 1e-300);

  ParamSpace space;
  space.add("y_weight", 0.0, 2.0 / 3.0).add_angle("phase_y").add_angle("phase_b");

  // Each rotation slot feeds one or more acts.
  std::vector<std::vector<std::string>> slots;
  if (mechanism == Mechanism::Rotated) {
    std::set<std::string> seen;
    for (const auto& p : pattern.items())
      for (const auto* name : {&p.better, &p.worse})
        if (is_ambiguous(exp.act(*name)) && seen.insert(*name).second) slots.push_back({*name});
  } else if (mechanism == Mechanism::Contextual) {
    std::set<std::string> seen;
    for (const auto& p : pattern.items()) {
      require(seen.insert(p.better).second && seen.insert(p.worse).second, ErrorKind::InvalidPattern,
              "contextual mechanism needs each act in a single bet pair");
      slots.push_back({p.better, p.worse});
    }
  }
  for (std::size_t k = 0; k < slots.size(); ++k) {
    space.add("theta_" + std::to_string(k), 0.0, std::numbers::pi, true);
    space.add_angle("phi_" + std::to_string(k));
  }

  auto decode = [&](std::span<const double> x) {
    AmbiguityAttitudeModel model;
    model.mechanism = mechanism;
    for (std::size_t k = 0; k < slots.size(); ++k)
      for (const auto& act : slots[k]) model.rotations[act] = BlockRotation{x[3 + 2 * k], x[4 + 2 * k]};
    return std::pair{build_ellsberg_state(x[0], x[1], x[2]), std::move(model)};
  };

  const double target = 1.2 * required;
  const auto& prefs = pattern.items();
  Objective objective = [&](std::span<const double> x) {
    const auto [state, model] = decode(x);
    double loss = 0.0;
    for (const auto& p : prefs) {
      const double d = model_expected_utility(state, exp.act(p.better), u, model) -
                       model_expected_utility(state, exp.act(p.worse), u, model);
      const double gap = std::max(0.0, target - d) / scale;
      loss += gap * gap;
    }
    return loss;
  };

  SearchOptions so;
  so.target = 0.0;
  so.execution = options.execution;
  const FitResult fit = minimize(objective, space, seed, options.budget, so);

  auto [state, model] = decode(fit.params);
  PatternModel out{std::move(model), std::move(state), {}, {}, required, fit};
  for (const auto& a : exp.acts) {
    // Acts constant on span{yellow, black} are state independent; report the exact value.
    const double y = a.payoffs.at("yellow"), b = a.payoffs.at("black");
    out.expected_utility[a.name] = y == b ? (u(a.payoffs.at("red")) + 2.0 * u(y)) / 3.0
                                          : model_expected_utility(out.state, a, u, out.model);
  }
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : prefs) {
    const double m = out.expected_utility.at(p.better) - out.expected_utility.at(p.worse);
    out.margins.push_back(m);
    worst = std::min(worst, m);
  }
  if (!(worst >= required))
    fail(ErrorKind::NotFound, "pattern " + pattern.to_string() + " not reproduced by the " +
                                  std::string(to_string(mechanism)) + " mechanism; best margin " +
                                  std::to_string(worst) + " < " + std::to_string(required));
  return out;
}

EllsbergState random_ellsberg_state(std::uint64_t seed, int index) {
  std::mt19937_64 rng(restart_seed(seed, index));
  const double y = uniform01(rng) * 2.0 / 3.0;
  const double py = uniform01(rng) * kTwoPi;
  const double pb = uniform01(rng) * kTwoPi;
  return build_ellsberg_state(y, py, pb);
}

bool ambiguity_free_check(const ActOperator& f, int samples, std::uint64_t seed) {
  require(samples >= 1000, ErrorKind::OutOfRange, "ambiguity_free_check needs >= 1000 samples");
  std::vector<double> eu(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) eu[k] = quantum_expected_utility(random_ellsberg_state(seed, k), f);
  double mean = 0.0;
  for (double v : eu) mean += v;
  mean /= samples;
  double var = 0.0;
  for (double v : eu) var += (v - mean) * (v - mean);
  var /= samples;
  return var < 1e-18;
}

}  // namespace qdu
