#include "qdu/machina.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace qdu {

namespace {

const std::vector<std::string> kColors{"red", "yellow", "black", "green"};

void require_machina_colors(const Act& act) {
  for (const auto& c : kColors)
    require(act.payoffs.count(c) == 1, ErrorKind::ColorMismatch, "act " + act.name + " has no payoff for " + c);
  require(act.payoffs.size() == 4, ErrorKind::ColorMismatch, "act " + act.name + " is not a four-color act");
}

bool block_ambiguous(const Act& act, int block) {
  return act.payoffs.at(kColors[2 * block]) != act.payoffs.at(kColors[2 * block + 1]);
}

}  // namespace

MachinaState::MachinaState(StateVector v) : v_(std::move(v)) {
  require(v_.dim() == 4, ErrorKind::DimensionMismatch, "Machina state lives in C^4");
  const double ry = v_.weight(0) + v_.weight(1);
  require(std::abs(ry - 0.5) <= tol::kAlgebraic, ErrorKind::ConstraintViolated,
          "red+yellow probability " + std::to_string(ry) + " != 1/2");
}

MachinaState build_machina_state(double ry_split, double bg_split, const std::array<double, 3>& phases) {
  require(std::isfinite(ry_split) && ry_split >= 0.0 && ry_split <= 0.5, ErrorKind::OutOfRange,
          "ry_split must lie in [0, 1/2]");
  require(std::isfinite(bg_split) && bg_split >= 0.0 && bg_split <= 0.5, ErrorKind::OutOfRange,
          "bg_split must lie in [0, 1/2]");
  for (double p : phases) require(std::isfinite(p), ErrorKind::OutOfRange, "phases must be finite");
  CVector v(4);
  v(0) = std::sqrt(ry_split);
  v(1) = std::polar(std::sqrt(std::max(0.0, 0.5 - ry_split)), phases[0]);
  v(2) = std::polar(std::sqrt(bg_split), phases[1]);
  v(3) = std::polar(std::sqrt(std::max(0.0, 0.5 - bg_split)), phases[2]);
  return MachinaState(StateVector(v));
}

std::array<BlockRotation, 2> MachinaModel::rotation_for(const std::string& act) const {
  const auto it = rotations.find(act);
  return it == rotations.end() ? std::array<BlockRotation, 2>{} : it->second;
}

ActOperator machina_act_operator(const Act& act, const UtilityFunction& u, const MachinaModel& model) {
  require_machina_colors(act);
  const auto rot = model.mechanism == Mechanism::Rotated ? model.rotation_for(act.name) : std::array<BlockRotation, 2>{};
  std::vector<std::pair<int, CMatrix>> blocks;
  for (int b = 0; b < 2; ++b) {
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = u(act.payoffs.at(kColors[2 * b]));
    d(1, 1) = u(act.payoffs.at(kColors[2 * b + 1]));
    const CMatrix r = rot[b].matrix();
    blocks.emplace_back(2 * b, r * d * r.adjoint());
  }
  std::string recipe;
  for (const auto& c : kColors)
    recipe += (recipe.empty() ? "" : " + ") + std::string("u(") + std::to_string(act.payoffs.at(c)) + ") P_" + c;
  return {act.name, HermitianOperator(embed_blocks(4, blocks)), std::move(recipe)};
}

std::vector<ActOperator> machina_act_operators(const UrnExperiment& exp, const UtilityFunction& u,
                                               const MachinaModel& model) {
  std::vector<ActOperator> out;
  for (const auto& a : exp.acts) out.push_back(machina_act_operator(a, u, model));
  return out;
}

double machina_expected_utility(const MachinaState& state, const Act& act, const UtilityFunction& u,
                                const MachinaModel& model) {
  const ActOperator f = machina_act_operator(act, u, model);
  if (model.mechanism != Mechanism::Contextual) return expectation(state.vector(), f.op);
  const auto rot = model.rotation_for(act.name);
  const UnitaryOperator ctx(embed_blocks(4, {{0, rot[0].matrix().adjoint()}, {2, rot[1].matrix().adjoint()}}));
  const MachinaState moved(normalize(ctx.apply(state.vector().amplitudes())));
  return expectation(moved.vector(), f.op);
}

MachinaPatternModel machina_pattern_search(const UrnExperiment& exp, const PreferencePattern& pattern,
                                           Mechanism mechanism, std::uint64_t seed,
                                           const MachinaSearchOptions& options) {
  pattern.check_acts(exp);
  require(exp.urn.colors == kColors, ErrorKind::ColorMismatch,
          "quantum Machina model needs colors (red, yellow, black, green)");
  const UtilityFunction& u = exp.utility;

  ParamSpace space;
  space.add("ry_split", 0.0, 0.5).add("bg_split", 0.0, 0.5).add_angle("phase_y").add_angle("phase_b").add_angle("phase_g");

  // slot -> (acts sharing it, block index)
  struct Slot {
    std::vector<std::string> acts;
    int block;
  };
  std::vector<Slot> slots;
  if (mechanism == Mechanism::Rotated) {
    std::set<std::string> seen;
    for (const auto& p : pattern.items())
      for (const auto* name : {&p.better, &p.worse})
        if (seen.insert(*name).second)
          for (int b = 0; b < 2; ++b)
            if (block_ambiguous(exp.act(*name), b)) slots.push_back({{*name}, b});
  } else if (mechanism == Mechanism::Contextual) {
    std::set<std::string> seen;
    for (const auto& p : pattern.items()) {
      require(seen.insert(p.better).second && seen.insert(p.worse).second, ErrorKind::InvalidPattern,
              "contextual mechanism needs each act in a single bet pair");
      for (int b = 0; b < 2; ++b) slots.push_back({{p.better, p.worse}, b});
    }
  }
  for (std::size_t k = 0; k < slots.size(); ++k) {
    space.add("theta_" + std::to_string(k), 0.0, std::numbers::pi, true);
    space.add_angle("phi_" + std::to_string(k));
  }

  auto decode = [&](std::span<const double> x) {
    MachinaModel model;
    model.mechanism = mechanism;
    for (std::size_t k = 0; k < slots.size(); ++k)
      for (const auto& act : slots[k].acts) {
        auto& r = model.rotations[act];
        r[slots[k].block] = BlockRotation{x[5 + 2 * k], x[6 + 2 * k]};
      }
    return std::pair{build_machina_state(x[0], x[1], {x[2], x[3], x[4]}), std::move(model)};
  };

  double scale = 0.0;
  for (const auto& a : exp.acts)
    for (const auto& [c, v] : a.payoffs) scale = std::max(scale, u(v));
  scale = std::max(scale, 1e-300);
  const double target = 1.2 * options.margin;
  const auto& prefs = pattern.items();
  Objective objective = [&](std::span<const double> x) {
    const auto [state, model] = decode(x);
    double loss = 0.0;
    for (const auto& p : prefs) {
      const double d = machina_expected_utility(state, exp.act(p.better), u, model) -
                       machina_expected_utility(state, exp.act(p.worse), u, model);
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
  MachinaPatternModel out{std::move(model), std::move(state), {}, {}, options.margin, fit};
  for (const auto& a : exp.acts) out.expected_utility[a.name] = machina_expected_utility(out.state, a, u, out.model);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : prefs) {
    const double m = out.expected_utility.at(p.better) - out.expected_utility.at(p.worse);
    out.margins.push_back(m);
    worst = std::min(worst, m);
  }
  if (!(worst >= options.margin))
    fail(ErrorKind::NotFound, "pattern " + pattern.to_string() + " not reproduced by the " +
                                  std::string(to_string(mechanism)) + " mechanism; best margin " +
                                  std::to_string(worst));
  return out;
}

FeasibilityVerdict machina_seut_infeasibility(const PreferencePattern& pattern, int grid, Execution execution) {
  return seut_pattern_feasibility(machina_urn(), pattern, default_utility_family(), grid, execution);
}

}  // namespace qdu
