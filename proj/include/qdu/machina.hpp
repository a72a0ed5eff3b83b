#pragma once

// Quantum model of the Machina reflection urn on C^4, basis
// (red, yellow, black, green). Informational symmetry pins the weight of each
// ambiguous block span{red, yellow} and span{black, green} to 1/2.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "qdu/baselines.hpp"
#include "qdu/ellsberg.hpp"

namespace qdu {

class MachinaState {
 public:
  /// ConstraintViolated unless |v_red|^2 + |v_yellow|^2 = 1/2 within 1e-10.
  explicit MachinaState(StateVector v);

  const StateVector& vector() const noexcept { return v_; }

 private:
  StateVector v_;
};

/// Amplitudes (sqrt(ry), sqrt(1/2 - ry) e^{i p0}, sqrt(bg) e^{i p1}, sqrt(1/2 - bg) e^{i p2}).
MachinaState build_machina_state(double ry_split, double bg_split, const std::array<double, 3>& phases);

/// Rotations confined to the two ambiguous blocks: [0] acts on span{red, yellow},
/// [1] on span{black, green}.
struct MachinaModel {
  Mechanism mechanism = Mechanism::Rotated;
  std::map<std::string, std::array<BlockRotation, 2>> rotations;

  std::array<BlockRotation, 2> rotation_for(const std::string& act) const;
  bool operator==(const MachinaModel&) const = default;
};

ActOperator machina_act_operator(const Act& act, const UtilityFunction& u, const MachinaModel& model);

/// One operator per act of the experiment, in experiment order.
std::vector<ActOperator> machina_act_operators(const UrnExperiment& exp, const UtilityFunction& u,
                                               const MachinaModel& model);

double machina_expected_utility(const MachinaState& state, const Act& act, const UtilityFunction& u,
                                const MachinaModel& model);

struct MachinaPatternModel {
  MachinaModel model;
  MachinaState state;
  std::map<std::string, double> expected_utility;
  std::vector<double> margins;
  double required_margin = 0.0;
  FitResult search;
};

struct MachinaSearchOptions {
  Budget budget{64, 500};
  Execution execution = Execution::Parallel;
  double margin = 0.5;  // money units
};

MachinaPatternModel machina_pattern_search(const UrnExperiment& exp, const PreferencePattern& pattern,
                                           Mechanism mechanism, std::uint64_t seed,
                                           const MachinaSearchOptions& options = {});

/// SEUT feasibility on the Machina urn, p_R + p_Y = p_B + p_G = 1/2.
FeasibilityVerdict machina_seut_infeasibility(const PreferencePattern& pattern, int grid = 101,
                                              Execution execution = Execution::Parallel);

}  // namespace qdu
