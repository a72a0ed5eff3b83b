#pragma once

// Quantum model of the three-color Ellsberg urn on C^3 with basis
// (red, yellow, black). The red amplitude carries the known probability 1/3;
// ambiguity lives in span{yellow, black}.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qdu/baselines.hpp"
#include "qdu/hilbert.hpp"
#include "qdu/optimizer.hpp"
#include "qdu/urn.hpp"

namespace qdu {

inline constexpr double kRedProbability = 1.0 / 3.0;

/// How the ambiguous acts f2, f3 acquire state dependence.
///  - Contextual: a block unitary on span{yellow, black} acts on the state per bet pair.
///  - Rotated: act-specific eigenprojectors inside span{yellow, black}.
///  - Canonical: no rotation at all; one state for every act.
enum class Mechanism { Contextual, Rotated, Canonical };

std::string_view to_string(Mechanism m) noexcept;
Mechanism parse_mechanism(const std::string& text);

/// 2x2 rotation of an ambiguous block:
///   first'  =  cos(theta) e1 + e^{i phi} sin(theta) e2
///   second' = -e^{-i phi} sin(theta) e1 + cos(theta) e2
struct BlockRotation {
  double theta = 0.0;
  double phi = 0.0;

  CMatrix matrix() const;
  bool operator==(const BlockRotation&) const = default;
};

/// Embeds 2x2 blocks on consecutive index pairs into the identity of size n.
CMatrix embed_blocks(int n, const std::vector<std::pair<int, CMatrix>>& blocks);

class EllsbergState {
 public:
  /// ConstraintViolated unless |<red|v>|^2 = 1/3 within 1e-10.
  explicit EllsbergState(StateVector v);

  const StateVector& vector() const noexcept { return v_; }
  double red() const { return v_.weight(0); }
  double yellow() const { return v_.weight(1); }
  double black() const { return v_.weight(2); }

 private:
  StateVector v_;
};

/// Amplitudes (sqrt(1/3), sqrt(y) e^{i phase_y}, sqrt(2/3 - y) e^{i phase_b}).
EllsbergState build_ellsberg_state(double y_weight, double phase_y, double phase_b);

/// Canonical color measurement {P_red, P_yellow, P_black}.
Pvm color_context();

struct AmbiguityAttitudeModel {
  Mechanism mechanism = Mechanism::Rotated;
  std::map<std::string, BlockRotation> rotations;  // by act; absent means identity

  BlockRotation rotation_for(const std::string& act) const;
  bool operator==(const AmbiguityAttitudeModel&) const = default;
};

struct ActOperator {
  std::string act;
  HermitianOperator op;
  std::string recipe;
};

/// F = u(x_red) P_red + u(x_yellow) P_yellow' + u(x_black) P_black', with the
/// primed projectors rotated inside span{yellow, black} under the Rotated
/// mechanism and canonical otherwise.
ActOperator act_operator(const Act& act, const UtilityFunction& u, const AmbiguityAttitudeModel& model);
ActOperator act_operator(const UrnExperiment& exp, const std::string& act, const UtilityFunction& u,
                         const AmbiguityAttitudeModel& model);

double quantum_expected_utility(const EllsbergState& state, const ActOperator& f);

/// Block unitary diag(1, R^dagger) realizing a contextual rotation on the state.
UnitaryOperator context_unitary(const BlockRotation& r);

/// ConstraintViolated if the red probability moves by more than 1e-8.
EllsbergState apply_context(const EllsbergState& state, const UnitaryOperator& context);

/// EU of an act under the model: the rotated projectors, or the canonical
/// operator on the contextually rotated state.
double model_expected_utility(const EllsbergState& state, const Act& act, const UtilityFunction& u,
                              const AmbiguityAttitudeModel& model);

struct PatternModel {
  AmbiguityAttitudeModel model;
  EllsbergState state;
  std::map<std::string, double> expected_utility;
  std::vector<double> margins;  // per preference, EU(better) - EU(worse)
  double required_margin = 0.0;
  FitResult search;
};

struct PatternSearchOptions {
  Budget budget{64, 500};
  Execution execution = Execution::Parallel;
  double margin_fraction = 0.05;  // of u(largest payoff)
};

/// Multi-start search over the state (y_weight, phases) and the mechanism's
/// rotation angles. NotFound when no restart clears the margin.
PatternModel find_pattern_model(const UrnExperiment& exp, const PreferencePattern& pattern, Mechanism mechanism,
                                std::uint64_t seed, const PatternSearchOptions& options = {});

/// EU of the act under `samples` random valid Ellsberg states; true iff the
/// variance is below 1e-18.
bool ambiguity_free_check(const ActOperator& f, int samples, std::uint64_t seed = 0);

/// Random valid state from a seeded stream, for sampling and property tests.
EllsbergState random_ellsberg_state(std::uint64_t seed, int index);

}  // namespace qdu
