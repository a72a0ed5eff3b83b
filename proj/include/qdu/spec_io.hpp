#pragma once

// JSON experiment specs (schema/experiment.schema.json) and model parameter
// serialization.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdu/choice.hpp"
#include "qdu/ellsberg.hpp"
#include "qdu/machina.hpp"
#include "qdu/urn.hpp"

namespace qdu {

inline constexpr int kSchemaVersion = 1;

/// Quantum model parameters as stored in a spec or emitted by fit-state.
struct QuantumModelSpec {
  int dimension = 3;
  Mechanism mechanism = Mechanism::Rotated;
  CVector amplitudes;                                             // state in the urn color basis
  std::map<std::string, std::vector<BlockRotation>> rotations;  // per act, one entry per ambiguous block

  bool operator==(const QuantumModelSpec& o) const {
    return dimension == o.dimension && mechanism == o.mechanism && amplitudes == o.amplitudes && rotations == o.rotations;
  }
};

struct ExperimentSpec {
  int schema_version = kSchemaVersion;
  UrnExperiment experiment;
  std::optional<std::map<std::set<std::string>, double>> capacity;
  std::optional<QuantumModelSpec> model;

  bool operator==(const ExperimentSpec&) const = default;
};

/// Throws Error(InvalidSpec) on malformed JSON or schema violations, and the
/// urn_model errors on inconsistent urns or acts.
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::string& path);
nlohmann::json to_json(const ExperimentSpec& spec);
std::string serialize_spec(const ExperimentSpec& spec);

/// "ellsberg" or "machina".
ExperimentSpec builtin_spec(const std::string& name);

nlohmann::json complex_array(const CVector& v);
CVector complex_from_json(const nlohmann::json& j);

nlohmann::json to_json(const QuantumModelSpec& m);
QuantumModelSpec model_from_json(const nlohmann::json& j);
QuantumModelSpec to_model_spec(const PatternModel& p);
QuantumModelSpec to_model_spec(const MachinaPatternModel& p);

nlohmann::json to_json(const UtilityFunction& u);
nlohmann::json to_json(const ProbabilityVector& p);
nlohmann::json to_json(const FeasibilityVerdict& v);
nlohmann::json to_json(const FitResult& f);
nlohmann::json to_json(const ChoiceModel& m);

}  // namespace qdu
