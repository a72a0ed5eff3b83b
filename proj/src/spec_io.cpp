#include "qdu/spec_io.hpp"

#include <fstream>
#include <sstream>

namespace qdu {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorKind::InvalidSpec, msg); }

const json& field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) bad(where + ": missing '" + key + "'");
  return *it;
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) bad(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) bad(where + ": unexpected key '" + key + "'");
  }
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where + ": expected a string");
  return j.get<std::string>();
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where + ": expected an integer");
  return j.get<int>();
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where + ": expected a number");
  return j.get<double>();
}

std::vector<std::string> as_strings(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(as_string(e, where));
  return out;
}

UtilityFunction utility_from_json(const json& j) {
  only_keys(j, {"form", "alpha", "lambda"}, "utility");
  const std::string form = as_string(field(j, "form", "utility"), "utility.form");
  if (form == "linear") return UtilityFunction::linear();
  if (form == "power") return UtilityFunction::power(as_number(field(j, "alpha", "utility"), "utility.alpha"));
  if (form == "exponential")
    return UtilityFunction::exponential(as_number(field(j, "lambda", "utility"), "utility.lambda"));
  bad("utility.form: unknown form '" + form + "'");
}

constexpr const char* kObservedKeys[4] = {"f1_f3", "f1_f4", "f2_f3", "f2_f4"};

}  // namespace

json complex_array(const CVector& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    a.push_back(v(k).real());
    a.push_back(v(k).imag());
  }
  return a;
}

CVector complex_from_json(const json& j) {
  if (!j.is_array() || j.size() % 2 != 0 || j.empty()) bad("expected an interleaved [re, im, ...] array");
  CVector v(static_cast<Eigen::Index>(j.size() / 2));
  for (std::size_t k = 0; k < j.size() / 2; ++k)
    v(static_cast<Eigen::Index>(k)) = Complex(as_number(j[2 * k], "re"), as_number(j[2 * k + 1], "im"));
  return v;
}

json to_json(const UtilityFunction& u) {
  switch (u.form()) {
    case UtilityFunction::Form::Linear: return {{"form", "linear"}};
    case UtilityFunction::Form::Power: return {{"form", "power"}, {"alpha", u.parameter()}};
    case UtilityFunction::Form::Exponential: return {{"form", "exponential"}, {"lambda", u.parameter()}};
  }
  return {};
}

json to_json(const ProbabilityVector& p) {
  json j = json::object();
  for (const auto& [c, v] : p.values()) j[c] = v;
  return j;
}

json to_json(const QuantumModelSpec& m) {
  json rot = json::object();
  for (const auto& [act, blocks] : m.rotations) {
    json arr = json::array();
    for (const auto& r : blocks) arr.push_back({{"theta", r.theta}, {"phi", r.phi}});
    rot[act] = arr;
  }
  return {{"dimension", m.dimension},
          {"mechanism", std::string(to_string(m.mechanism))},
          {"state", complex_array(m.amplitudes)},
          {"rotations", rot}};
}

QuantumModelSpec model_from_json(const json& j) {
  only_keys(j, {"dimension", "mechanism", "state", "rotations"}, "model");
  QuantumModelSpec m;
  m.dimension = as_int(field(j, "dimension", "model"), "model.dimension");
  if (m.dimension != 3 && m.dimension != 4) bad("model.dimension must be 3 or 4");
  m.mechanism = parse_mechanism(as_string(field(j, "mechanism", "model"), "model.mechanism"));
  m.amplitudes = complex_from_json(field(j, "state", "model"));
  if (m.amplitudes.size() != m.dimension) bad("model.state has the wrong dimension");
  try {
    StateVector check(m.amplitudes);
  } catch (const Error& e) {
    bad(std::string("model.state: ") + e.what());
  }
  if (const auto it = j.find("rotations"); it != j.end()) {
    if (!it->is_object()) bad("model.rotations: expected an object");
    for (const auto& [act, arr] : it->items()) {
      if (!arr.is_array() || arr.size() != static_cast<std::size_t>(m.dimension == 3 ? 1 : 2))
        bad("model.rotations." + act + ": expected one rotation per ambiguous block");
      for (const auto& r : arr) {
        only_keys(r, {"theta", "phi"}, "model.rotations." + act);
        m.rotations[act].push_back({as_number(field(r, "theta", act), "theta"), as_number(field(r, "phi", act), "phi")});
      }
    }
  }
  return m;
}

ExperimentSpec parse_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
  only_keys(j, {"schema_version", "name", "urn", "acts", "utility", "observed", "capacity", "model"}, "spec");

  ExperimentSpec spec;
  spec.schema_version = as_int(field(j, "schema_version", "spec"), "schema_version");
  if (spec.schema_version != kSchemaVersion) bad("unsupported schema_version " + std::to_string(spec.schema_version));
  UrnExperiment& e = spec.experiment;
  e.name = j.contains("name") ? as_string(j["name"], "name") : "experiment";

  const json& urn = field(j, "urn", "spec");
  only_keys(urn, {"colors", "total", "known_counts", "unknown_groups"}, "urn");
  e.urn.colors = as_strings(field(urn, "colors", "urn"), "urn.colors");
  e.urn.total = as_int(field(urn, "total", "urn"), "urn.total");
  if (const auto it = urn.find("known_counts"); it != urn.end()) {
    if (!it->is_object()) bad("urn.known_counts: expected an object");
    for (const auto& [c, n] : it->items()) e.urn.known_counts[c] = as_int(n, "urn.known_counts." + c);
  }
  if (const auto it = urn.find("unknown_groups"); it != urn.end()) {
    if (!it->is_array()) bad("urn.unknown_groups: expected an array");
    for (const auto& g : *it) {
      only_keys(g, {"colors", "total"}, "urn.unknown_groups[]");
      e.urn.unknown_groups.push_back({as_strings(field(g, "colors", "group"), "group.colors"),
                                      as_int(field(g, "total", "group"), "group.total")});
    }
  }

  const json& acts = field(j, "acts", "spec");
  if (!acts.is_array()) bad("acts: expected an array");
  for (const auto& a : acts) {
    only_keys(a, {"name", "payoffs"}, "acts[]");
    Act act;
    act.name = as_string(field(a, "name", "act"), "act.name");
    const json& pay = field(a, "payoffs", "act " + act.name);
    if (!pay.is_object()) bad("act " + act.name + ": payoffs must be an object");
    for (const auto& [c, x] : pay.items()) act.payoffs[c] = as_number(x, "act " + act.name + "." + c);
    e.acts.push_back(std::move(act));
  }

  if (const auto it = j.find("utility"); it != j.end()) e.utility = utility_from_json(*it);

  if (const auto it = j.find("observed"); it != j.end()) {
    only_keys(*it, {"f1_f3", "f1_f4", "f2_f3", "f2_f4"}, "observed");
    ChoiceCounts c;
    int* slots[4] = {&c.f1_f3, &c.f1_f4, &c.f2_f3, &c.f2_f4};
    for (int k = 0; k < 4; ++k) *slots[k] = as_int(field(*it, kObservedKeys[k], "observed"), kObservedKeys[k]);
    e.observed = c;
  }

  if (const auto it = j.find("capacity"); it != j.end()) {
    if (!it->is_array()) bad("capacity: expected an array of {event, value}");
    std::map<std::set<std::string>, double> cap;
    for (const auto& entry : *it) {
      only_keys(entry, {"event", "value"}, "capacity[]");
      const auto colors = as_strings(field(entry, "event", "capacity"), "capacity.event");
      cap[std::set<std::string>(colors.begin(), colors.end())] = as_number(field(entry, "value", "capacity"), "capacity.value");
    }
    spec.capacity = std::move(cap);
  }

  if (const auto it = j.find("model"); it != j.end()) {
    spec.model = model_from_json(*it);
    if (static_cast<std::size_t>(spec.model->dimension) != e.urn.colors.size())
      bad("model.dimension does not match the number of urn colors");
  }

  e.validate();
  if (spec.capacity) Capacity::from_events(e.urn.colors, *spec.capacity);
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  if (path.rfind("builtin:", 0) == 0) return builtin_spec(path.substr(8));
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot read spec file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

json to_json(const ExperimentSpec& spec) {
  const UrnExperiment& e = spec.experiment;
  json urn = {{"colors", e.urn.colors}, {"total", e.urn.total}, {"known_counts", json::object()},
              {"unknown_groups", json::array()}};
  for (const auto& [c, n] : e.urn.known_counts) urn["known_counts"][c] = n;
  for (const auto& g : e.urn.unknown_groups) urn["unknown_groups"].push_back({{"colors", g.colors}, {"total", g.total}});
  json acts = json::array();
  for (const auto& a : e.acts) {
    json pay = json::object();
    for (const auto& [c, x] : a.payoffs) pay[c] = x;
    acts.push_back({{"name", a.name}, {"payoffs", pay}});
  }
  json j = {{"schema_version", spec.schema_version}, {"name", e.name}, {"urn", urn}, {"acts", acts},
            {"utility", to_json(e.utility)}};
  if (e.observed)
    j["observed"] = {{"f1_f3", e.observed->f1_f3}, {"f1_f4", e.observed->f1_f4}, {"f2_f3", e.observed->f2_f3},
                     {"f2_f4", e.observed->f2_f4}};
  if (spec.capacity) {
    json cap = json::array();
    for (const auto& [event, v] : *spec.capacity) {
      std::vector<std::string> ordered;
      for (const auto& c : e.urn.colors)
        if (event.count(c)) ordered.push_back(c);
      cap.push_back({{"event", ordered}, {"value", v}});
    }
    j["capacity"] = cap;
  }
  if (spec.model) j["model"] = to_json(*spec.model);
  return j;
}

std::string serialize_spec(const ExperimentSpec& spec) { return to_json(spec).dump(2) + "\n"; }

ExperimentSpec builtin_spec(const std::string& name) {
  ExperimentSpec s;
  if (name == "ellsberg") {
    s.experiment = ellsberg_urn();
    // Convex capacity that reproduces the f1 > f2, f4 > f3 pattern.
    s.capacity = std::map<std::set<std::string>, double>{{{}, 0.0},
                                                         {{"red"}, 1.0 / 3.0},
                                                         {{"yellow"}, 0.25},
                                                         {{"black"}, 0.25},
                                                         {{"red", "yellow"}, 7.0 / 12.0},
                                                         {{"red", "black"}, 7.0 / 12.0},
                                                         {{"yellow", "black"}, 2.0 / 3.0},
                                                         {{"red", "yellow", "black"}, 1.0}};
  } else if (name == "machina") {
    s.experiment = machina_urn();
  } else {
    bad("unknown built-in experiment '" + name + "'");
  }
  return s;
}

QuantumModelSpec to_model_spec(const PatternModel& p) {
  QuantumModelSpec m;
  m.dimension = 3;
  m.mechanism = p.model.mechanism;
  m.amplitudes = p.state.vector().amplitudes();
  for (const auto& [act, r] : p.model.rotations) m.rotations[act] = {r};
  return m;
}

QuantumModelSpec to_model_spec(const MachinaPatternModel& p) {
  QuantumModelSpec m;
  m.dimension = 4;
  m.mechanism = p.model.mechanism;
  m.amplitudes = p.state.vector().amplitudes();
  for (const auto& [act, r] : p.model.rotations) m.rotations[act] = {r[0], r[1]};
  return m;
}

json to_json(const FeasibilityVerdict& v) {
  json j = {{"verdict", v.feasible ? "feasible" : "infeasible"},
            {"grid_resolution", v.grid_resolution},
            {"utilities_sampled", v.utilities},
            {"points_evaluated", v.points_evaluated}};
  if (v.witness)
    j["witness"] = {{"prior", to_json(v.witness->prior)}, {"utility", v.witness->utility.describe()},
                    {"margins", v.witness->margins}};
  if (v.certificate) {
    json ineq = json::array();
    for (const auto& q : v.certificate->inequalities) ineq.push_back(q.text);
    j["certificate"] = {{"inequalities", ineq},
                        {"combined", v.certificate->combined},
                        {"multipliers", v.certificate->multipliers},
                        {"explanation", v.certificate->explanation}};
  } else {
    j["certificate"] = nullptr;
  }
  return j;
}

json to_json(const FitResult& f) {
  return {{"objective", f.value},        {"restarts_used", f.restarts_used}, {"iterations_used", f.iterations_used},
          {"seed", f.seed},              {"converged", f.converged},         {"best_restart", f.best_restart},
          {"parameters", f.params}};
}

json to_json(const ChoiceModel& m) {
  json cols = json::array();
  json labels = json::array();
  if (m.pair.basis()) {
    for (Eigen::Index k = 0; k < m.pair.basis()->cols(); ++k) cols.push_back(complex_array(m.pair.basis()->col(k)));
    for (const auto& l : m.pair.labels())
      labels.push_back({{"o12", l.o12}, {"o34", l.o34}, {"cell", kCellNames[static_cast<int>(l.cell())]}});
  }
  json joint = json::object();
  for (int k = 0; k < 4; ++k) joint[kCellNames[k]] = m.joint.cells()[k];
  return {{"state", complex_array(m.state.amplitudes())},
          {"basis_columns", cols},
          {"labels", labels},
          {"joint", joint},
          {"marginals", {{"f1", m.marginals.f1}, {"f2", m.marginals.f2}, {"f3", m.marginals.f3}, {"f4", m.marginals.f4}}},
          {"commutator_norm", commutator_norm(m.pair.o12(), m.pair.o34())},
          {"red_probability", m.state.weight(0)}};
}

}  // namespace qdu
