#include "qdu/commands.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "qdu/baselines.hpp"
#include "qdu/choice.hpp"
#include "qdu/ellsberg.hpp"
#include "qdu/machina.hpp"
#include "qdu/spec_io.hpp"

namespace qdu {

using nlohmann::json;

namespace {

const char* kDefaultPattern = "f1>f2,f4>f3";

std::string digest_of(const ExperimentSpec& spec, const json& args) {
  return sha256_hex(serialize_spec(spec) + args.dump());
}

Report make_report(const std::string& command, const ExperimentSpec& spec, json args, const GlobalOptions& g) {
  Report r;
  r.command = command;
  r.seed = g.seed;
  r.input_digest = digest_of(spec, args);
  r.results["arguments"] = std::move(args);
  return r;
}

json eu_table(const std::map<std::string, double>& eu) {
  json j = json::object();
  for (const auto& [k, v] : eu) j[k] = v;
  return j;
}

json pattern_model_json(const PatternModel& p) {
  return {{"mechanism", std::string(to_string(p.model.mechanism))},
          {"model", to_json(to_model_spec(p))},
          {"expected_utility", eu_table(p.expected_utility)},
          {"margins", p.margins},
          {"required_margin", p.required_margin},
          {"search", to_json(p.search)}};
}

json machina_model_json(const MachinaPatternModel& p) {
  return {{"mechanism", std::string(to_string(p.model.mechanism))},
          {"model", to_json(to_model_spec(p))},
          {"expected_utility", eu_table(p.expected_utility)},
          {"margins", p.margins},
          {"required_margin", p.required_margin},
          {"search", to_json(p.search)}};
}

json maxmin_table(const UrnExperiment& exp) {
  const PriorSet priors = PriorSet::full(exp.urn);
  json j = json::object();
  for (const auto& a : exp.acts) j[a.name] = maxmin_expected_utility(a, priors, exp.utility);
  return j;
}

json prior_box_json(const PriorSet& priors) {
  json j = json::array();
  for (const auto& c : priors.coordinates()) j.push_back({{"color", c.color}, {"lo", c.lo}, {"hi", c.hi}});
  return j;
}

std::pair<Capacity, std::string> capacity_for(const ExperimentSpec& spec) {
  if (spec.capacity) return {Capacity::from_events(spec.experiment.urn.colors, *spec.capacity), "spec"};
  return {Capacity::lower_envelope(PriorSet::full(spec.experiment.urn)), "lower_envelope"};
}

json choquet_table(const ExperimentSpec& spec, json& meta) {
  const auto [cap, source] = capacity_for(spec);
  meta = {{"capacity_source", source}, {"convex", cap.is_convex()}, {"additive", cap.is_additive()}};
  json j = json::object();
  for (const auto& a : spec.experiment.acts) j[a.name] = choquet_expected_utility(a, cap, spec.experiment.utility);
  return j;
}

json marginal_fit_json(const MarginalFit& fit, double p_f1, double p_f4) {
  return {{"targets", {{"f1", p_f1}, {"f4", p_f4}}},
          {"field", std::string(to_string(fit.field))},
          {"residual", fit.residual},
          {"model", to_json(fit.model)},
          {"search", to_json(fit.search)}};
}

json l1_json(const L1JointFit& l1, const JointDistribution& target) {
  json support = json::array();
  for (int k = 0; k < 4; ++k)
    if (l1.support[k]) support.push_back(kCellNames[k]);
  json observed = json::object(), best = json::object();
  for (int k = 0; k < 4; ++k) {
    observed[kCellNames[k]] = target.cells()[k];
    best[kCellNames[k]] = l1.best.cells()[k];
  }
  return {{"observed_joint", observed},
          {"distance", l1.distance},
          {"support", support},
          {"dropped", kCellNames[static_cast<int>(l1.dropped)]},
          {"closest", best}};
}

double fit_red_deviation(const MarginalFit& fit) { return std::abs(fit.model.state.weight(0) - kRedProbability); }

bool is_machina_shaped(const UrnExperiment& exp) { return exp.urn.colors.size() == 4; }

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find(',', pos);
    const std::string piece = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    char* end = nullptr;
    const double x = std::strtod(piece.c_str(), &end);
    if (piece.empty() || end == piece.c_str() || *end != '\0' || !std::isfinite(x))
      fail(ErrorKind::InvalidSpec, what + ": '" + piece + "' is not a finite number");
    out.push_back(x);
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

Complex parse_complex(const std::string& text, const std::string& what) {
  const auto v = parse_numbers(text, what);
  if (v.size() != 2) fail(ErrorKind::InvalidSpec, what + ": expected 're,im'");
  return {v[0], v[1]};
}

StateVector parse_state(const std::string& text, int dim, const std::string& what) {
  const auto v = parse_numbers(text, what);
  if (v.size() != static_cast<std::size_t>(2 * dim))
    fail(ErrorKind::DimensionMismatch, what + ": expected " + std::to_string(2 * dim) + " numbers (re,im per color)");
  CVector c(dim);
  for (int k = 0; k < dim; ++k) c(k) = Complex(v[2 * k], v[2 * k + 1]);
  return normalize(c);
}

std::pair<StateVector, StateVector> default_components(const ExperimentSpec& spec) {
  const int dim = static_cast<int>(spec.experiment.urn.colors.size());
  if (dim == 3) return {build_ellsberg_state(2.0 / 3.0, 0.0, 0.0).vector(), build_ellsberg_state(0.0, 0.0, 0.0).vector()};
  if (dim == 4 && spec.experiment.urn.colors == machina_urn().urn.colors)
    return {build_machina_state(0.5, 0.5, {0.0, 0.0, 0.0}).vector(), build_machina_state(0.0, 0.0, {0.0, 0.0, 0.0}).vector()};
  CVector e0 = CVector::Zero(dim), e1 = CVector::Zero(dim);
  e0(0) = 1.0;
  e1(1) = 1.0;
  return {StateVector(e0), StateVector(e1)};
}

}  // namespace

std::uint64_t default_seed() {
  const char* env = std::getenv("QDU_SEED");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || errno != 0 || env[0] == '-') fail(ErrorKind::InvalidSpec, "QDU_SEED must be an unsigned integer");
  return v;
}

Report cmd_demo(const std::string& target, const GlobalOptions& g) {
  const ExperimentSpec spec = builtin_spec(target);
  const UrnExperiment& exp = spec.experiment;
  const json args = {{"target", target}, {"tol", g.tol}};
  Report r = make_report("demo", spec, args, g);
  const PreferencePattern paradox = PreferencePattern::parse(kDefaultPattern);

  if (target == "ellsberg") {
    const FeasibilityVerdict verdict = seut_pattern_feasibility(exp, paradox, default_utility_family(), 101, g.execution);
    const FeasibilityVerdict consistent = seut_pattern_feasibility(
        exp, PreferencePattern::parse("f1>f2,f3>f4"), default_utility_family(), 101, g.execution);
    r.results["seut"] = {{"pattern", paradox.to_string()}, {"verdict", to_json(verdict)}};
    r.results["seut_consistent_pattern"] = {{"pattern", "f1>f2,f3>f4"}, {"verdict", to_json(consistent)}};
    r.results["sure_thing"] = [&] {
      const SureThingReport st = sure_thing_check(exp, {"f1", "f2"}, {"f3", "f4"}, {"yellow"}, paradox);
      return json{{"violates", st.violates}, {"explanation", st.explanation}};
    }();
    r.results["maxmin"] = maxmin_table(exp);
    json meta;
    r.results["choquet"] = choquet_table(spec, meta);
    r.results["choquet_capacity"] = meta;

    PatternSearchOptions po;
    po.execution = g.execution;
    json quantum = json::object();
    for (Mechanism m : {Mechanism::Rotated, Mechanism::Contextual})
      quantum[std::string(to_string(m))] = pattern_model_json(find_pattern_model(exp, paradox, m, g.seed, po));
    r.results["quantum_pattern"] = quantum;

    ChoiceFitOptions co;
    co.execution = g.execution;
    co.tolerance = g.tol;
    const MarginalFit fit = fit_marginals(0.68, 0.69, g.seed, co);
    r.results["marginal_fit"] = marginal_fit_json(fit, 0.68, 0.69);
    const JointDistribution observed = JointDistribution::from_counts(*exp.observed);
    r.results["joint_bound"] = l1_json(min_l1_joint_fit(observed), observed);
    r.residuals = {{"marginal_fit", fit.residual},
                   {"commutator_norm", commutator_norm(fit.model.pair.o12(), fit.model.pair.o34())},
                   {"red_deviation", fit_red_deviation(fit)}};
  } else {
    const FeasibilityVerdict verdict = machina_seut_infeasibility(paradox, 101, g.execution);
    r.results["seut"] = {{"pattern", paradox.to_string()}, {"verdict", to_json(verdict)}};
    r.results["maxmin"] = maxmin_table(exp);
    json meta;
    r.results["choquet"] = choquet_table(spec, meta);
    r.results["choquet_capacity"] = meta;

    MachinaSearchOptions mo;
    mo.execution = g.execution;
    json quantum = json::object();
    double worst_symmetry = 0.0;
    for (const char* p : {kDefaultPattern, "f2>f1,f3>f4"}) {
      const MachinaPatternModel m = machina_pattern_search(exp, PreferencePattern::parse(p), Mechanism::Rotated, g.seed, mo);
      const StateVector& v = m.state.vector();
      worst_symmetry = std::max(worst_symmetry, std::abs(v.weight(0) + v.weight(1) - 0.5));
      quantum[p] = machina_model_json(m);
    }
    r.results["quantum_pattern"] = quantum;
    r.residuals = {{"symmetry_deviation", worst_symmetry}};
  }
  return r;
}

Report cmd_check_seut(const std::string& spec_path, const std::string& pattern, int grid, const GlobalOptions& g) {
  const ExperimentSpec spec = load_spec(spec_path);
  const PreferencePattern p = PreferencePattern::parse(pattern);
  Report r = make_report("check-seut", spec, {{"pattern", p.to_string()}, {"grid", grid}}, g);
  const FeasibilityVerdict v = seut_pattern_feasibility(spec.experiment, p, default_utility_family(), grid, g.execution);
  r.results["prior_box"] = prior_box_json(PriorSet::full(spec.experiment.urn));
  r.results["verdict"] = to_json(v);
  if (v.witness) {
    double worst = std::numeric_limits<double>::infinity();
    for (double m : v.witness->margins) worst = std::min(worst, m);
    r.residuals["witness_min_margin"] = worst;
  }
  return r;
}

Report cmd_baselines(const std::string& spec_path, const std::string& model, const BaselineOptions& b,
                     const GlobalOptions& g) {
  const ExperimentSpec spec = load_spec(spec_path);
  const UrnExperiment& exp = spec.experiment;
  json args = {{"model", model}};
  if (model == "seut") {
    args["pattern"] = b.pattern;
    args["grid"] = b.grid;
  } else if (model == "variational") {
    args["penalty_weight"] = b.penalty_weight;
    args["grid"] = b.grid;
  } else if (model == "second-order") {
    args["phi_alpha"] = b.phi_alpha;
    args["mu_points"] = b.mu_points;
  } else if (model != "maxmin" && model != "choquet") {
    fail(ErrorKind::InvalidSpec, "unknown model '" + model + "'");
  }
  Report r = make_report("baselines", spec, args, g);
  const PriorSet priors = PriorSet::full(exp.urn);
  r.results["prior_box"] = prior_box_json(priors);

  json values = json::object();
  if (model == "seut") {
    const ProbabilityVector sym = symmetric_prior(exp.urn);
    for (const auto& a : exp.acts) values[a.name] = classical_expected_utility(a, sym, exp.utility);
    r.results["symmetric_prior"] = to_json(sym);
    const FeasibilityVerdict v =
        seut_pattern_feasibility(exp, PreferencePattern::parse(b.pattern), default_utility_family(), b.grid, g.execution);
    r.results["verdict"] = to_json(v);
  } else if (model == "maxmin") {
    values = maxmin_table(exp);
  } else if (model == "choquet") {
    json meta;
    values = choquet_table(spec, meta);
    r.results["capacity"] = meta;
  } else if (model == "variational") {
    require(b.penalty_weight >= 0.0, ErrorKind::InvalidPenalty, "penalty weight must be non-negative");
    const Penalty pen = b.penalty_weight == 0.0 ? Penalty::zero()
                                                : Penalty::quadratic(symmetric_prior(exp.urn), b.penalty_weight);
    for (const auto& a : exp.acts) values[a.name] = variational_expected_utility(a, priors, pen, exp.utility, b.grid);
    r.results["penalty"] = pen.name();
  } else {
    require(b.mu_points >= 2, ErrorKind::OutOfRange, "mu-points must be at least 2");
    std::vector<WeightedPrior> mu;
    const auto grid = priors.grid(b.mu_points);
    for (const auto& x : grid) mu.push_back({priors.at(x), 1.0 / static_cast<double>(grid.size())});
    const Transform phi = Transform::power(b.phi_alpha);
    for (const auto& a : exp.acts) values[a.name] = second_order_expected_utility(a, mu, phi, exp.utility);
    r.results["phi"] = phi.describe();
    r.results["mu_support_size"] = mu.size();
  }
  r.results["values"] = values;
  return r;
}

Report cmd_fit_state(const std::string& spec_path, const std::string& mechanism, const std::string& pattern,
                     const GlobalOptions& g) {
  const ExperimentSpec spec = load_spec(spec_path);
  const Mechanism m = parse_mechanism(mechanism);
  const PreferencePattern p = PreferencePattern::parse(pattern);
  Report r = make_report("fit-state", spec, {{"mechanism", mechanism}, {"pattern", p.to_string()}}, g);
  if (is_machina_shaped(spec.experiment)) {
    MachinaSearchOptions mo;
    mo.execution = g.execution;
    const MachinaPatternModel pm = machina_pattern_search(spec.experiment, p, m, g.seed, mo);
    r.results["fit"] = machina_model_json(pm);
    const StateVector& v = pm.state.vector();
    r.residuals = {{"objective", pm.search.value}, {"symmetry_deviation", std::abs(v.weight(0) + v.weight(1) - 0.5)}};
  } else {
    PatternSearchOptions po;
    po.execution = g.execution;
    const PatternModel pm = find_pattern_model(spec.experiment, p, m, g.seed, po);
    r.results["fit"] = pattern_model_json(pm);
    r.residuals = {{"objective", pm.search.value}, {"red_deviation", std::abs(pm.state.red() - kRedProbability)}};
  }
  return r;
}

Report cmd_fit_choice(const std::string& spec_path, const std::string& field, const GlobalOptions& g) {
  const ExperimentSpec spec = load_spec(spec_path);
  if (!spec.experiment.observed) fail(ErrorKind::EmptyData, "spec has no observed choice counts");
  const ChoiceCounts counts = *spec.experiment.observed;
  Report r = make_report("fit-choice", spec, {{"field", field}, {"tol", g.tol}}, g);
  const ChoiceMarginals w = choice_weights(counts);
  ChoiceFitOptions co;
  co.execution = g.execution;
  co.tolerance = g.tol;
  co.field = parse_field(field);
  r.results["participants"] = counts.total();
  r.results["marginals"] = {{"f1", w.f1}, {"f2", w.f2}, {"f3", w.f3}, {"f4", w.f4}};
  const JointDistribution observed = JointDistribution::from_counts(counts);
  r.results["joint_bound"] = l1_json(min_l1_joint_fit(observed), observed);
  const MarginalFit fit = fit_marginals(w.f1, w.f4, g.seed, co);
  r.results["fit"] = marginal_fit_json(fit, w.f1, w.f4);
  r.residuals = {{"marginal_fit", fit.residual},
                 {"commutator_norm", commutator_norm(fit.model.pair.o12(), fit.model.pair.o34())},
                 {"red_deviation", fit_red_deviation(fit)}};
  return r;
}

Report cmd_interference(const std::string& spec_path, const InterferenceInputs& in, const GlobalOptions& g) {
  const ExperimentSpec spec = load_spec(spec_path);
  const UrnExperiment& exp = spec.experiment;
  const int dim = static_cast<int>(exp.urn.colors.size());
  const Complex a = parse_complex(in.a, "--a");
  const Complex b = parse_complex(in.b, "--b");
  auto [w1, w2] = default_components(spec);
  if (spec.model) w1 = StateVector(spec.model->amplitudes);
  if (in.w1) w1 = parse_state(*in.w1, dim, "--w1");
  if (in.w2) w2 = parse_state(*in.w2, dim, "--w2");

  const json args = {{"a", {a.real(), a.imag()}},
                     {"b", {b.real(), b.imag()}},
                     {"w1", complex_array(w1.amplitudes())},
                     {"w2", complex_array(w2.amplitudes())}};
  Report r = make_report("interference", spec, args, g);

  const Pvm colors = Pvm::canonical(exp.urn.colors);
  const StateVector s = superpose(a, w1, b, w2);
  const auto p1 = born_probabilities(w1, colors);
  const auto p2 = born_probabilities(w2, colors);
  const auto ps = born_probabilities(s, colors);
  const auto terms = interference_terms(a, w1, b, w2, colors);
  const double norm2 = (a * w1.amplitudes() + b * w2.amplitudes()).squaredNorm();

  json table = json::object();
  double identity_residual = 0.0, prob_sum = 0.0;
  std::map<std::string, double> superposed;
  for (int c = 0; c < dim; ++c) {
    const double mixture = std::norm(a) * p1[c] + std::norm(b) * p2[c];
    identity_residual = std::max(identity_residual, std::abs(norm2 * ps[c] - (mixture + terms[c])));
    prob_sum += ps[c];
    superposed[exp.urn.colors[c]] = ps[c];
    table[exp.urn.colors[c]] = {{"w1", p1[c]}, {"w2", p2[c]}, {"superposed", ps[c]}, {"interference", terms[c]}};
  }
  r.results["superposed_state"] = complex_array(s.amplitudes());
  r.results["unnormalized_norm_squared"] = norm2;
  r.results["colors"] = table;
  const ProbabilityVector pv(superposed);
  json eu = json::object();
  for (const auto& act : exp.acts) eu[act.name] = classical_expected_utility(act, pv, exp.utility);
  r.results["expected_utility_canonical"] = eu;
  r.residuals = {{"interference_identity", identity_residual}, {"probability_sum", std::abs(prob_sum - 1.0)}};
  return r;
}

int exit_code_for(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  if (err == nullptr) return 1;
  switch (err->kind()) {
    case ErrorKind::NotFound:
    case ErrorKind::FitFailed:
      return 3;
    case ErrorKind::NonHermitianDrift:
    case ErrorKind::NotCommuting:
    case ErrorKind::InvariantViolation:
    case ErrorKind::NegativeProbability:
    case ErrorKind::NonFiniteObjective:
      return 1;
    default:
      return 2;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"qdu: quantum and classical models of decisions under ambiguity"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "json", out_path;
  std::uint64_t seed_flag = 0;
  double tol = 1e-6;
  bool no_timestamp = false, serial = false;
  app.add_option("--format", format, "json, csv or md")->check(CLI::IsMember({"json", "csv", "md"}));
  CLI::Option* seed_opt = app.add_option("--seed", seed_flag, "master seed (default: QDU_SEED or 1)");
  app.add_option("--tol", tol, "fit tolerance")->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "write the report to this file");
  app.add_flag("--no-timestamp", no_timestamp, "omit the timestamp");
  app.add_flag("--serial", serial, "run search kernels on one thread");

  std::string target, spec_path, pattern = kDefaultPattern, model, mechanism = "rotated", field = "complex";
  int grid = 101;
  BaselineOptions bopts;
  InterferenceInputs iin;

  auto* demo = app.add_subcommand("demo", "built-in end-to-end run");
  demo->add_option("target", target)->required()->check(CLI::IsMember({"ellsberg", "machina"}));

  auto* seut = app.add_subcommand("check-seut", "SEUT feasibility of a preference pattern");
  seut->add_option("spec", spec_path, "spec file or builtin:<name>")->required();
  seut->add_option("--pattern", pattern);
  seut->add_option("--grid", grid)->check(CLI::Range(100, 100000));

  auto* base = app.add_subcommand("baselines", "classical baseline values per act");
  base->add_option("spec", spec_path)->required();
  base->add_option("--model", model)
      ->required()
      ->check(CLI::IsMember({"seut", "maxmin", "choquet", "variational", "second-order"}));
  base->add_option("--pattern", bopts.pattern);
  base->add_option("--grid", bopts.grid)->check(CLI::Range(100, 100000));
  base->add_option("--penalty-weight", bopts.penalty_weight);
  base->add_option("--phi-alpha", bopts.phi_alpha);
  base->add_option("--mu-points", bopts.mu_points);

  auto* fit_state = app.add_subcommand("fit-state", "quantum state and model reproducing a pattern");
  fit_state->add_option("spec", spec_path)->required();
  fit_state->add_option("--mechanism", mechanism)->check(CLI::IsMember({"contextual", "rotated", "canonical"}));
  fit_state->add_option("--pattern", pattern);

  auto* fit_choice = app.add_subcommand("fit-choice", "commuting choice observables fitted to observed marginals");
  fit_choice->add_option("spec", spec_path)->required();
  fit_choice->add_option("--field", field)->check(CLI::IsMember({"complex", "real"}));

  auto* interf = app.add_subcommand("interference", "superposition of two states and its interference terms");
  interf->add_option("spec", spec_path)->required();
  interf->add_option("--w1", iin.w1, "re,im per color");
  interf->add_option("--w2", iin.w2, "re,im per color");
  interf->add_option("--a", iin.a, "re,im");
  interf->add_option("--b", iin.b, "re,im");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    GlobalOptions g;
    g.format = parse_format(format);
    g.seed = seed_opt->count() > 0 ? seed_flag : default_seed();
    g.tol = tol;
    g.timestamp = !no_timestamp;
    g.execution = serial ? Execution::Serial : Execution::Parallel;
    if (!out_path.empty()) g.out = out_path;

    Report r;
    if (demo->parsed()) r = cmd_demo(target, g);
    else if (seut->parsed()) r = cmd_check_seut(spec_path, pattern, grid, g);
    else if (base->parsed()) r = cmd_baselines(spec_path, model, bopts, g);
    else if (fit_state->parsed()) r = cmd_fit_state(spec_path, mechanism, pattern, g);
    else if (fit_choice->parsed()) r = cmd_fit_choice(spec_path, field, g);
    else r = cmd_interference(spec_path, iin, g);
    if (g.timestamp) r.timestamp = utc_timestamp();

    const std::string text = render(r, g.format);
    if (g.out) {
      std::ofstream f(*g.out, std::ios::binary);
      if (!f) fail(ErrorKind::InvalidSpec, "cannot write " + *g.out);
      f << text;
    } else {
      out << text;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "qdu: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace qdu
