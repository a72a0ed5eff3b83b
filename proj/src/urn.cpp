#include "qdu/urn.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace qdu {

void UrnSpec::validate() const {
  require(!colors.empty(), ErrorKind::InvalidUrn, "urn has no colors");
  require(total > 0, ErrorKind::InvalidUrn, "urn total must be positive");
  std::set<std::string> distinct(colors.begin(), colors.end());
  require(distinct.size() == colors.size(), ErrorKind::InvalidUrn, "duplicate color");

  std::map<std::string, int> seen;
  int sum = 0;
  for (const auto& [color, count] : known_counts) {
    require(distinct.count(color) == 1, ErrorKind::InvalidUrn, "known count for unknown color " + color);
    require(count >= 0, ErrorKind::InvalidUrn, "negative count for " + color);
    ++seen[color];
    sum += count;
  }
  for (const auto& g : unknown_groups) {
    require(!g.colors.empty(), ErrorKind::InvalidUrn, "empty unknown group");
    require(g.total >= 0, ErrorKind::InvalidUrn, "negative group total");
    for (const auto& c : g.colors) {
      require(distinct.count(c) == 1, ErrorKind::InvalidUrn, "group color " + c + " not in urn");
      ++seen[c];
    }
    sum += g.total;
  }
  for (const auto& c : colors)
    require(seen[c] == 1, ErrorKind::InvalidUrn, "color " + c + " must appear exactly once in known counts or groups");
  require(sum == total, ErrorKind::InvalidUrn,
          "counts sum to " + std::to_string(sum) + " but total is " + std::to_string(total));
}

int UrnSpec::index_of(const std::string& color) const {
  const auto it = std::find(colors.begin(), colors.end(), color);
  if (it == colors.end()) fail(ErrorKind::ColorMismatch, "unknown color " + color);
  return static_cast<int>(it - colors.begin());
}

bool UrnSpec::has_color(const std::string& color) const {
  return std::find(colors.begin(), colors.end(), color) != colors.end();
}

UtilityFunction UtilityFunction::power(double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, ErrorKind::OutOfRange, "power utility needs alpha in (0, 1]");
  return UtilityFunction(Form::Power, alpha);
}

UtilityFunction UtilityFunction::exponential(double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), ErrorKind::OutOfRange, "exponential utility needs lambda > 0");
  return UtilityFunction(Form::Exponential, lambda);
}

std::string UtilityFunction::describe() const {
  std::ostringstream os;
  switch (form_) {
    case Form::Linear: os << "linear"; break;
    case Form::Power: os << "power(" << param_ << ")"; break;
    case Form::Exponential: os << "exponential(" << param_ << ")"; break;
  }
  return os.str();
}

double UtilityFunction::operator()(double x) const {
  if (x < 0.0) fail(ErrorKind::NegativePayoff, "payoff " + std::to_string(x));
  switch (form_) {
    case Form::Linear: return x;
    case Form::Power: return param_ == 1.0 ? x : std::pow(x, param_);
    case Form::Exponential: return -std::expm1(-param_ * x) / param_;
  }
  return x;
}

double utility_eval(const UtilityFunction& u, double x) { return u(x); }

ProbabilityVector::ProbabilityVector(std::map<std::string, double> values) : values_(std::move(values)) {
  require(!values_.empty(), ErrorKind::InvalidDistribution, "empty probability vector");
  double sum = 0.0;
  for (const auto& [color, p] : values_) {
    require(std::isfinite(p) && p >= 0.0, ErrorKind::InvalidDistribution, "probability of " + color + " invalid");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= 1e-12, ErrorKind::InvalidDistribution, "probabilities sum to " + std::to_string(sum));
}

double ProbabilityVector::operator[](const std::string& color) const {
  const auto it = values_.find(color);
  if (it == values_.end()) fail(ErrorKind::ColorMismatch, "no probability for " + color);
  return it->second;
}

double ProbabilityVector::event(std::span<const std::string> colors) const {
  double s = 0.0;
  for (const auto& c : colors) s += (*this)[c];
  return s;
}

bool ProbabilityVector::consistent_with(const UrnSpec& urn, double tol) const {
  if (values_.size() != urn.colors.size()) return false;
  for (const auto& c : urn.colors)
    if (!values_.count(c)) return false;
  for (const auto& [color, count] : urn.known_counts)
    if (std::abs((*this)[color] - static_cast<double>(count) / urn.total) > tol) return false;
  for (const auto& g : urn.unknown_groups)
    if (std::abs(event(g.colors) - static_cast<double>(g.total) / urn.total) > tol) return false;
  return true;
}

void UrnExperiment::validate() const {
  urn.validate();
  require(!acts.empty(), ErrorKind::InvalidUrn, "experiment has no acts");
  std::set<std::string> names;
  for (const auto& a : acts) {
    require(names.insert(a.name).second, ErrorKind::InvalidUrn, "duplicate act " + a.name);
    require(a.payoffs.size() == urn.colors.size(), ErrorKind::ColorMismatch, "act " + a.name + " payoff row size");
    for (const auto& c : urn.colors) {
      const auto it = a.payoffs.find(c);
      require(it != a.payoffs.end(), ErrorKind::ColorMismatch, "act " + a.name + " has no payoff for " + c);
      require(std::isfinite(it->second) && it->second >= 0.0, ErrorKind::NegativePayoff,
              "act " + a.name + " payoff on " + c);
    }
  }
  if (observed) {
    require(observed->f1_f3 >= 0 && observed->f1_f4 >= 0 && observed->f2_f3 >= 0 && observed->f2_f4 >= 0,
            ErrorKind::InvalidSpec, "negative observed count");
  }
}

const Act& UrnExperiment::act(const std::string& act_name) const {
  for (const auto& a : acts)
    if (a.name == act_name) return a;
  fail(ErrorKind::UnknownAct, act_name);
}

bool UrnExperiment::has_act(const std::string& act_name) const {
  return std::any_of(acts.begin(), acts.end(), [&](const Act& a) { return a.name == act_name; });
}

double known_probability(const UrnSpec& urn, const std::string& color) {
  const auto it = urn.known_counts.find(color);
  if (it == urn.known_counts.end()) fail(ErrorKind::ColorMismatch, color + " has no known count");
  return static_cast<double>(it->second) / urn.total;
}

ProbabilityVector symmetric_prior(const UrnSpec& urn) {
  std::map<std::string, double> p;
  for (const auto& [color, count] : urn.known_counts) p[color] = static_cast<double>(count) / urn.total;
  for (const auto& g : urn.unknown_groups)
    for (const auto& c : g.colors) p[c] = static_cast<double>(g.total) / urn.total / static_cast<double>(g.colors.size());
  return ProbabilityVector(std::move(p));
}

double classical_expected_utility(const Act& act, const ProbabilityVector& p, const UtilityFunction& u) {
  if (act.payoffs.size() != p.values().size()) fail(ErrorKind::ColorMismatch, "act " + act.name + " vs prior colors");
  double eu = 0.0;
  for (const auto& [color, payoff] : act.payoffs) eu += p[color] * u(payoff);
  return eu;
}

UrnExperiment ellsberg_urn(double prize) {
  require(std::isfinite(prize) && prize > 0.0, ErrorKind::OutOfRange, "prize must be positive");
  UrnExperiment e;
  e.name = "ellsberg";
  e.urn.colors = {"red", "yellow", "black"};
  e.urn.total = 90;
  e.urn.known_counts = {{"red", 30}};
  e.urn.unknown_groups = {{{"yellow", "black"}, 60}};
  const double x = prize;
  e.acts = {
      {"f1", {{"red", x}, {"yellow", 0.0}, {"black", 0.0}}},
      {"f2", {{"red", 0.0}, {"yellow", 0.0}, {"black", x}}},
      {"f3", {{"red", x}, {"yellow", x}, {"black", 0.0}}},
      {"f4", {{"red", 0.0}, {"yellow", x}, {"black", x}}},
  };
  e.observed = ChoiceCounts{6, 34, 12, 7};
  return e;
}

UrnExperiment machina_urn() {
  UrnExperiment e;
  e.name = "machina";
  e.urn.colors = {"red", "yellow", "black", "green"};
  e.urn.total = 20;
  e.urn.unknown_groups = {{{"red", "yellow"}, 10}, {{"black", "green"}, 10}};
  e.acts = {
      {"f1", {{"red", 0.0}, {"yellow", 50.0}, {"black", 25.0}, {"green", 25.0}}},
      {"f2", {{"red", 0.0}, {"yellow", 25.0}, {"black", 50.0}, {"green", 25.0}}},
      {"f3", {{"red", 25.0}, {"yellow", 50.0}, {"black", 25.0}, {"green", 0.0}}},
      {"f4", {{"red", 25.0}, {"yellow", 25.0}, {"black", 50.0}, {"green", 0.0}}},
  };
  return e;
}

}  // namespace qdu
