#pragma once

// Urn experiments: colors with known and ambiguous counts, acts as payoff
// rows, utility functions and classical (additive) expected utility.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdu/error.hpp"

namespace qdu {

struct UnknownGroup {
  std::vector<std::string> colors;
  int total = 0;

  bool operator==(const UnknownGroup&) const = default;
};

struct UrnSpec {
  std::vector<std::string> colors;
  int total = 0;
  std::map<std::string, int> known_counts;
  std::vector<UnknownGroup> unknown_groups;

  /// Throws InvalidUrn when counts do not add up or a color is not covered exactly once.
  void validate() const;
  int index_of(const std::string& color) const;
  bool has_color(const std::string& color) const;

  bool operator==(const UrnSpec&) const = default;
};

struct Act {
  std::string name;
  std::map<std::string, double> payoffs;  // color -> money, non-negative

  bool operator==(const Act&) const = default;
};

class UtilityFunction {
 public:
  enum class Form { Linear, Power, Exponential };

  static UtilityFunction linear() { return UtilityFunction(Form::Linear, 1.0); }
  /// x^alpha, alpha in (0, 1].
  static UtilityFunction power(double alpha);
  /// (1 - exp(-lambda x)) / lambda, lambda > 0.
  static UtilityFunction exponential(double lambda);

  Form form() const noexcept { return form_; }
  double parameter() const noexcept { return param_; }
  std::string describe() const;

  double operator()(double x) const;

  bool operator==(const UtilityFunction&) const = default;

 private:
  UtilityFunction(Form form, double param) : form_(form), param_(param) {}
  Form form_;
  double param_;
};

double utility_eval(const UtilityFunction& u, double x);

class ProbabilityVector {
 public:
  /// Entries must be non-negative and sum to 1 within 1e-12.
  explicit ProbabilityVector(std::map<std::string, double> values);

  const std::map<std::string, double>& values() const noexcept { return values_; }
  double operator[](const std::string& color) const;
  double event(std::span<const std::string> colors) const;
  /// Known colors match their count ratio and each group carries its share, within `tol`.
  bool consistent_with(const UrnSpec& urn, double tol = 1e-12) const;

 private:
  std::map<std::string, double> values_;
};

/// Joint choice counts over the two bet pairs (f1|f2) x (f3|f4).
struct ChoiceCounts {
  int f1_f3 = 0;
  int f1_f4 = 0;
  int f2_f3 = 0;
  int f2_f4 = 0;

  int total() const noexcept { return f1_f3 + f1_f4 + f2_f3 + f2_f4; }
  bool operator==(const ChoiceCounts&) const = default;
};

struct UrnExperiment {
  std::string name;
  UrnSpec urn;
  std::vector<Act> acts;
  UtilityFunction utility = UtilityFunction::linear();
  std::optional<ChoiceCounts> observed;

  void validate() const;
  const Act& act(const std::string& name) const;
  bool has_act(const std::string& name) const;

  bool operator==(const UrnExperiment&) const = default;
};

double known_probability(const UrnSpec& urn, const std::string& color);

/// Every unknown group split evenly between its colors.
ProbabilityVector symmetric_prior(const UrnSpec& urn);

double classical_expected_utility(const Act& act, const ProbabilityVector& p, const UtilityFunction& u);

/// 30 red, 60 yellow-or-black; acts f1..f4 paying `prize`.
UrnExperiment ellsberg_urn(double prize = 12.0);
/// 10 red-or-yellow, 10 black-or-green; reflection acts f1..f4 over {0, 25, 50}.
UrnExperiment machina_urn();

}  // namespace qdu
