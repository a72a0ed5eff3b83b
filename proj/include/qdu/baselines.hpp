#pragma once

// Classical decision models over an urn: SEUT feasibility with analytic
// infeasibility certificates, the Sure-Thing check, Max-Min, Choquet,
// variational and second-order expected utility.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdu/optimizer.hpp"
#include "qdu/urn.hpp"

namespace qdu {

struct StrictPreference {
  std::string better;
  std::string worse;

  bool operator==(const StrictPreference&) const = default;
};

class PreferencePattern {
 public:
  /// Rejects self-preferences, repeats and direct contradictions.
  explicit PreferencePattern(std::vector<StrictPreference> items);

  /// "f1>f2,f4>f3"
  static PreferencePattern parse(const std::string& text);

  const std::vector<StrictPreference>& items() const noexcept { return items_; }
  std::string to_string() const;
  /// InvalidPattern unless every referenced act exists in `exp`.
  void check_acts(const UrnExperiment& exp) const;
  /// +1 if a > b is stated, -1 if b > a is stated, 0 otherwise.
  int relation(const std::string& a, const std::string& b) const;

 private:
  std::vector<StrictPreference> items_;
};

/// Box of admissible priors. Within each unknown group every color except the
/// first is a free coordinate with bounds [lo, hi]; the first color takes the
/// remainder of the group mass. Known colors are fixed at their count ratio.
class PriorSet {
 public:
  struct Coordinate {
    std::string color;
    double lo = 0.0;
    double hi = 0.0;
  };

  /// Throws EmptyPriorSet when a box is empty or leaves the simplex.
  PriorSet(UrnSpec urn, std::vector<Coordinate> coordinates);

  /// Largest box of this form inside the admissible simplex.
  static PriorSet full(const UrnSpec& urn);

  const UrnSpec& urn() const noexcept { return urn_; }
  const std::vector<Coordinate>& coordinates() const noexcept { return coords_; }
  std::size_t dims() const noexcept { return coords_.size(); }

  ProbabilityVector at(std::span<const double> free) const;
  /// p(color) = offset + gradient . free
  std::pair<double, std::vector<double>> affine(const std::string& color) const;

  std::vector<std::vector<double>> vertices() const;
  /// resolution points per coordinate, endpoints included, lexicographic order
  /// (first coordinate slowest).
  std::vector<std::vector<double>> grid(int resolution) const;

 private:
  UrnSpec urn_;
  std::vector<Coordinate> coords_;
};

/// gradient . x + offset > 0 over the free prior coordinates.
struct LinearInequality {
  StrictPreference source;
  std::vector<double> gradient;
  double offset = 0.0;
  std::string text;
};

struct InfeasibilityCertificate {
  std::vector<LinearInequality> inequalities;  // every reduced preference
  std::vector<std::size_t> combined;           // indices into inequalities
  std::vector<double> multipliers;
  std::string explanation;
};

struct FeasibilityWitness {
  ProbabilityVector prior;
  UtilityFunction utility;
  std::vector<double> margins;  // EU(better) - EU(worse) per preference
};

struct FeasibilityVerdict {
  bool feasible = false;
  std::optional<FeasibilityWitness> witness;
  std::optional<InfeasibilityCertificate> certificate;
  int grid_resolution = 0;
  std::vector<std::string> utilities;
  long points_evaluated = 0;
};

using UtilityFamily = std::vector<UtilityFunction>;

/// linear; power 0.25, 0.5, 0.75, 1; exponential 0.05, 0.1, 0.5.
UtilityFamily default_utility_family();

inline constexpr double kPreferenceMargin = 1e-9;

/// Symbolic reduction of a strict preference whose differing payoffs take
/// exactly two values; nullopt otherwise.
std::optional<LinearInequality> reduce_preference(const UrnExperiment& exp, const PriorSet& priors,
                                                  const StrictPreference& pref);

/// Nonnegative combination of reduced inequalities that collapses to 0 > c
/// with c <= 0, or a single inequality that no box vertex satisfies.
std::optional<InfeasibilityCertificate> find_certificate(const PriorSet& priors,
                                                         std::vector<LinearInequality> inequalities);

FeasibilityVerdict seut_pattern_feasibility(const UrnExperiment& exp, const PreferencePattern& pattern,
                                            const UtilityFamily& family, int grid,
                                            Execution execution = Execution::Parallel);

struct SureThingReport {
  bool violates = false;
  int pair_a_relation = 0;  // +1: first act of pair a preferred
  int pair_b_relation = 0;
  std::vector<std::string> common_event;
  std::string explanation;
};

/// Pairs must agree off `common_event`, and within each pair both acts pay
/// the same on `common_event`; otherwise PairsNotSureThingRelated.
SureThingReport sure_thing_check(const UrnExperiment& exp, const std::pair<std::string, std::string>& pair_a,
                                 const std::pair<std::string, std::string>& pair_b,
                                 const std::vector<std::string>& common_event, const PreferencePattern& pattern);

/// Minimum over the box; linear in p so vertices suffice.
double maxmin_expected_utility(const Act& act, const PriorSet& priors, const UtilityFunction& u);

/// Set function over all 2^n events, indexed by bitmask in urn color order.
class Capacity {
 public:
  Capacity(std::vector<std::string> colors, std::vector<double> by_mask);

  /// MissingEvent unless all 2^n events are listed.
  static Capacity from_events(std::vector<std::string> colors, const std::map<std::set<std::string>, double>& events);
  static Capacity additive(const std::vector<std::string>& colors, const ProbabilityVector& p);
  /// nu(A) = min over the prior box of p(A).
  static Capacity lower_envelope(const PriorSet& priors);

  const std::vector<std::string>& colors() const noexcept { return colors_; }
  double operator[](std::uint32_t mask) const { return values_.at(mask); }
  double of(std::span<const std::string> event) const;
  std::uint32_t mask_of(std::span<const std::string> event) const;

  /// nu(A u B) + nu(A n B) >= nu(A) + nu(B) for every pair of events.
  bool is_convex(double tol = 1e-12) const;
  bool is_additive(double tol = 1e-12) const;

 private:
  std::vector<std::string> colors_;
  std::vector<double> values_;
};

double choquet_expected_utility(const Act& act, const Capacity& cap, const UtilityFunction& u);

class Penalty {
 public:
  static Penalty zero();
  /// weight * p(color)
  static Penalty linear(std::string color, double weight);
  /// weight * sum_c (p_c - reference_c)^2
  static Penalty quadratic(ProbabilityVector reference, double weight);

  double operator()(const ProbabilityVector& p) const { return fn_(p); }
  const std::string& name() const noexcept { return name_; }

 private:
  Penalty(std::string name, std::function<double(const ProbabilityVector&)> fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name_;
  std::function<double(const ProbabilityVector&)> fn_;
};

/// inf over the prior grid of E_p u(f) + c(p). The penalty must be >= 0 on
/// the grid and vanish (<= 1e-12) at some grid point.
double variational_expected_utility(const Act& act, const PriorSet& priors, const Penalty& penalty,
                                    const UtilityFunction& u, int grid = 101);
/// Same, with the penalty given as a table aligned with priors.grid(grid).
double variational_expected_utility(const Act& act, const PriorSet& priors, std::span<const double> penalty_table,
                                    const UtilityFunction& u, int grid);

class Transform {
 public:
  static Transform identity();
  /// x^alpha for alpha > 0; concave for alpha < 1.
  static Transform power(double alpha);
  /// (1 - exp(-k x)) / k
  static Transform exponential(double k);

  double operator()(double x) const;
  std::string describe() const;

 private:
  enum class Kind { Identity, Power, Exponential };
  Transform(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

struct WeightedPrior {
  ProbabilityVector prior;
  double weight = 0.0;
};

/// E_mu phi(E_p u(f))
double second_order_expected_utility(const Act& act, std::span<const WeightedPrior> mu, const Transform& phi,
                                     const UtilityFunction& u);

}  // namespace qdu
