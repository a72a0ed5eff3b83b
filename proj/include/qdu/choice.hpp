#pragma once

// The +/-1 choice observables O12 (f1 vs f2) and O34 (f3 vs f4) on C^3.
// Outcome convention: +1 <-> f1 for O12, +1 <-> f3 for O34.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdu/hilbert.hpp"
#include "qdu/optimizer.hpp"
#include "qdu/urn.hpp"

namespace qdu {

using ChoiceData = ChoiceCounts;

/// Joint outcome cells, in the order used by every 4-vector in this module.
enum class Cell : int { F1F3 = 0, F1F4 = 1, F2F3 = 2, F2F4 = 3 };
inline constexpr std::array<const char*, 4> kCellNames{"f1,f3", "f1,f4", "f2,f3", "f2,f4"};

struct SignLabel {
  int o12 = 1;  // +1 -> f1, -1 -> f2
  int o34 = 1;  // +1 -> f3, -1 -> f4

  Cell cell() const noexcept;
  static SignLabel of(Cell c) noexcept;
  bool operator==(const SignLabel&) const = default;
};

struct ChoiceMarginals {
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
  double f4 = 0.0;
};

/// EmptyData if no participants.
ChoiceMarginals choice_weights(const ChoiceData& data);

class JointDistribution {
 public:
  /// Non-negative within 1e-12 and summing to 1 within 1e-10.
  explicit JointDistribution(std::array<double, 4> p);
  static JointDistribution from_counts(const ChoiceData& data);

  double operator[](Cell c) const noexcept { return p_[static_cast<int>(c)]; }
  const std::array<double, 4>& cells() const noexcept { return p_; }
  ChoiceMarginals marginals() const noexcept;

 private:
  std::array<double, 4> p_;
};

class ChoiceObservablePair {
 public:
  /// Requires O^2 = I within 1e-10 for both and a commutator norm within `bound`.
  ChoiceObservablePair(HermitianOperator o12, HermitianOperator o34, double bound = tol::kAlgebraic);

  const HermitianOperator& o12() const noexcept { return o12_; }
  const HermitianOperator& o34() const noexcept { return o34_; }
  /// Shared eigenbasis (columns) with one label per column, when built from one.
  const std::optional<CMatrix>& basis() const noexcept { return basis_; }
  const std::vector<SignLabel>& labels() const noexcept { return labels_; }

 private:
  friend ChoiceObservablePair build_commuting_pair(const CMatrix& basis, std::vector<SignLabel> signs);
  HermitianOperator o12_;
  HermitianOperator o34_;
  std::optional<CMatrix> basis_;
  std::vector<SignLabel> labels_;
};

/// O12 = sum s_k |q_k><q_k|, O34 = sum t_k |q_k><q_k|. BadBasis unless the
/// columns are orthonormal within 1e-10 and every label is +/-1.
ChoiceObservablePair build_commuting_pair(const CMatrix& basis, std::vector<SignLabel> signs);

/// Order-free joint distribution of a commuting pair. NotCommuting otherwise.
JointDistribution joint_distribution(const StateVector& state, const ChoiceObservablePair& pair);

/// Measure one observable, collapse with its spectral projector (I +/- O)/2,
/// then measure the other.
JointDistribution sequential_joint(const StateVector& state, const ChoiceObservablePair& pair, bool o12_first);

enum class Field { Complex, Real };
std::string_view to_string(Field f) noexcept;
Field parse_field(const std::string& text);

struct ChoiceFitOptions {
  Budget budget{64, 500};
  Execution execution = Execution::Parallel;
  Field field = Field::Complex;
  double tolerance = 1e-6;
};

struct ChoiceModel {
  StateVector state;
  ChoiceObservablePair pair;
  JointDistribution joint;
  ChoiceMarginals marginals;
};

struct MarginalFit {
  ChoiceModel model;
  double residual = 0.0;  // max |marginal - target|
  Field field = Field::Complex;
  FitResult search;
};

/// Fits a commuting pair and a state with |<red|v>|^2 = 1/3 to the marginal
/// choice probabilities. Targets must lie in (0, 1). FitFailed when the
/// residual exceeds options.tolerance.
MarginalFit fit_marginals(double p_f1, double p_f4, std::uint64_t seed, const ChoiceFitOptions& options = {});

struct L1JointFit {
  double distance = 0.0;
  std::array<bool, 4> support{};
  Cell dropped = Cell::F1F3;
  JointDistribution best{{1.0, 0.0, 0.0, 0.0}};
};

/// Closest distribution with at most three nonzero cells, in L1.
L1JointFit min_l1_joint_fit(const JointDistribution& target);

struct RepresentabilityConstraints {
  double p_f1 = 0.5;
  double p_f4 = 0.5;
  std::optional<JointDistribution> joint;
  Field field = Field::Complex;
};

struct RepresentabilityReport {
  Field field = Field::Complex;
  double residual = 0.0;
  int restarts = 0;
  std::map<std::string, double> violations;
  ChoiceModel best;
};

/// Same search as fit_marginals under the given field and constraint set;
/// reports the best residual without claiming infeasibility.
RepresentabilityReport real_representability_search(const RepresentabilityConstraints& constraints,
                                                    std::uint64_t seed, const ChoiceFitOptions& options = {});

}  // namespace qdu
