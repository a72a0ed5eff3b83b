#pragma once

// Dense complex linear algebra on C^n for 2 <= n <= 8: states, Hermitian
// operators, projectors, projection-valued measures and the Born rule.

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdu/error.hpp"

namespace qdu {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 8;

namespace tol {
inline constexpr double kConstructor = 1e-12;  // type invariants
inline constexpr double kAlgebraic = 1e-10;    // derived identities
inline constexpr double kEigen = 1e-8;         // eigen-decomposition residuals
inline constexpr double kZeroNorm = 1e-14;
}  // namespace tol

void check_dimension(int n);

class StateVector {
 public:
  /// Throws InvariantViolation unless the amplitudes are finite and of unit norm.
  explicit StateVector(CVector amplitudes);

  static StateVector basis(int dim, int k);

  int dim() const noexcept { return static_cast<int>(amps_.size()); }
  const CVector& amplitudes() const noexcept { return amps_; }
  Complex operator[](int k) const { return amps_(k); }
  double weight(int k) const { return std::norm(amps_(k)); }

 private:
  CVector amps_;
};

class HermitianOperator {
 public:
  /// Accepts matrices Hermitian within 1e-12 elementwise and stores the
  /// exactly symmetrized part.
  explicit HermitianOperator(const CMatrix& entries);

  static HermitianOperator identity(int n);
  static HermitianOperator diagonal(std::span<const double> values);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const noexcept { return m_; }

 private:
  CMatrix m_;
};

class Projector {
 public:
  Projector(HermitianOperator op, int rank);

  /// Orthogonal projector onto the span of the given vectors.
  static Projector onto(std::span<const CVector> spanning);
  static Projector canonical(int dim, int k);

  int rank() const noexcept { return rank_; }
  int dim() const noexcept { return op_.dim(); }
  const HermitianOperator& op() const noexcept { return op_; }
  const CMatrix& matrix() const noexcept { return op_.matrix(); }

 private:
  HermitianOperator op_;
  int rank_;
};

/// Projection-valued measure: labeled, pairwise orthogonal projectors summing to identity.
class Pvm {
 public:
  Pvm(std::vector<std::string> labels, std::vector<Projector> projectors);

  static Pvm canonical(std::vector<std::string> labels);
  /// One rank-1 projector per column of an orthonormal basis.
  static Pvm from_basis(const CMatrix& columns, std::vector<std::string> labels);

  int dim() const noexcept { return projectors_.front().dim(); }
  std::size_t size() const noexcept { return projectors_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Projector& operator[](std::size_t i) const { return projectors_.at(i); }

 private:
  std::vector<std::string> labels_;
  std::vector<Projector> projectors_;
};

class UnitaryOperator {
 public:
  explicit UnitaryOperator(CMatrix entries);

  static UnitaryOperator identity(int n);
  /// exp(i H) through the spectral decomposition of H.
  static UnitaryOperator from_generator(const HermitianOperator& generator);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const noexcept { return m_; }
  CVector apply(const CVector& v) const;

 private:
  CMatrix m_;
};

StateVector normalize(const CVector& raw);

std::vector<double> born_probabilities(const StateVector& state, const Pvm& pvm);

double expectation(const StateVector& state, const HermitianOperator& op);

/// Frobenius norm of AB - BA.
double commutator_norm(const HermitianOperator& a, const HermitianOperator& b);

struct JointEigenvector {
  CVector vector;
  double a_value = 0.0;
  double b_value = 0.0;
};

/// Orthonormal basis of simultaneous eigenvectors of two commuting operators,
/// ordered by (a_value, b_value) ascending. Degenerate blocks of `a` are
/// resolved by diagonalizing `b` inside the block; remaining ties are ordered
/// lexicographically by amplitude after fixing the first nonzero amplitude to
/// be real positive.
std::vector<JointEigenvector> common_eigenbasis(const HermitianOperator& a, const HermitianOperator& b,
                                                double tol);

StateVector superpose(Complex a, const StateVector& w1, Complex b, const StateVector& w2);

/// I_c = 2 Re(conj(a) b <w1|P_c|w2>), the cross term separating a superposition
/// from the corresponding mixture (before renormalization).
std::vector<double> interference_terms(Complex a, const StateVector& w1, Complex b, const StateVector& w2,
                                       const Pvm& pvm);

}  // namespace qdu
