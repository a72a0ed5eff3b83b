#include "qdu/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qdu {

namespace {

bool all_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

double max_abs(const CMatrix& m) {
  double out = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) out = std::max(out, std::abs(m(i, j)));
  return out;
}

void same_dim(int a, int b, const char* what) {
  if (a != b) fail(ErrorKind::DimensionMismatch, std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

// Multiply by the phase that makes the first non-negligible amplitude real positive.
CVector fix_phase(CVector v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double mag = std::abs(v(k));
    if (mag > 1e-12) {
      v *= std::conj(v(k)) / mag;
      v(k) = Complex(mag, 0.0);
      break;
    }
  }
  return v;
}

bool lex_less(const CVector& a, const CVector& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a(k).real() != b(k).real()) return a(k).real() < b(k).real();
    if (a(k).imag() != b(k).imag()) return a(k).imag() < b(k).imag();
  }
  return false;
}

}  // namespace

void check_dimension(int n) {
  if (n < kMinDim || n > kMaxDim)
    fail(ErrorKind::DimensionMismatch, "dimension " + std::to_string(n) + " outside [2, 8]");
}

// ---------------------------------------------------------------------------

StateVector::StateVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
  check_dimension(dim());
  require(all_finite(amps_), ErrorKind::InvariantViolation, "state has non-finite amplitude");
  const double norm2 = amps_.squaredNorm();
  require(std::abs(norm2 - 1.0) <= tol::kConstructor, ErrorKind::InvariantViolation,
          "state norm^2 = " + std::to_string(norm2));
}

StateVector StateVector::basis(int dim, int k) {
  check_dimension(dim);
  require(k >= 0 && k < dim, ErrorKind::OutOfRange, "basis index");
  CVector v = CVector::Zero(dim);
  v(k) = 1.0;
  return StateVector(std::move(v));
}

HermitianOperator::HermitianOperator(const CMatrix& entries) {
  require(entries.rows() == entries.cols(), ErrorKind::DimensionMismatch, "operator must be square");
  check_dimension(static_cast<int>(entries.rows()));
  require(all_finite(entries), ErrorKind::InvariantViolation, "operator has non-finite entry");
  const double drift = max_abs(entries - entries.adjoint());
  require(drift <= tol::kConstructor, ErrorKind::InvariantViolation,
          "operator not Hermitian, max |A - A^dagger| = " + std::to_string(drift));
  m_ = 0.5 * (entries + entries.adjoint());
}

HermitianOperator HermitianOperator::identity(int n) {
  check_dimension(n);
  return HermitianOperator(CMatrix::Identity(n, n));
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> values) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) m(k, k) = values[k];
  return HermitianOperator(m);
}

Projector::Projector(HermitianOperator op, int rank) : op_(std::move(op)), rank_(rank) {
  const CMatrix& p = op_.matrix();
  const double idem = max_abs(p * p - p);
  require(idem <= tol::kAlgebraic, ErrorKind::InvariantViolation, "projector not idempotent: " + std::to_string(idem));
  const double trace = p.trace().real();
  require(std::abs(trace - rank_) <= tol::kAlgebraic, ErrorKind::InvariantViolation,
          "projector trace " + std::to_string(trace) + " != rank " + std::to_string(rank_));
}

Projector Projector::onto(std::span<const CVector> spanning) {
  require(!spanning.empty(), ErrorKind::ZeroVector, "empty spanning set");
  const auto n = spanning.front().size();
  std::vector<CVector> q;
  for (const auto& v : spanning) {
    same_dim(static_cast<int>(n), static_cast<int>(v.size()), "projector span");
    CVector w = v;
    // Two Gram-Schmidt passes keep the basis orthonormal to roundoff.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : q) w -= e * e.dot(w);
    const double nrm = w.norm();
    if (nrm > 1e-10) q.push_back(w / nrm);
  }
  require(!q.empty(), ErrorKind::ZeroVector, "spanning vectors are all zero");
  CMatrix p = CMatrix::Zero(n, n);
  for (const auto& e : q) p += e * e.adjoint();
  return Projector(HermitianOperator(p), static_cast<int>(q.size()));
}

Projector Projector::canonical(int dim, int k) {
  check_dimension(dim);
  require(k >= 0 && k < dim, ErrorKind::OutOfRange, "basis index");
  CMatrix p = CMatrix::Zero(dim, dim);
  p(k, k) = 1.0;
  return Projector(HermitianOperator(p), 1);
}

Pvm::Pvm(std::vector<std::string> labels, std::vector<Projector> projectors)
    : labels_(std::move(labels)), projectors_(std::move(projectors)) {
  require(!projectors_.empty(), ErrorKind::InvariantViolation, "PVM needs at least one projector");
  require(labels_.size() == projectors_.size(), ErrorKind::InvariantViolation, "one label per projector");
  const int n = projectors_.front().dim();
  CMatrix sum = CMatrix::Zero(n, n);
  for (std::size_t a = 0; a < projectors_.size(); ++a) {
    same_dim(n, projectors_[a].dim(), "PVM projector");
    sum += projectors_[a].matrix();
    for (std::size_t b = a + 1; b < projectors_.size(); ++b) {
      const double overlap = max_abs(projectors_[a].matrix() * projectors_[b].matrix());
      require(overlap <= tol::kAlgebraic, ErrorKind::InvariantViolation,
              "PVM projectors " + labels_[a] + ", " + labels_[b] + " not orthogonal");
    }
  }
  require(max_abs(sum - CMatrix::Identity(n, n)) <= tol::kAlgebraic, ErrorKind::InvariantViolation,
          "PVM projectors do not sum to identity");
}

Pvm Pvm::canonical(std::vector<std::string> labels) {
  const int n = static_cast<int>(labels.size());
  std::vector<Projector> ps;
  for (int k = 0; k < n; ++k) ps.push_back(Projector::canonical(n, k));
  return Pvm(std::move(labels), std::move(ps));
}

Pvm Pvm::from_basis(const CMatrix& columns, std::vector<std::string> labels) {
  std::vector<Projector> ps;
  for (Eigen::Index k = 0; k < columns.cols(); ++k) {
    const CVector col = columns.col(k);
    ps.push_back(Projector::onto(std::span<const CVector>(&col, 1)));
  }
  return Pvm(std::move(labels), std::move(ps));
}

UnitaryOperator::UnitaryOperator(CMatrix entries) : m_(std::move(entries)) {
  require(m_.rows() == m_.cols(), ErrorKind::DimensionMismatch, "unitary must be square");
  check_dimension(dim());
  require(all_finite(m_), ErrorKind::InvariantViolation, "unitary has non-finite entry");
  const double drift = max_abs(m_.adjoint() * m_ - CMatrix::Identity(dim(), dim()));
  require(drift <= tol::kAlgebraic, ErrorKind::InvariantViolation, "U^dagger U != I, drift " + std::to_string(drift));
}

UnitaryOperator UnitaryOperator::identity(int n) {
  check_dimension(n);
  return UnitaryOperator(CMatrix::Identity(n, n));
}

UnitaryOperator UnitaryOperator::from_generator(const HermitianOperator& generator) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(generator.matrix());
  const CMatrix& v = es.eigenvectors();
  CVector phases(v.cols());
  for (Eigen::Index k = 0; k < v.cols(); ++k) phases(k) = std::polar(1.0, es.eigenvalues()(k));
  return UnitaryOperator(v * phases.asDiagonal() * v.adjoint());
}

CVector UnitaryOperator::apply(const CVector& v) const {
  same_dim(dim(), static_cast<int>(v.size()), "unitary apply");
  return m_ * v;
}

// ---------------------------------------------------------------------------

StateVector normalize(const CVector& raw) {
  require(raw.allFinite(), ErrorKind::InvariantViolation, "amplitudes must be finite");
  const double nrm = raw.norm();
  if (!(nrm > tol::kZeroNorm)) fail(ErrorKind::ZeroVector, "cannot normalize vector of norm " + std::to_string(nrm));
  return StateVector(raw / nrm);
}

std::vector<double> born_probabilities(const StateVector& state, const Pvm& pvm) {
  same_dim(state.dim(), pvm.dim(), "born_probabilities");
  const CVector& v = state.amplitudes();
  std::vector<double> out(pvm.size());
  for (std::size_t c = 0; c < pvm.size(); ++c) {
    const double p = v.dot(pvm[c].matrix() * v).real();
    if (p < -1e-12) fail(ErrorKind::NegativeProbability, pvm.labels()[c] + ": " + std::to_string(p));
    out[c] = std::clamp(p, 0.0, 1.0);
  }
  return out;
}

double expectation(const StateVector& state, const HermitianOperator& op) {
  same_dim(state.dim(), op.dim(), "expectation");
  const CVector& v = state.amplitudes();
  const Complex e = v.dot(op.matrix() * v);
  if (std::abs(e.imag()) >= tol::kAlgebraic)
    fail(ErrorKind::NonHermitianDrift, "imaginary part " + std::to_string(e.imag()));
  return e.real();
}

double commutator_norm(const HermitianOperator& a, const HermitianOperator& b) {
  same_dim(a.dim(), b.dim(), "commutator_norm");
  return (a.matrix() * b.matrix() - b.matrix() * a.matrix()).norm();
}

std::vector<JointEigenvector> common_eigenbasis(const HermitianOperator& a, const HermitianOperator& b,
                                                double tol) {
  const double comm = commutator_norm(a, b);
  if (comm > tol) fail(ErrorKind::NotCommuting, "commutator norm " + std::to_string(comm));

  const int n = a.dim();
  Eigen::SelfAdjointEigenSolver<CMatrix> ea(a.matrix());
  const Eigen::VectorXd& lam = ea.eigenvalues();
  const double gap = tol::kEigen * std::max(1.0, lam.cwiseAbs().maxCoeff());

  struct Keyed {
    JointEigenvector ev;
    int a_block;
    int b_block;
  };
  std::vector<Keyed> items;
  int block = 0;
  for (int start = 0; start < n; ++block) {
    int end = start + 1;
    while (end < n && lam(end) - lam(end - 1) <= gap) ++end;
    const CMatrix q = ea.eigenvectors().middleCols(start, end - start);
    CMatrix restricted = q.adjoint() * b.matrix() * q;
    restricted = 0.5 * (restricted + restricted.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> eb(restricted);
    const Eigen::VectorXd& mu = eb.eigenvalues();
    const double bgap = tol::kEigen * std::max(1.0, mu.cwiseAbs().maxCoeff());
    int b_block = 0;
    for (int k = 0; k < end - start; ++k) {
      if (k > 0 && mu(k) - mu(k - 1) > bgap) ++b_block;
      CVector v = fix_phase((q * eb.eigenvectors().col(k)).normalized());
      JointEigenvector ev;
      ev.a_value = v.dot(a.matrix() * v).real();
      ev.b_value = v.dot(b.matrix() * v).real();
      ev.vector = std::move(v);
      items.push_back({std::move(ev), block, b_block});
    }
    start = end;
  }
  std::stable_sort(items.begin(), items.end(), [](const Keyed& x, const Keyed& y) {
    if (x.a_block != y.a_block) return x.a_block < y.a_block;
    if (x.b_block != y.b_block) return x.b_block < y.b_block;
    return lex_less(x.ev.vector, y.ev.vector);
  });
  std::vector<JointEigenvector> out;
  out.reserve(items.size());
  for (auto& it : items) out.push_back(std::move(it.ev));
  return out;
}

StateVector superpose(Complex a, const StateVector& w1, Complex b, const StateVector& w2) {
  same_dim(w1.dim(), w2.dim(), "superpose");
  const CVector raw = a * w1.amplitudes() + b * w2.amplitudes();
  return normalize(raw);
}

std::vector<double> interference_terms(Complex a, const StateVector& w1, Complex b, const StateVector& w2,
                                       const Pvm& pvm) {
  same_dim(w1.dim(), w2.dim(), "interference_terms");
  same_dim(w1.dim(), pvm.dim(), "interference_terms");
  const Complex coeff = std::conj(a) * b;
  std::vector<double> out(pvm.size());
  for (std::size_t c = 0; c < pvm.size(); ++c) {
    const Complex overlap = w1.amplitudes().dot(pvm[c].matrix() * w2.amplitudes());
    out[c] = 2.0 * (coeff * overlap).real();
  }
  return out;
}

}  // namespace qdu
