#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qdu/error.hpp"
#include "qdu/hilbert.hpp"
#include "support.hpp"

using namespace qdu;
using qdu::testing::max_abs;
using qdu::testing::random_hermitian;
using qdu::testing::random_state;
using qdu::testing::random_unitary;

namespace {

CVector vec(std::initializer_list<Complex> xs) {
  CVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (Complex x : xs) v(k++) = x;
  return v;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidSpec;
}

const double kS2 = 1.0 / std::sqrt(2.0);

}  // namespace

TEST_CASE("normalize examples") {
  CHECK((normalize(vec({2, 0, 0})).amplitudes() - vec({1, 0, 0})).norm() < 1e-15);
  const double s3 = 1.0 / std::sqrt(3.0);
  CHECK((normalize(vec({1, 1, 1})).amplitudes() - vec({s3, s3, s3})).norm() < 1e-15);
  CHECK((normalize(vec({Complex(1, 1), 0})).amplitudes() - vec({Complex(kS2, kS2), 0})).norm() < 1e-15);
  CHECK(kind_of([] { normalize(vec({1e-15, 0})); }) == ErrorKind::ZeroVector);
  CHECK(kind_of([] { normalize(vec({1, 0, 0, 0, 0, 0, 0, 0, 0})); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { normalize(vec({std::nan(""), 1})); }) == ErrorKind::InvariantViolation);
}

TEST_CASE("type invariants reject bad inputs") {
  CHECK_THROWS_AS(StateVector(vec({1, 1})), Error);
  CMatrix m(2, 2);
  m << 1, Complex(0, 1), Complex(0, 1), 1;
  CHECK_THROWS_AS(HermitianOperator{m}, Error);
  CMatrix p = CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(Projector(HermitianOperator(p), 1), Error);  // trace 2, rank 1
  CHECK_THROWS_AS(UnitaryOperator(2.0 * CMatrix::Identity(2, 2)), Error);
  CHECK_THROWS_AS(Pvm({"a", "b"}, {Projector::canonical(2, 0), Projector::canonical(2, 0)}), Error);
}

TEST_CASE("born probabilities examples") {
  const double s3 = 1.0 / std::sqrt(3.0);
  const auto p = born_probabilities(StateVector(vec({s3, s3, s3})), Pvm::canonical({"r", "y", "b"}));
  for (double x : p) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  CMatrix cols(3, 3);
  cols << kS2, kS2, 0, kS2, -kS2, 0, 0, 0, 1;
  const auto q = born_probabilities(StateVector::basis(3, 0), Pvm::from_basis(cols, {"a", "b", "c"}));
  CHECK(std::abs(q[0] - 0.5) < 1e-15);
  CHECK(std::abs(q[1] - 0.5) < 1e-15);
  CHECK(std::abs(q[2]) < 1e-15);
  CHECK(kind_of([] { born_probabilities(StateVector::basis(2, 0), Pvm::canonical({"r", "y", "b"})); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("expectation examples") {
  std::mt19937_64 rng(3);
  const StateVector v = random_state(rng, 4);
  CHECK(std::abs(expectation(v, HermitianOperator::identity(4)) - 1.0) < 1e-14);
  const double d1[] = {5, 7, 9};
  CHECK(expectation(StateVector::basis(3, 0), HermitianOperator::diagonal(d1)) == 5.0);
  const double d2[] = {0, 12, 0};
  CHECK(std::abs(expectation(StateVector(vec({kS2, kS2, 0})), HermitianOperator::diagonal(d2)) - 6.0) < 1e-14);
}

TEST_CASE("commutator norm examples") {
  CMatrix sx(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  CHECK(std::abs(commutator_norm(HermitianOperator(sx), HermitianOperator(sz)) - 2.0 * std::sqrt(2.0)) < 1e-14);
  std::mt19937_64 rng(5);
  const auto a = random_hermitian(rng, 3);
  CHECK(commutator_norm(a, HermitianOperator::identity(3)) < 1e-12);
  const double d1[] = {1, 2, 3}, d2[] = {-4, 0.5, 7};
  CHECK(commutator_norm(HermitianOperator::diagonal(d1), HermitianOperator::diagonal(d2)) == 0.0);
}

TEST_CASE("common eigenbasis examples") {
  const double d1[] = {3, 1, 2}, d2[] = {0, 5, 5};
  const auto basis = common_eigenbasis(HermitianOperator::diagonal(d1), HermitianOperator::diagonal(d2), 1e-10);
  REQUIRE(basis.size() == 3);
  // ascending in a: 1, 2, 3 -> canonical vectors e1, e2, e0
  CHECK((basis[0].vector - StateVector::basis(3, 1).amplitudes()).norm() < 1e-12);
  CHECK((basis[1].vector - StateVector::basis(3, 2).amplitudes()).norm() < 1e-12);
  CHECK((basis[2].vector - StateVector::basis(3, 0).amplitudes()).norm() < 1e-12);

  CMatrix sx(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  CHECK(kind_of([&] { common_eigenbasis(HermitianOperator(sx), HermitianOperator(sz), 1e-10); }) ==
        ErrorKind::NotCommuting);
}

TEST_CASE("common eigenbasis recovers a shared unitary") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    const CMatrix u = random_unitary(rng, n);
    Eigen::VectorXd da(n), db(n);
    for (int k = 0; k < n; ++k) {
      da(k) = static_cast<double>(k % 2);  // degenerate in a
      db(k) = static_cast<double>(k);      // resolves the degeneracy
    }
    const HermitianOperator a(u * da.cast<Complex>().asDiagonal() * u.adjoint());
    const HermitianOperator b(u * db.cast<Complex>().asDiagonal() * u.adjoint());
    const auto basis = common_eigenbasis(a, b, 1e-10);
    REQUIRE(basis.size() == static_cast<std::size_t>(n));
    for (const auto& e : basis) {
      const int k = static_cast<int>(std::lround(e.b_value));
      CHECK(std::abs(e.a_value - da(k)) < 1e-8);
      // equal to column k up to a phase
      CHECK(std::abs(std::abs(u.col(k).dot(e.vector)) - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("superpose examples") {
  const StateVector w1 = StateVector::basis(3, 0), w2 = StateVector::basis(3, 1);
  CHECK((superpose(1.0, w1, 0.0, w2).amplitudes() - w1.amplitudes()).norm() < 1e-15);
  CHECK((superpose(kS2, w1, kS2, w2).amplitudes() - vec({kS2, kS2, 0})).norm() < 1e-15);
  CHECK(kind_of([&] { superpose(kS2, w1, -kS2, w1); }) == ErrorKind::ZeroVector);
  CHECK(kind_of([&] { superpose(kS2, w1, kS2, StateVector::basis(2, 0)); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("interference examples") {
  const StateVector w1 = StateVector::basis(3, 1), w2 = StateVector::basis(3, 2);
  for (Complex b : {Complex(0.3, 0.4), Complex(-1, 2)})
    for (double t : interference_terms(Complex(0.2, -0.7), w1, b, w2, Pvm::canonical({"r", "y", "b"})))
      CHECK(t == 0.0);
  CMatrix cols(3, 3);
  cols << 0, 0, 1, kS2, kS2, 0, kS2, -kS2, 0;
  const auto terms = interference_terms(kS2, w1, kS2, w2, Pvm::from_basis(cols, {"plus", "minus", "red"}));
  CHECK(std::abs(terms[0] - 0.5) < 1e-15);
  CHECK(std::abs(terms[1] + 0.5) < 1e-15);
  CHECK(std::abs(terms[0] + terms[1] + terms[2]) < 1e-15);
}

TEST_CASE("unitary from generator") {
  std::mt19937_64 rng(17);
  const HermitianOperator h = random_hermitian(rng, 4);
  const UnitaryOperator u = UnitaryOperator::from_generator(h);
  CHECK(max_abs(u.matrix().adjoint() * u.matrix() - CMatrix::Identity(4, 4)) < 1e-10);
  const double zero[] = {0, 0, 0};
  CHECK(max_abs(UnitaryOperator::from_generator(HermitianOperator::diagonal(zero)).matrix() -
                CMatrix::Identity(3, 3)) < 1e-15);
}

TEST_CASE("property: born probabilities and PVMs over random instances") {
  std::mt19937_64 rng(2024);
  double worst_sum = 0.0, worst_min = 0.0, worst_imag = 0.0, worst_pvm = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = kMinDim + trial % (kMaxDim - kMinDim + 1);
    const StateVector v = random_state(rng, n);
    const CMatrix u = random_unitary(rng, n);
    std::vector<std::string> labels;
    for (int k = 0; k < n; ++k) labels.push_back(std::to_string(k));
    const Pvm pvm = Pvm::from_basis(u, labels);
    CMatrix total = CMatrix::Zero(n, n);
    for (std::size_t c = 0; c < pvm.size(); ++c) total += pvm[c].matrix();
    worst_pvm = std::max(worst_pvm, max_abs(total - CMatrix::Identity(n, n)));
    const auto p = born_probabilities(v, pvm);
    double s = 0.0;
    for (double x : p) {
      s += x;
      worst_min = std::min(worst_min, x);
    }
    worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    const HermitianOperator h = random_hermitian(rng, n);
    const Complex raw = v.amplitudes().dot(h.matrix() * v.amplitudes());
    worst_imag = std::max(worst_imag, std::abs(raw.imag()));
    CHECK_NOTHROW(expectation(v, h));
  }
  CHECK(worst_sum <= 1e-10);
  CHECK(worst_min >= -1e-12);
  CHECK(worst_imag < 1e-10);
  CHECK(worst_pvm <= 1e-10);
}

TEST_CASE("property: superposition equals mixture plus interference") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst = 0.0, worst_sum = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = kMinDim + trial % (kMaxDim - kMinDim + 1);
    const StateVector w1 = random_state(rng, n), w2 = random_state(rng, n);
    const Complex a(unif(rng), unif(rng)), b(unif(rng), unif(rng));
    std::vector<std::string> labels;
    for (int k = 0; k < n; ++k) labels.push_back(std::to_string(k));
    const Pvm pvm = Pvm::from_basis(random_unitary(rng, n), labels);
    const double norm2 = (a * w1.amplitudes() + b * w2.amplitudes()).squaredNorm();
    if (norm2 < 1e-6) continue;
    const auto ps = born_probabilities(superpose(a, w1, b, w2), pvm);
    const auto p1 = born_probabilities(w1, pvm), p2 = born_probabilities(w2, pvm);
    const auto terms = interference_terms(a, w1, b, w2, pvm);
    double sum_terms = 0.0;
    for (int c = 0; c < n; ++c) {
      const double predicted = (std::norm(a) * p1[c] + std::norm(b) * p2[c] + terms[c]) / norm2;
      worst = std::max(worst, std::abs(predicted - ps[c]));
      sum_terms += terms[c];
    }
    const double expected_sum = 2.0 * (std::conj(a) * b * w1.amplitudes().dot(w2.amplitudes())).real();
    worst_sum = std::max(worst_sum, std::abs(sum_terms - expected_sum));
  }
  CHECK(worst <= 1e-10);
  CHECK(worst_sum <= 1e-10);
}

TEST_CASE("property: common eigenbasis is orthonormal and diagonalizes both") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = kMinDim + trial % (kMaxDim - kMinDim + 1);
    const CMatrix u = random_unitary(rng, n);
    std::uniform_int_distribution<int> level(-1, 1);
    Eigen::VectorXd da(n), db(n);
    for (int k = 0; k < n; ++k) {
      da(k) = level(rng);
      db(k) = level(rng);
    }
    const HermitianOperator a(u * da.cast<Complex>().asDiagonal() * u.adjoint());
    const HermitianOperator b(u * db.cast<Complex>().asDiagonal() * u.adjoint());
    const auto basis = common_eigenbasis(a, b, 1e-10);
    CMatrix q(n, n);
    for (int k = 0; k < n; ++k) {
      q.col(k) = basis[k].vector;
      CHECK((a.matrix() * basis[k].vector - basis[k].a_value * basis[k].vector).norm() <= 1e-8);
      CHECK((b.matrix() * basis[k].vector - basis[k].b_value * basis[k].vector).norm() <= 1e-8);
    }
    CHECK(max_abs(q.adjoint() * q - CMatrix::Identity(n, n)) <= 1e-8);
  }
}

TEST_CASE("common eigenbasis is deterministic") {
  std::mt19937_64 rng(5150);
  const CMatrix u = random_unitary(rng, 4);
  Eigen::VectorXd da(4), db(4);
  da << 1, 1, -1, -1;
  db << 1, -1, 1, 1;
  const HermitianOperator a(u * da.cast<Complex>().asDiagonal() * u.adjoint());
  const HermitianOperator b(u * db.cast<Complex>().asDiagonal() * u.adjoint());
  const auto x = common_eigenbasis(a, b, 1e-10), y = common_eigenbasis(a, b, 1e-10);
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(x[k].vector == y[k].vector);
  for (std::size_t k = 1; k < x.size(); ++k) {
    CHECK(x[k - 1].a_value <= x[k].a_value + 1e-8);
    if (std::abs(x[k - 1].a_value - x[k].a_value) <= 1e-8) CHECK(x[k - 1].b_value <= x[k].b_value + 1e-8);
  }
}
