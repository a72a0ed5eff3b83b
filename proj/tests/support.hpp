#pragma once

// Random instance generators shared by the property suites. Unitaries come
// from a QR factorization, independent of the library's exp(iH) path.

#include <Eigen/QR>

#include <cstdint>
#include <random>

#include "qdu/hilbert.hpp"

namespace qdu::testing {

inline CVector random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (int k = 0; k < n; ++k) v(k) = Complex(g(rng), g(rng));
  return v;
}

inline StateVector random_state(std::mt19937_64& rng, int n) { return normalize(random_vector(rng, n)); }

inline CMatrix random_unitary(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CMatrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  return q;
}

inline HermitianOperator random_hermitian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return HermitianOperator((m + m.adjoint()) / 2.0);
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace qdu::testing
