#pragma once

#include <cmath>
#include <random>

#include "doctest.h"
#include "tmsq/hilbert.hpp"

namespace tmsq::test {

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Random Hermitian matrix with entries of order `scale`.
inline Matrix random_hermitian(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (m + m.adjoint());
}

inline Vector random_state(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v / v.norm();
}

// Mixed state from a few random pure states with random weights.
inline DensityMatrix random_density(const SpaceDescriptor& s, std::mt19937_64& rng, int rank = 3) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Matrix m = Matrix::Zero(s.dim(), s.dim());
  for (int k = 0; k < rank; ++k) {
    const Vector v = random_state(s.dim(), rng);
    m += u(rng) * v * v.adjoint();
  }
  return DensityMatrix::renormalized(s, m);
}

}  // namespace tmsq::test
