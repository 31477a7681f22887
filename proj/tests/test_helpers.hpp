#pragma once

#include "symhorn/core.hpp"

#include <vector>

namespace testutil {

using symhorn::Matrix;
using symhorn::Vector;

// H = diag(lambda, lambda): the Hamiltonian sum_j (lambda_j/2)(q_j^2 + p_j^2)
inline Matrix torus_form(const std::vector<double>& lambda) {
  const int n = int(lambda.size());
  Matrix H = Matrix::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) H(j, j) = H(n + j, n + j) = lambda[j];
  return H;
}

// random positive definite 2n x 2n: M M^T + shift I
inline Matrix random_pd(int n, symhorn::Rng& rng, double shift = 0.3) {
  Matrix M(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) M(i, j) = rng.uniform(-1.0, 1.0);
  return M * M.transpose() + shift * Matrix::Identity(2 * n, 2 * n);
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(long(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace testutil
