// Copyright 2026 The cvbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Truncated number-basis helpers shared by the oracle tests.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>

namespace cvbench::fock {

inline Eigen::MatrixXcd annihilation(int dim) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline Eigen::MatrixXcd quadrature_x(int dim) {
  const Eigen::MatrixXcd a = annihilation(dim);
  return (a + a.adjoint()) / std::sqrt(2.0);
}

inline Eigen::MatrixXcd quadrature_p(int dim) {
  const Eigen::MatrixXcd a = annihilation(dim);
  return std::complex<double>(0.0, 1.0) * (a.adjoint() - a) / std::sqrt(2.0);
}

// c_n = exp(-|alpha|^2 / 2) alpha^n / sqrt(n!), built by recursion.
inline Eigen::VectorXcd coherent_state(std::complex<double> alpha, int dim) {
  Eigen::VectorXcd v(dim);
  v[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) v[n] = v[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  return v;
}

}  // namespace cvbench::fock
