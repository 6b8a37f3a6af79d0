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


#pragma once

#include <Eigen/Dense>

#include "cvbench/channel_models.hpp"

namespace cvbench {

/// Covariance matrix of a two-mode Gaussian state, ordered
/// (x_A, p_A, x_B, p_B), vacuum = identity / 2.
struct TwoModeCovariance {
  Eigen::Matrix4d matrix = 0.5 * Eigen::Matrix4d::Identity();

  Eigen::Matrix2d a_block() const { return matrix.topLeftCorner<2, 2>(); }
  Eigen::Matrix2d b_block() const { return matrix.bottomRightCorner<2, 2>(); }
  Eigen::Matrix2d cross_block() const { return matrix.topRightCorner<2, 2>(); }

  /// Symmetric and matrix + (i/2) Omega >= -tol.
  bool is_bona_fide(double tol = 1e-10) const;
};

/// Standard symplectic form diag(J, J), J = [[0, 1], [-1, 0]].
Eigen::Matrix4d symplectic_form();

/// Two-mode squeezed vacuum with squeezing r >= 0:
/// (1/2) [[cosh 2r * 1, sinh 2r * Z], [sinh 2r * Z, cosh 2r * 1]], Z = diag(1, -1).
TwoModeCovariance tmss_covariance(double r);

/// Sends mode B through the loss + noise channel.
TwoModeCovariance channel_on_covariance(const ChannelParams& ch, const TwoModeCovariance& cm);

/// Both symplectic eigenvalues, ascending, from the spectrum of i Omega cm.
Eigen::Vector2d symplectic_eigenvalues(const TwoModeCovariance& cm);

/// Covariance of the partial transpose: p_B -> -p_B.
TwoModeCovariance partial_transpose(const TwoModeCovariance& cm);

struct PptResult {
  bool entangled = false;
  // Smallest symplectic eigenvalue of the partially transposed covariance.
  double witness = 0.5;
};

/// Simon's criterion: entangled iff the smallest symplectic eigenvalue of the
/// partial transpose is below 1/2 - 1e-12. Throws PhysicalityError if `cm`
/// is not a bona fide covariance matrix.
PptResult ppt_entangled(const TwoModeCovariance& cm);

/// eta / (1 - eta): the largest thermal occupation for which the squeezed
/// state stays entangled. +infinity at eta = 1.
double covariance_noise_threshold(double eta);

/// The same threshold found by bisection on ppt_entangled with squeezing r.
/// The upper bracket is doubled until the state separates. Infinity at eta = 1.
double covariance_noise_threshold_numeric(double eta, double r = 0.5, double precision = 1e-10);

/// Best average fidelity of measure-and-prepare strategies for Gaussian
/// distributed coherent states: (1 + lambda) / (1 + lambda + eta).
/// lambda = +infinity gives 1.
double gaussian_fidelity_bound(double lambda, double eta);

/// Quadrature variance added on top of pure loss: (1 - eta) nbar.
double excess_variance(const ChannelParams& ch);

}  // namespace cvbench
