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

#include <vector>

namespace cvbench::sdp {

struct SymmetricEntry {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Sparse real symmetric matrix; both (r, c) and (c, r) are listed.
using SparseSymmetric = std::vector<SymmetricEntry>;

/// Block-diagonal linear matrix inequality family
///
///   F_b(theta) = constant[b] + sum_k theta_k directions[k][b],
///
/// for which the solver computes sup_theta min_b lambda_min(F_b(theta)).
struct MarginProblem {
  std::vector<Eigen::MatrixXd> constant;
  std::vector<std::vector<SparseSymmetric>> directions;

  int num_blocks() const { return static_cast<int>(constant.size()); }
  int num_parameters() const { return static_cast<int>(directions.size()); }
  /// Throws InvalidArgument on inconsistent shapes or out-of-range entries.
  void validate() const;
};

struct SolverSettings {
  int max_iterations = 150;
  // Stop once |primal - dual| <= gap_tolerance * (1 + |dual|) with the
  // primal residual below feasibility_tolerance, or once the certified
  // margin has not moved by more than gap_tolerance for `patience` steps
  // while the bound gap is within `accuracy`.
  double gap_tolerance = 1e-10;
  double feasibility_tolerance = 1e-8;
  int patience = 8;
  // Bound gap (relative to 1 + |margin|) accepted at termination.
  double accuracy = 1e-5;
  double step_fraction = 0.98;
  // When false, a stalled solve is returned with converged == false.
  bool throw_on_stall = true;
};

struct MarginSolution {
  Eigen::VectorXd theta;
  // min_b lambda_min(F_b(theta)) evaluated directly at `theta`.
  double margin = 0.0;
  // Primal objective; an upper bound on the supremum once primal-feasible.
  double upper_bound = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
  double gap() const { return upper_bound - margin; }
};

Eigen::MatrixXd evaluate_block(const MarginProblem& problem, int block,
                               const Eigen::VectorXd& theta);
double min_eigenvalue(const MarginProblem& problem, const Eigen::VectorXd& theta);

/// Primal-dual path-following interior-point method (HKM search direction,
/// Mehrotra predictor-corrector) on
///
///   maximize t  subject to  F_b(theta) - t I >= 0  for every block b.
///
/// The dual problem is min <F_0, X> over X >= 0 with tr X = 1 and
/// <F_k, X> = 0, which is strictly feasible whenever the directions are
/// traceless; its value certifies the upper bound.
///
/// Throws SolverStall if the iterations stop improving while the bound gap
/// still exceeds `settings.accuracy`.
MarginSolution maximize_min_eigenvalue(const MarginProblem& problem,
                                       const SolverSettings& settings = {});

}  // namespace cvbench::sdp
