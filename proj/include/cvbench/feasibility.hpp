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

#include <string_view>

#include "cvbench/evm.hpp"
#include "cvbench/sdp_solver.hpp"

namespace cvbench {

/// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a complex
/// Hermitian matrix. Every eigenvalue of H appears twice in the result.
/// Throws InvalidArgument if `h` is not Hermitian to 1e-12.
Eigen::MatrixXd realify(const Eigen::MatrixXcd& h);

enum class ConstraintSet {
  kPhysicalOnly,    // chi >= 0
  kPhysicalAndPpt,  // chi >= 0 and chi^{T_A} >= 0
};

/// How the constrained matrices are presented to the solver.
///
/// kRaw measures the margin as the smallest eigenvalue of chi (and of
/// chi^{T_A}) directly. kWhitened first applies the invertible congruence
/// (W (x) 1) . (W (x) 1)^dag with W = G^{-1/2} built from the known overlap
/// table G (eigenvalues clipped from below at kWhiteningFloor * max), and the
/// conjugate congruence to chi^{T_A}. Congruence keeps the feasible set and
/// the sign of the margin; it only rescales the margin so that ensembles of
/// strongly overlapping states do not squeeze it towards zero.
enum class Normalization { kRaw, kWhitened };

inline constexpr double kWhiteningFloor = 1e-8;

struct FeasibilityProblem {
  const PartialEvm* evm = nullptr;
  ConstraintSet constraints = ConstraintSet::kPhysicalAndPpt;
  Normalization normalization = Normalization::kRaw;
};

struct SolverDiagnostics {
  int iterations = 0;
  double upper_bound = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
};

struct FeasibilityReport {
  // t* = sup_theta of the smallest eigenvalue over all constrained matrices.
  double margin = 0.0;
  Eigen::VectorXd optimizer;
  SolverDiagnostics diagnostics;
};

/// Congruence used by Normalization::kWhitened for an EVM with a known
/// overlap table (identity otherwise).
Eigen::MatrixXcd whitening_transform(const PartialEvm& evm);

/// Completion used as the solver's starting point under kWhitened: each free
/// entry of block (i, j) is <phi_i|phi_j>/N times the average of the
/// normalized diagonal blocks i and j; block directions start at zero. For
/// nearly identical inputs this is close to a Kronecker product with the
/// overlap table, which keeps the whitened matrices well scaled.
Eigen::VectorXd reference_completion(const PartialEvm& evm);

/// The completion problem as a block LMI for the solver. Solver coordinates
/// c map to free parameters as origin + to_params * c.
struct LoweredProblem {
  sdp::MarginProblem problem;
  Eigen::VectorXd origin;
  Eigen::MatrixXd to_params;
};

LoweredProblem build_margin_problem(const FeasibilityProblem& p);

/// Smallest eigenvalue among the constrained matrices at completion `theta`
/// (absolute parameter values, as returned in FeasibilityReport::optimizer),
/// in the units of `p.normalization`.
double margin_at(const FeasibilityProblem& p, const Eigen::VectorXd& theta);

/// Maximizes the smallest eigenvalue over all completions. Accurate to 1e-7
/// in absolute terms; deterministic. Throws SolverStall.
FeasibilityReport max_margin(const FeasibilityProblem& p,
                             const sdp::SolverSettings& settings = {});

enum class VerdictStatus { kEntangled, kCompatible, kUnphysical };

std::string_view to_string(VerdictStatus s);

struct Verdict {
  VerdictStatus status = VerdictStatus::kCompatible;
  // t*_ppt when a PPT solve ran, otherwise t*_phys.
  double margin = 0.0;
  double physical_margin = 0.0;
  double tolerance = 1e-7;
};

inline constexpr double kDefaultVerdictTolerance = 1e-7;

/// UNPHYSICAL if no completion is positive semidefinite beyond -tol,
/// ENTANGLED if one is but none also has a positive partial transpose beyond
/// -tol, COMPATIBLE otherwise (ties within tol resolve to COMPATIBLE).
/// Margins are computed with Normalization::kWhitened. An unconverged solve
/// is still decisive when its whole bound interval lies on one side of -tol;
/// otherwise SolverStall is thrown.
Verdict classify(const PartialEvm& evm, double tol = kDefaultVerdictTolerance);

}  // namespace cvbench
