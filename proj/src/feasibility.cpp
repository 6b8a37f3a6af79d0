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

#include "cvbench/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cvbench/errors.hpp"

namespace cvbench {
namespace {

// Entries of a transformed direction below this fraction of its largest
// entry are rounding debris of the congruence.
constexpr double kSparsityCutoff = 1e-15;

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& h) {
  return 0.5 * (h + h.adjoint());
}

Eigen::MatrixXd realify_unchecked(const Eigen::MatrixXcd& h) {
  const auto d = h.rows();
  Eigen::MatrixXd out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = h.real();
  out.topRightCorner(d, d) = -h.imag();
  out.bottomLeftCorner(d, d) = h.imag();
  out.bottomRightCorner(d, d) = h.real();
  return out;
}

sdp::SparseSymmetric to_sparse(const Eigen::MatrixXd& m) {
  sdp::SparseSymmetric out;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return out;
  for (int c = 0; c < m.cols(); ++c) {
    for (int r = 0; r < m.rows(); ++r) {
      if (std::abs(m(r, c)) > kSparsityCutoff * scale) out.push_back({r, c, m(r, c)});
    }
  }
  return out;
}

// Whitened directions span very different scales. The solver works on an
// orthonormal basis Q of their span (Frobenius inner product over all
// blocks); `to_params` maps basis coordinates back to parameter offsets.
struct Basis {
  std::vector<std::vector<Eigen::MatrixXd>> q;
  Eigen::MatrixXd to_params;
};

Basis orthonormalize(const std::vector<std::vector<Eigen::MatrixXd>>& dirs) {
  Eigen::Index rows = 0;
  for (const auto& blk : dirs.front()) rows += blk.size();
  const auto m = static_cast<Eigen::Index>(dirs.size());
  Eigen::MatrixXd stacked(rows, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    Eigen::Index offset = 0;
    for (const auto& blk : dirs[static_cast<std::size_t>(k)]) {
      stacked.col(k).segment(offset, blk.size()) =
          Eigen::Map<const Eigen::VectorXd>(blk.data(), blk.size());
      offset += blk.size();
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
  qr.setThreshold(1e-13);
  const Eigen::Index rank = qr.rank();
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, rank);

  Basis out;
  // stacked * P = Q R, so the parameter offset for coordinates c is
  // P [R11^{-1} c; 0].
  const Eigen::MatrixXd r11 =
      qr.matrixR().topLeftCorner(rank, rank).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv = r11.triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(rank, rank));
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(m, rank);
  padded.topRows(rank) = r_inv;
  out.to_params = qr.colsPermutation() * padded;

  out.q.resize(static_cast<std::size_t>(rank));
  for (Eigen::Index k = 0; k < rank; ++k) {
    Eigen::Index offset = 0;
    for (const auto& blk : dirs.front()) {
      out.q[static_cast<std::size_t>(k)].push_back(
          Eigen::Map<const Eigen::MatrixXd>(q.col(k).data() + offset, blk.rows(), blk.cols()));
      offset += blk.size();
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd realify(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) {
    throw InvalidArgument("realify: matrix must be square");
  }
  if (h.size() > 0) {
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw InvalidArgument("realify: matrix is not Hermitian");
    }
  }
  return realify_unchecked(h);
}

Eigen::MatrixXcd whitening_transform(const PartialEvm& evm) {
  const int dim = evm.dim();
  if (!evm.top_left_known()) {
    return Eigen::MatrixXcd::Identity(dim, dim);
  }
  const Eigen::MatrixXcd g = hermitian_part(evm.top_left_table());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double top = lambda.maxCoeff();
  if (!(top > 0.0)) {
    return Eigen::MatrixXcd::Identity(dim, dim);
  }
  const double floor = kWhiteningFloor * top;
  Eigen::VectorXd inv_sqrt(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    inv_sqrt[k] = 1.0 / std::sqrt(std::max(lambda[k], floor));
  }
  const Eigen::MatrixXcd& u = eig.eigenvectors();
  const Eigen::MatrixXcd w = u * inv_sqrt.cast<Complex>().asDiagonal() * u.adjoint();

  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < evm.n_states(); ++i) {
    for (int j = 0; j < evm.n_states(); ++j) {
      t.block<3, 3>(3 * i, 3 * j) = w(i, j) * Eigen::Matrix3cd::Identity();
    }
  }
  return t;
}

Eigen::VectorXd reference_completion(const PartialEvm& evm) {
  const auto params = evm.free_parameters();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.size()));
  if (!evm.top_left_known()) return theta;
  const int n = evm.n_states();
  Eigen::MatrixXcd ref = evm.values();
  for (int i = 0; i < n; ++i) {
    const double wi = evm.block(i, i)(0, 0).real();
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double wj = evm.block(j, j)(0, 0).real();
      if (!(wi > 0.0 && wj > 0.0)) continue;
      const Eigen::Matrix3cd avg = 0.5 * (evm.block(i, i) / wi + evm.block(j, j) / wj);
      ref.block<3, 3>(3 * i, 3 * j) = evm.values()(3 * i, 3 * j) * avg;
    }
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& param = params[k];
    const auto idx = static_cast<Eigen::Index>(k);
    if (param.part == FreeParameter::Part::kReal) {
      theta[idx] = ref(param.row, param.col).real();
    } else if (param.part == FreeParameter::Part::kImag) {
      theta[idx] = ref(param.row, param.col).imag();
    }
  }
  return theta;
}

LoweredProblem build_margin_problem(const FeasibilityProblem& p) {
  if (p.evm == nullptr) {
    throw InvalidArgument("feasibility problem without an EVM");
  }
  const PartialEvm& evm = *p.evm;
  const int n = evm.n_states();
  const auto params = evm.free_parameters();
  const bool whitened = p.normalization == Normalization::kWhitened;
  const bool with_ppt = p.constraints == ConstraintSet::kPhysicalAndPpt;

  const Eigen::MatrixXcd t =
      whitened ? whitening_transform(evm) : Eigen::MatrixXcd::Identity(evm.dim(), evm.dim());
  const Eigen::MatrixXcd t_conj = t.conjugate();
  auto transform = [](const Eigen::MatrixXcd& congruence, const Eigen::MatrixXcd& h) {
    return realify_unchecked(hermitian_part(congruence * h * congruence.adjoint()));
  };

  LoweredProblem out;
  const auto m = static_cast<Eigen::Index>(params.size());
  out.origin = whitened ? reference_completion(evm) : Eigen::VectorXd::Zero(m);
  const Eigen::MatrixXcd base = evm.complete(out.origin);
  out.problem.constant.push_back(transform(t, base));
  if (with_ppt) {
    out.problem.constant.push_back(transform(t_conj, partial_transpose(base, n)));
  }

  std::vector<std::vector<Eigen::MatrixXd>> dense;
  dense.reserve(params.size());
  for (const auto& param : params) {
    const Eigen::MatrixXcd d = evm.parameter_direction(param);
    std::vector<Eigen::MatrixXd> per_block;
    per_block.push_back(transform(t, d));
    if (with_ppt) per_block.push_back(transform(t_conj, partial_transpose(d, n)));
    dense.push_back(std::move(per_block));
  }
  if (whitened && !dense.empty()) {
    Basis basis = orthonormalize(dense);
    dense = std::move(basis.q);
    out.to_params = std::move(basis.to_params);
  } else {
    out.to_params = Eigen::MatrixXd::Identity(m, m);
  }
  out.problem.directions.reserve(dense.size());
  for (const auto& per_block : dense) {
    std::vector<sdp::SparseSymmetric> sparse;
    for (const auto& blk : per_block) sparse.push_back(to_sparse(blk));
    out.problem.directions.push_back(std::move(sparse));
  }
  return out;
}

double margin_at(const FeasibilityProblem& p, const Eigen::VectorXd& theta) {
  if (p.evm == nullptr) {
    throw InvalidArgument("feasibility problem without an EVM");
  }
  const PartialEvm& evm = *p.evm;
  const Eigen::MatrixXcd chi = evm.complete(theta);
  std::vector<Eigen::MatrixXcd> constrained{chi};
  if (p.constraints == ConstraintSet::kPhysicalAndPpt) {
    constrained.push_back(partial_transpose(chi, evm.n_states()));
  }
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(evm.dim(), evm.dim());
  if (p.normalization == Normalization::kWhitened) t = whitening_transform(evm);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < constrained.size(); ++k) {
    const Eigen::MatrixXcd& c = k == 0 ? t : Eigen::MatrixXcd(t.conjugate());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
        hermitian_part(c * constrained[k] * c.adjoint()), Eigen::EigenvaluesOnly);
    lo = std::min(lo, eig.eigenvalues().minCoeff());
  }
  return lo;
}

FeasibilityReport max_margin(const FeasibilityProblem& p, const sdp::SolverSettings& settings) {
  const LoweredProblem lowered = build_margin_problem(p);
  const sdp::MarginSolution sol = sdp::maximize_min_eigenvalue(lowered.problem, settings);
  FeasibilityReport report;
  report.margin = sol.margin;
  report.optimizer = lowered.origin + lowered.to_params * sol.theta;
  report.diagnostics.iterations = sol.iterations;
  report.diagnostics.upper_bound = sol.upper_bound;
  report.diagnostics.primal_residual = sol.primal_residual;
  report.diagnostics.dual_residual = sol.dual_residual;
  report.diagnostics.converged = sol.converged;
  return report;
}

std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::kEntangled:
      return "ENTANGLED";
    case VerdictStatus::kCompatible:
      return "COMPATIBLE";
    case VerdictStatus::kUnphysical:
      return "UNPHYSICAL";
  }
  return "UNKNOWN";
}

namespace {

// True when the supremum is certainly below -tol, false when it is certainly
// not; throws when the solve could not separate the two.
bool below(const FeasibilityReport& r, double tol) {
  if (r.margin >= -tol) return false;
  if (r.diagnostics.converged || r.diagnostics.upper_bound < -tol) return true;
  std::ostringstream msg;
  msg.precision(12);
  msg << "margin undecided at tolerance " << tol << ": certified " << r.margin
      << ", upper bound " << r.diagnostics.upper_bound;
  throw SolverStall(msg.str());
}

}  // namespace

Verdict classify(const PartialEvm& evm, double tol) {
  if (!(tol > 0.0)) {
    throw InvalidArgument("verdict tolerance must be positive");
  }
  sdp::SolverSettings settings;
  settings.throw_on_stall = false;
  Verdict v;
  v.tolerance = tol;
  const FeasibilityReport phys =
      max_margin({&evm, ConstraintSet::kPhysicalOnly, Normalization::kWhitened}, settings);
  v.physical_margin = phys.margin;
  v.margin = phys.margin;
  if (below(phys, tol)) {
    v.status = VerdictStatus::kUnphysical;
    return v;
  }
  const FeasibilityReport ppt =
      max_margin({&evm, ConstraintSet::kPhysicalAndPpt, Normalization::kWhitened}, settings);
  v.margin = ppt.margin;
  v.status = below(ppt, tol) ? VerdictStatus::kEntangled : VerdictStatus::kCompatible;
  return v;
}

}  // namespace cvbench
