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

#include "cvbench/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cvbench/errors.hpp"

namespace cvbench::sdp {
namespace {

using Blocks = std::vector<Eigen::MatrixXd>;

constexpr double kInfinity = std::numeric_limits<double>::infinity();

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double frobenius(const Blocks& a) { return std::sqrt(inner(a, a)); }

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Largest step s in (0, inf] with x + s * dx >= 0 given x > 0.
double max_step(const Blocks& x, const Blocks& dx) {
  double step = kInfinity;
  for (std::size_t b = 0; b < x.size(); ++b) {
    Eigen::LLT<Eigen::MatrixXd> llt(x[b]);
    if (llt.info() != Eigen::Success) return 0.0;
    Eigen::MatrixXd w = llt.matrixL().solve(dx[b]);
    w = llt.matrixL().solve(w.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(w), Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    if (lo < 0.0) step = std::min(step, -1.0 / lo);
  }
  return step;
}

// Dual-form operators for the constraint matrices A_k = -F_k (k < m) and
// A_m = I, with y = (theta, t).
class Operators {
 public:
  explicit Operators(const MarginProblem& p) : p_(p), m_(p.num_parameters()) {}

  int size() const { return m_ + 1; }

  Eigen::VectorXd apply(const Blocks& y) const {
    Eigen::VectorXd out(size());
    for (int k = 0; k < m_; ++k) {
      double s = 0.0;
      for (int b = 0; b < p_.num_blocks(); ++b) {
        for (const auto& e : p_.directions[k][b]) s += e.value * y[b](e.row, e.col);
      }
      out[k] = -s;
    }
    double tr = 0.0;
    for (const auto& blk : y) tr += blk.trace();
    out[m_] = tr;
    return out;
  }

  Blocks adjoint(const Eigen::VectorXd& y) const {
    Blocks out;
    for (int b = 0; b < p_.num_blocks(); ++b) {
      const auto n = p_.constant[b].rows();
      Eigen::MatrixXd a = y[m_] * Eigen::MatrixXd::Identity(n, n);
      for (int k = 0; k < m_; ++k) {
        for (const auto& e : p_.directions[k][b]) a(e.row, e.col) -= y[k] * e.value;
      }
      out.push_back(std::move(a));
    }
    return out;
  }

  // Schur complement M(i, j) = sum_b tr(A_i X A_j Zinv).
  Eigen::MatrixXd schur(const Blocks& x, const Blocks& zinv) const {
    const int n = size();
    Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(n, n);
    Blocks g(p_.num_blocks());
    for (int j = 0; j < n; ++j) {
      for (int b = 0; b < p_.num_blocks(); ++b) {
        if (j == m_) {
          g[b] = x[b] * zinv[b];
          continue;
        }
        const auto& entries = p_.directions[j][b];
        const auto dim = x[b].rows();
        if (static_cast<Eigen::Index>(entries.size()) < dim) {
          g[b] = Eigen::MatrixXd::Zero(dim, dim);
          for (const auto& e : entries) {
            g[b].noalias() -= e.value * x[b].col(e.row) * zinv[b].row(e.col);
          }
        } else {
          Eigen::MatrixXd xa = Eigen::MatrixXd::Zero(dim, dim);
          for (const auto& e : entries) xa.col(e.col) -= e.value * x[b].col(e.row);
          g[b].noalias() = xa * zinv[b];
        }
      }
      // <A_i, G> = sum over entries of A_i of value * G(col, row).
      for (int i = 0; i <= j; ++i) {
        double s = 0.0;
        for (int b = 0; b < p_.num_blocks(); ++b) {
          if (i == m_) {
            s += g[b].trace();
          } else {
            for (const auto& e : p_.directions[i][b]) s -= e.value * g[b](e.col, e.row);
          }
        }
        schur(i, j) = s;
        schur(j, i) = s;
      }
    }
    return schur;
  }

 private:
  const MarginProblem& p_;
  int m_;
};

struct Direction {
  Blocks dx;
  Eigen::VectorXd dy;
  Blocks dz;
};

}  // namespace

void MarginProblem::validate() const {
  if (constant.empty()) {
    throw InvalidArgument("margin problem needs at least one block");
  }
  for (const auto& c : constant) {
    if (c.rows() != c.cols() || c.rows() == 0) {
      throw InvalidArgument("constant blocks must be square and non-empty");
    }
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + c.cwiseAbs().maxCoeff())) {
      throw InvalidArgument("constant blocks must be symmetric");
    }
  }
  for (const auto& dir : directions) {
    if (dir.size() != constant.size()) {
      throw InvalidArgument("every direction needs one sparse matrix per block");
    }
    for (std::size_t b = 0; b < dir.size(); ++b) {
      const auto n = constant[b].rows();
      for (const auto& e : dir[b]) {
        if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n) {
          throw InvalidArgument("direction entry outside its block");
        }
      }
    }
  }
}

Eigen::MatrixXd evaluate_block(const MarginProblem& problem, int block,
                               const Eigen::VectorXd& theta) {
  Eigen::MatrixXd f = problem.constant[block];
  for (int k = 0; k < problem.num_parameters(); ++k) {
    for (const auto& e : problem.directions[k][block]) f(e.row, e.col) += theta[k] * e.value;
  }
  return f;
}

double min_eigenvalue(const MarginProblem& problem, const Eigen::VectorXd& theta) {
  double lo = kInfinity;
  for (int b = 0; b < problem.num_blocks(); ++b) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(evaluate_block(problem, b, theta)),
                                                       Eigen::EigenvaluesOnly);
    lo = std::min(lo, eig.eigenvalues().minCoeff());
  }
  return lo;
}

MarginSolution maximize_min_eigenvalue(const MarginProblem& input,
                                       const SolverSettings& settings) {
  input.validate();
  // Directions are rescaled to unit max-norm; theta is mapped back at the end.
  MarginProblem problem = input;
  Eigen::VectorXd direction_scale = Eigen::VectorXd::Ones(problem.num_parameters());
  for (int k = 0; k < problem.num_parameters(); ++k) {
    double largest = 0.0;
    for (const auto& blk : problem.directions[k]) {
      for (const auto& e : blk) largest = std::max(largest, std::abs(e.value));
    }
    if (largest > 0.0) {
      direction_scale[k] = largest;
      for (auto& blk : problem.directions[k]) {
        for (auto& e : blk) e.value /= largest;
      }
    }
  }
  const int m = problem.num_parameters();
  const int nb = problem.num_blocks();

  MarginSolution sol;
  sol.theta = Eigen::VectorXd::Zero(m);
  if (m == 0) {
    sol.margin = min_eigenvalue(problem, sol.theta);
    sol.upper_bound = sol.margin;
    sol.converged = true;
    return sol;
  }

  const Operators ops(problem);
  Eigen::MatrixXd gram_matrix(m + 1, m + 1);
  for (int k = 0; k <= m; ++k) {
    gram_matrix.col(k) = ops.apply(ops.adjoint(Eigen::VectorXd::Unit(m + 1, k)));
  }
  const Eigen::LDLT<Eigen::MatrixXd> gram(gram_matrix);
  const Blocks& c = problem.constant;
  int total_dim = 0;
  for (const auto& blk : c) total_dim += static_cast<int>(blk.rows());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
  b[m] = 1.0;
  const double c_norm = frobenius(c);

  // Dual-feasible start theta = 0, t = lambda_min(F_0) - 1; primal X = I / n.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m + 1);
  y[m] = min_eigenvalue(problem, sol.theta) - 1.0;
  Blocks x, z;
  for (int k = 0; k < nb; ++k) {
    const auto n = c[k].rows();
    x.push_back(Eigen::MatrixXd::Identity(n, n) / total_dim);
  }
  {
    const Blocks aty = ops.adjoint(y);
    for (int k = 0; k < nb; ++k) z.push_back(c[k] - aty[k]);
  }

  auto certified = [&](const Eigen::VectorXd& yy) {
    return min_eigenvalue(problem, yy.head(m));
  };

  double best_lower = -kInfinity;
  Eigen::VectorXd best_theta = sol.theta;
  int stalled = 0;
  int flat = 0;

  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    sol.iterations = iter;
    const Eigen::VectorXd rp = b - ops.apply(x);
    Blocks rd;
    {
      const Blocks aty = ops.adjoint(y);
      for (int k = 0; k < nb; ++k) rd.push_back(c[k] - z[k] - aty[k]);
    }
    const double pobj = inner(c, x);
    const double dobj = y[m];
    const double mu = inner(x, z) / total_dim;
    sol.primal_residual = rp.norm();
    sol.dual_residual = frobenius(rd) / (1.0 + c_norm);
    sol.upper_bound = pobj;

    const double lower = certified(y);
    const double scale = 1.0 + std::abs(dobj);
    if (lower > best_lower + settings.gap_tolerance * scale) {
      flat = 0;
    } else {
      ++flat;
    }
    if (lower > best_lower) {
      best_lower = lower;
      best_theta = y.head(m);
    }
    if (std::abs(pobj - dobj) <= settings.gap_tolerance * scale &&
        sol.primal_residual <= settings.feasibility_tolerance) {
      break;
    }
    if (flat >= settings.patience && pobj - best_lower <= settings.accuracy * scale) break;

    Blocks zinv;
    bool ok = true;
    for (int k = 0; k < nb; ++k) {
      Eigen::LLT<Eigen::MatrixXd> llt(z[k]);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      zinv.push_back(llt.solve(Eigen::MatrixXd::Identity(z[k].rows(), z[k].cols())));
    }
    if (!ok) break;

    const Eigen::MatrixXd schur = ops.schur(x, zinv);
    Eigen::LDLT<Eigen::MatrixXd> factor(schur);
    if (factor.info() != Eigen::Success) break;

    Blocks x_rd_zinv;
    for (int k = 0; k < nb; ++k) x_rd_zinv.push_back(x[k] * rd[k] * zinv[k]);
    const Eigen::VectorXd a_x_rd_zinv = ops.apply(x_rd_zinv);

    // Solves for the direction whose complementarity target is `target`:
    // dX = target - sym(X dZ Zinv).
    auto solve = [&](const Blocks& target) {
      Direction d;
      d.dy = factor.solve(rp - ops.apply(target) + a_x_rd_zinv);
      const Blocks atdy = ops.adjoint(d.dy);
      for (int k = 0; k < nb; ++k) {
        d.dz.push_back(rd[k] - atdy[k]);
        d.dx.push_back(symmetrize(target[k] - x[k] * d.dz[k] * zinv[k]));
      }
      // The Schur solve loses accuracy as mu -> 0; restore A(dX) = rp by the
      // least-norm correction so the primal iterate stays on its affine set.
      const Blocks fix = ops.adjoint(gram.solve(rp - ops.apply(d.dx)));
      for (int k = 0; k < nb; ++k) d.dx[k] += fix[k];
      return d;
    };

    Blocks target;
    for (int k = 0; k < nb; ++k) target.push_back(-x[k]);
    const Direction pred = solve(target);
    const double ap = std::min(1.0, max_step(x, pred.dx));
    const double ad = std::min(1.0, max_step(z, pred.dz));
    double mu_aff = 0.0;
    {
      Blocks xa, za;
      for (int k = 0; k < nb; ++k) {
        xa.push_back(x[k] + ap * pred.dx[k]);
        za.push_back(z[k] + ad * pred.dz[k]);
      }
      mu_aff = inner(xa, za) / total_dim;
    }
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    for (int k = 0; k < nb; ++k) {
      target[k] = sigma * mu * zinv[k] - x[k] - pred.dx[k] * pred.dz[k] * zinv[k];
    }
    const Direction corr = solve(target);
    const double step_p = std::min(1.0, settings.step_fraction * max_step(x, corr.dx));
    const double step_d = std::min(1.0, settings.step_fraction * max_step(z, corr.dz));

    for (int k = 0; k < nb; ++k) {
      x[k] = symmetrize(x[k] + step_p * corr.dx[k]);
      z[k] = symmetrize(z[k] + step_d * corr.dz[k]);
    }
    y += step_d * corr.dy;

    stalled = (std::max(step_p, step_d) < 1e-8) ? stalled + 1 : 0;
    if (stalled >= 3) break;
  }

  const double lower = certified(y);
  if (lower > best_lower) {
    best_lower = lower;
    best_theta = y.head(m);
  }
  sol.theta = best_theta.cwiseQuotient(direction_scale);
  sol.margin = best_lower;
  sol.upper_bound = inner(c, x);

  const bool feasible = sol.primal_residual <= 1e3 * settings.feasibility_tolerance;
  sol.converged =
      feasible && sol.upper_bound - sol.margin <= settings.accuracy * (1.0 + std::abs(sol.margin));
  if (!sol.converged && settings.throw_on_stall) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "interior-point iterations stalled after " << sol.iterations
        << " steps: certified margin " << sol.margin << ", upper bound " << sol.upper_bound
        << ", primal residual " << sol.primal_residual;
    throw SolverStall(msg.str());
  }
  return sol;
}

}  // namespace cvbench::sdp
