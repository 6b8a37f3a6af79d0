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

#include "cvbench/channel_models.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "cvbench/errors.hpp"

namespace cvbench {
namespace {

constexpr double kMinRetainedTrace = 1.0 - 1e-6;

// Beam-splitter unitary restricted to the subspace with `total` photons,
// basis |m, total - m>, m = photons in the signal mode.
Eigen::MatrixXd beam_splitter_block(int total, double theta) {
  const int dim = total + 1;
  Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(dim, dim);
  for (int m = 0; m < total; ++m) {
    // a^dag b |m, total-m> = sqrt((m+1)(total-m)) |m+1, total-m-1>
    const double amp = std::sqrt(static_cast<double>(m + 1) * (total - m));
    generator(m + 1, m) = amp;
    generator(m, m + 1) = -amp;
  }
  return (theta * generator).exp();
}

MomentSet moments_from_ladder(Complex a, Complex a2, double number) {
  MomentSet m;
  m.mean_x = std::sqrt(2.0) * a.real();
  m.mean_p = std::sqrt(2.0) * a.imag();
  m.var_x = (2.0 * a2.real() + 2.0 * number + 1.0) / 2.0 - m.mean_x * m.mean_x;
  m.var_p = (2.0 * number + 1.0 - 2.0 * a2.real()) / 2.0 - m.mean_p * m.mean_p;
  m.cross_re = a2.imag();
  return m;
}

}  // namespace

void ChannelParams::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0) || !(nbar >= 0.0) || !std::isfinite(nbar)) {
    std::ostringstream msg;
    msg << "invalid channel parameters: eta=" << eta << ", nbar=" << nbar;
    throw InvalidArgument(msg.str());
  }
}

void MPParams::validate() const {
  if (!(gain >= 0.0) || !std::isfinite(gain)) {
    throw InvalidArgument("measure-and-prepare gain must be non-negative");
  }
}

bool MomentSet::is_physical(double tol) const {
  return var_x > 0.0 && var_p > 0.0 && var_x * var_p >= 0.25 - tol;
}

MomentSet MomentSet::without_cross() const {
  MomentSet copy = *this;
  copy.cross_re.reset();
  return copy;
}

MomentSet apply_loss_noise(const ChannelParams& ch, Complex alpha) {
  ch.validate();
  MomentSet m;
  const double amplitude = std::sqrt(2.0 * ch.eta);
  m.mean_x = amplitude * alpha.real();
  m.mean_p = amplitude * alpha.imag();
  m.var_x = kVacuumVariance + (1.0 - ch.eta) * ch.nbar;
  m.var_p = m.var_x;
  m.cross_re = m.mean_x * m.mean_p;
  return m;
}

int recommended_fock_cutoff(const ChannelParams& ch, Complex alpha) {
  const double load = std::max(std::norm(alpha), ch.nbar);
  return static_cast<int>(std::ceil(10.0 * load)) + 20;
}

FockOracleResult fock_oracle_moments(const ChannelParams& ch, Complex alpha, int cutoff) {
  ch.validate();
  if (cutoff < 1) {
    throw InvalidArgument("Fock cutoff must be positive");
  }
  const int dim = cutoff + 1;
  const double theta = std::acos(std::sqrt(ch.eta));

  std::vector<Complex> coherent(dim);
  coherent[0] = std::exp(-std::norm(alpha) / 2.0);
  for (int n = 1; n < dim; ++n) {
    coherent[n] = coherent[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  }

  std::vector<double> thermal(dim);
  const double ratio = ch.nbar / (ch.nbar + 1.0);
  thermal[0] = 1.0 / (ch.nbar + 1.0);
  for (int k = 1; k < dim; ++k) {
    thermal[k] = thermal[k - 1] * ratio;
  }

  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(dim);
  for (int total = 0; total <= cutoff; ++total) {
    blocks.push_back(beam_splitter_block(total, theta));
  }

  // rho[m, m'] = sum_k p_k sum_b Psi_k(m, b) conj(Psi_k(m', b)), where
  // Psi_k(m, b) = c_{m+b-k} U_{m+b}[m, m+b-k].
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::VectorXcd column(dim);
  for (int k = 0; k < dim; ++k) {
    if (thermal[k] == 0.0) continue;
    for (int b = 0; b < dim; ++b) {
      column.setZero();
      for (int m = 0; m + b <= cutoff; ++m) {
        const int total = m + b;
        const int n_in = total - k;
        if (n_in < 0) continue;
        column[m] = coherent[n_in] * blocks[total](m, n_in);
      }
      rho.noalias() += thermal[k] * column * column.adjoint();
    }
  }

  FockOracleResult result;
  result.trace = rho.trace().real();
  if (result.trace < kMinRetainedTrace) {
    std::ostringstream msg;
    msg << "Fock cutoff " << cutoff << " retains trace " << result.trace
        << " (< 1 - 1e-6); increase the cutoff";
    throw TruncationError(msg.str());
  }

  Complex a{0.0}, a2{0.0};
  double number = 0.0;
  for (int m = 0; m < dim; ++m) {
    number += m * rho(m, m).real();
    if (m >= 1) a += std::sqrt(static_cast<double>(m)) * rho(m, m - 1);
    if (m >= 2) a2 += std::sqrt(static_cast<double>(m) * (m - 1)) * rho(m, m - 2);
  }
  result.moments = moments_from_ladder(a / result.trace, a2 / result.trace,
                                       number / result.trace);
  return result;
}

MomentSet mp_channel_moments(const MPParams& mp, Complex alpha) {
  mp.validate();
  // The heterodyne outcome of |alpha> is complex Gaussian around alpha with
  // variance 1/2 per component; the re-prepared |g beta> therefore carries
  // g^2 on top of its own vacuum variance.
  MomentSet m;
  m.mean_x = mp.gain * std::sqrt(2.0) * alpha.real();
  m.mean_p = mp.gain * std::sqrt(2.0) * alpha.imag();
  m.var_x = kVacuumVariance + mp.gain * mp.gain;
  m.var_p = m.var_x;
  m.cross_re = m.mean_x * m.mean_p;
  return m;
}

}  // namespace cvbench
