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


#include "cvbench/analytic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cvbench/errors.hpp"

namespace cvbench {
namespace {

constexpr double kWitnessSlack = 1e-12;

bool entangled_after_channel(double eta, double nbar, const TwoModeCovariance& source) {
  return ppt_entangled(channel_on_covariance({eta, nbar}, source)).entangled;
}

}  // namespace

bool TwoModeCovariance::is_bona_fide(double tol) const {
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  const Eigen::Matrix4cd h =
      matrix.cast<Complex>() + Complex(0.0, 0.5) * symplectic_form().cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = omega(2, 3) = 1.0;
  omega(1, 0) = omega(3, 2) = -1.0;
  return omega;
}

TwoModeCovariance tmss_covariance(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw InvalidArgument("squeezing parameter must be finite and non-negative");
  }
  const double c = std::cosh(2.0 * r);
  const double s = std::sinh(2.0 * r);
  TwoModeCovariance cm;
  cm.matrix << c, 0, s, 0,
               0, c, 0, -s,
               s, 0, c, 0,
               0, -s, 0, c;
  cm.matrix *= 0.5;
  return cm;
}

TwoModeCovariance channel_on_covariance(const ChannelParams& ch, const TwoModeCovariance& cm) {
  ch.validate();
  const double t = std::sqrt(ch.eta);
  TwoModeCovariance out = cm;
  out.matrix.topRightCorner<2, 2>() *= t;
  out.matrix.bottomLeftCorner<2, 2>() *= t;
  out.matrix.bottomRightCorner<2, 2>() =
      ch.eta * cm.b_block() +
      (1.0 - ch.eta) * (kVacuumVariance + ch.nbar) * Eigen::Matrix2d::Identity();
  return out;
}

Eigen::Vector2d symplectic_eigenvalues(const TwoModeCovariance& cm) {
  // i Omega cm has eigenvalues +-nu_k.
  const Eigen::Matrix4cd m = Complex(0.0, 1.0) * (symplectic_form() * cm.matrix).cast<Complex>();
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> eig(m, false);
  std::array<double, 4> mags{};
  for (int k = 0; k < 4; ++k) mags[k] = std::abs(eig.eigenvalues()[k].real());
  std::sort(mags.begin(), mags.end());
  // Eigenvalues come in pairs; average each pair against rounding.
  return {0.5 * (mags[0] + mags[1]), 0.5 * (mags[2] + mags[3])};
}

TwoModeCovariance partial_transpose(const TwoModeCovariance& cm) {
  const Eigen::Vector4d flip(1.0, 1.0, 1.0, -1.0);
  TwoModeCovariance out;
  out.matrix = flip.asDiagonal() * cm.matrix * flip.asDiagonal();
  return out;
}

PptResult ppt_entangled(const TwoModeCovariance& cm) {
  if (!cm.is_bona_fide()) {
    throw PhysicalityError("covariance matrix violates the uncertainty relation");
  }
  PptResult res;
  res.witness = symplectic_eigenvalues(partial_transpose(cm))[0];
  res.entangled = res.witness < kVacuumVariance - kWitnessSlack;
  return res;
}

double covariance_noise_threshold(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw InvalidArgument("transmissivity must lie in [0, 1]");
  }
  if (eta == 1.0) return std::numeric_limits<double>::infinity();
  return eta / (1.0 - eta);
}

double covariance_noise_threshold_numeric(double eta, double r, double precision) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw InvalidArgument("transmissivity must lie in [0, 1]");
  }
  if (!(r > 0.0)) {
    throw InvalidArgument("bisection needs a squeezed (r > 0) source");
  }
  if (!(precision > 0.0)) {
    throw InvalidArgument("bisection precision must be positive");
  }
  if (eta == 1.0) return std::numeric_limits<double>::infinity();
  const TwoModeCovariance source = tmss_covariance(r);
  if (!entangled_after_channel(eta, 0.0, source)) return 0.0;

  double lo = 0.0;
  double hi = 1.0;
  while (entangled_after_channel(eta, hi, source)) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw BracketError("no separable noise level found");
    }
  }
  while (hi - lo > precision) {
    const double mid = 0.5 * (lo + hi);
    (entangled_after_channel(eta, mid, source) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double gaussian_fidelity_bound(double lambda, double eta) {
  if (!(lambda >= 0.0)) {
    throw InvalidArgument("lambda must be non-negative");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw InvalidArgument("transmissivity must lie in [0, 1]");
  }
  if (std::isinf(lambda)) return 1.0;
  return (1.0 + lambda) / (1.0 + lambda + eta);
}

double excess_variance(const ChannelParams& ch) {
  ch.validate();
  return (1.0 - ch.eta) * ch.nbar;
}

}  // namespace cvbench
