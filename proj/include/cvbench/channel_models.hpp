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

#include <complex>
#include <optional>

namespace cvbench {

using Complex = std::complex<double>;

// Quadratures follow x = (a^dag + a)/sqrt(2), p = i(a^dag - a)/sqrt(2), so
// [x, p] = i and the vacuum has variance 1/2 in each quadrature. Every
// variance in this library uses that convention.
inline constexpr double kVacuumVariance = 0.5;

/// Loss + thermal-noise channel: the signal passes a beam splitter of
/// transmissivity `eta` whose second port carries a thermal state with mean
/// photon number `nbar`.
struct ChannelParams {
  double eta = 1.0;
  double nbar = 0.0;

  /// Throws InvalidArgument unless 0 <= eta <= 1 and nbar >= 0.
  void validate() const;
};

/// First and second quadrature moments of one single-mode output state.
struct MomentSet {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = kVacuumVariance;
  double var_p = kVacuumVariance;
  // Re<x p>, i.e. the symmetrized moment <(xp + px)/2>. Homodyne detection
  // along x and p does not measure it, so it may be unknown.
  std::optional<double> cross_re = 0.0;
  // Im<x p>; pinned to 1/2 by the commutator.
  double cross_im = 0.5;

  /// var_x * var_p >= 1/4 - tol (and both variances positive).
  bool is_physical(double tol = 1e-9) const;

  /// Copy with the symmetrized cross moment marked unknown.
  MomentSet without_cross() const;

  bool operator==(const MomentSet&) const = default;
};

/// Heterodyne-and-reprepare channel: measure both quadratures of the input,
/// obtain a complex outcome beta and emit the coherent state |gain * beta>.
struct MPParams {
  double gain = 0.0;

  void validate() const;
};

/// Output moments of the loss + noise channel for coherent input |alpha>.
MomentSet apply_loss_noise(const ChannelParams& ch, Complex alpha);

/// Result of the brute-force Fock-space evaluation.
struct FockOracleResult {
  MomentSet moments;
  double trace = 1.0;  // trace of the truncated output density matrix
  double trace_deficit() const { return 1.0 - trace; }
};

/// Smallest cutoff recommended for the Fock oracle:
/// 10 * max(|alpha|^2, nbar) + 20.
int recommended_fock_cutoff(const ChannelParams& ch, Complex alpha);

/// Independent oracle for apply_loss_noise. Builds |alpha><alpha| (x) thermal
/// in the two-mode number basis truncated at total photon number `cutoff`,
/// applies the beam-splitter unitary block by block, traces out the ancilla
/// and reads the moments off the reduced density matrix.
///
/// Throws TruncationError when the retained trace is below 1 - 1e-6.
FockOracleResult fock_oracle_moments(const ChannelParams& ch, Complex alpha, int cutoff);

/// Output moments of the heterodyne/re-prepare channel (analytic Gaussian
/// convolution of the heterodyne outcome distribution).
MomentSet mp_channel_moments(const MPParams& mp, Complex alpha);

}  // namespace cvbench
