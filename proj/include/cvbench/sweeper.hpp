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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvbench/channel_models.hpp"
#include "cvbench/evm.hpp"
#include "cvbench/feasibility.hpp"

namespace cvbench {

enum class MomentMode {
  kHomodyneOnly,  // symmetrized cross moment left free
  kFullMoments,
};

enum class Assembly { kDirect, kPhaseCovariant };

enum class Criterion { kEvm, kCovariance };

struct BisectionSettings {
  double lower = 0.0;
  // Default upper end: 2 eta / (1 - eta) + 1.
  std::optional<double> upper;
  double precision = 1e-3;

  bool operator==(const BisectionSettings&) const = default;
};

struct SweepConfig {
  std::vector<double> eta_grid;
  int n_states = 3;
  double alpha = 0.01;
  MomentMode moment_mode = MomentMode::kFullMoments;
  Assembly assembly = Assembly::kDirect;
  double tol = kDefaultVerdictTolerance;
  BisectionSettings bisection;
  std::vector<Criterion> criteria{Criterion::kEvm, Criterion::kCovariance};
  // 0 = one worker per hardware thread.
  unsigned threads = 0;

  /// Throws InvalidArgument for grid values outside [0, 1), N < 1,
  /// non-positive tol or precision, or an inverted bracket.
  void validate() const;

  bool operator==(const SweepConfig&) const = default;
};

struct ThresholdPoint {
  double eta = 0.0;
  double nbar_threshold = 0.0;
  double excess_variance = 0.0;
  // Set by alpha scans.
  std::optional<double> alpha;
  // Per-point failure; the numbers are NaN when set.
  std::optional<std::string> error;

  bool operator==(const ThresholdPoint&) const = default;
};

struct ThresholdCurve {
  std::string criterion;
  std::vector<ThresholdPoint> points;
  SweepConfig config;

  bool operator==(const ThresholdCurve&) const = default;
};

std::string criterion_label(Criterion c, const SweepConfig& cfg);

/// EVM for the ensemble of `cfg` sent through the loss + noise channel.
PartialEvm channel_evm(const ChannelParams& ch, const SweepConfig& cfg);

/// Noise levels straddling the ENTANGLED -> COMPATIBLE flip.
struct ThresholdBracket {
  double entangled = 0.0;   // largest nbar known to classify ENTANGLED
  double compatible = 0.0;  // smallest nbar known to classify COMPATIBLE
  int evaluations = 0;
  double threshold() const { return 0.5 * (entangled + compatible); }
};

/// Bisection on nbar. When the lower end already classifies COMPATIBLE the
/// bracket collapses onto it (threshold = lower end). Throws BracketError if
/// the upper end is still ENTANGLED, PhysicalityError if a channel EVM comes
/// out UNPHYSICAL.
ThresholdBracket evm_noise_bracket(double eta, const SweepConfig& cfg);

/// Midpoint of evm_noise_bracket; 0 for eta = 0.
double evm_noise_threshold(double eta, const SweepConfig& cfg);

/// One curve per enabled criterion, points in grid order. Errors are stored
/// in the failing point; the rest of the sweep continues.
std::vector<ThresholdCurve> sweep_criteria(const SweepConfig& cfg);

/// EVM thresholds at fixed eta for every N and alpha; curve k belongs to
/// n_list[k] and its points follow alpha_grid. Other settings come from `base`.
std::vector<ThresholdCurve> alpha_dependence(double eta, std::span<const int> n_list,
                                             std::span<const double> alpha_grid,
                                             const SweepConfig& base = {});

/// Amplitudes 0.1, 0.2, ..., 1.5.
std::vector<double> coarse_alpha_grid();

/// Largest EVM threshold over `alpha_grid` and the amplitude attaining it.
struct BestAlpha {
  double alpha = 0.0;
  double nbar_threshold = 0.0;
};
BestAlpha best_alpha_threshold(double eta, std::span<const double> alpha_grid,
                               const SweepConfig& base);

}  // namespace cvbench
