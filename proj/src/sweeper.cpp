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


#include "cvbench/sweeper.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "cvbench/analytic.hpp"
#include "cvbench/errors.hpp"

namespace cvbench {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs task(k) for k in [0, count) on a small pool; each slot is written by
// exactly one worker, so the output order is fixed.
template <typename Task>
void parallel_for(std::size_t count, unsigned threads, Task task) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) task(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) task(k);
    });
  }
}

bool is_entangled(double eta, double nbar, const SweepConfig& cfg) {
  const Verdict v = classify(channel_evm({eta, nbar}, cfg), cfg.tol);
  if (v.status == VerdictStatus::kUnphysical) {
    std::ostringstream msg;
    msg << "channel EVM classified UNPHYSICAL at eta=" << eta << ", nbar=" << nbar;
    throw PhysicalityError(msg.str());
  }
  return v.status == VerdictStatus::kEntangled;
}

ThresholdPoint failed_point(double eta, const std::exception& e) {
  ThresholdPoint p;
  p.eta = eta;
  p.nbar_threshold = kNaN;
  p.excess_variance = kNaN;
  p.error = e.what();
  return p;
}

ThresholdPoint evm_point(double eta, const SweepConfig& cfg) {
  try {
    ThresholdPoint p;
    p.eta = eta;
    p.nbar_threshold = evm_noise_threshold(eta, cfg);
    p.excess_variance = excess_variance({eta, p.nbar_threshold});
    return p;
  } catch (const Error& e) {
    return failed_point(eta, e);
  }
}

ThresholdPoint covariance_point(double eta) {
  try {
    ThresholdPoint p;
    p.eta = eta;
    p.nbar_threshold = covariance_noise_threshold(eta);
    p.excess_variance = excess_variance({eta, p.nbar_threshold});
    return p;
  } catch (const Error& e) {
    return failed_point(eta, e);
  }
}

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

void SweepConfig::validate() const {
  for (double eta : eta_grid) {
    if (!(eta >= 0.0 && eta < 1.0)) {
      throw InvalidArgument("grid transmissivities must lie in [0, 1)");
    }
  }
  if (n_states < 1) {
    throw InvalidArgument("an ensemble needs at least one state");
  }
  if (!std::isfinite(alpha)) {
    throw InvalidArgument("amplitude must be finite");
  }
  if (!(tol > 0.0)) {
    throw InvalidArgument("verdict tolerance must be positive");
  }
  if (!(bisection.precision > 0.0)) {
    throw InvalidArgument("bisection precision must be positive");
  }
  if (!(bisection.lower >= 0.0)) {
    throw InvalidArgument("bisection lower end must be non-negative");
  }
  if (bisection.upper && !(*bisection.upper > bisection.lower)) {
    throw InvalidArgument("bisection upper end must exceed the lower end");
  }
}

std::string criterion_label(Criterion c, const SweepConfig& cfg) {
  if (c == Criterion::kCovariance) return "covariance";
  std::string label = "evm_n" + std::to_string(cfg.n_states) + "_a" + format_number(cfg.alpha);
  if (cfg.moment_mode == MomentMode::kHomodyneOnly) label += "_homodyne";
  return label;
}

PartialEvm channel_evm(const ChannelParams& ch, const SweepConfig& cfg) {
  const InputEnsemble ens = InputEnsemble::equally_spaced(cfg.alpha, cfg.n_states);
  auto measured = [&](Complex amplitude) {
    const MomentSet m = apply_loss_noise(ch, amplitude);
    return cfg.moment_mode == MomentMode::kHomodyneOnly ? m.without_cross() : m;
  };
  if (cfg.assembly == Assembly::kPhaseCovariant) {
    return assemble_phase_covariant(build_local_block(measured(cfg.alpha), 1.0), ens);
  }
  std::vector<MomentSet> moments;
  moments.reserve(static_cast<std::size_t>(ens.n_states()));
  for (int j = 0; j < ens.n_states(); ++j) moments.push_back(measured(ens.amplitude(j)));
  return assemble_partial_evm(ens, moments);
}

ThresholdBracket evm_noise_bracket(double eta, const SweepConfig& cfg) {
  cfg.validate();
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw InvalidArgument("transmissivity must lie in [0, 1)");
  }
  const double upper = cfg.bisection.upper.value_or(2.0 * eta / (1.0 - eta) + 1.0);
  ThresholdBracket b;
  b.entangled = cfg.bisection.lower;
  b.compatible = upper;
  if (eta == 0.0 || !is_entangled(eta, b.entangled, cfg)) {
    b.compatible = b.entangled;
    b.evaluations = eta == 0.0 ? 0 : 1;
    return b;
  }
  b.evaluations = 2;
  if (is_entangled(eta, upper, cfg)) {
    std::ostringstream msg;
    msg << "still ENTANGLED at the upper bracket end nbar=" << upper << " (eta=" << eta << ")";
    throw BracketError(msg.str());
  }
  while (b.compatible - b.entangled > cfg.bisection.precision) {
    const double mid = 0.5 * (b.entangled + b.compatible);
    (is_entangled(eta, mid, cfg) ? b.entangled : b.compatible) = mid;
    ++b.evaluations;
  }
  return b;
}

double evm_noise_threshold(double eta, const SweepConfig& cfg) {
  return evm_noise_bracket(eta, cfg).threshold();
}

std::vector<ThresholdCurve> sweep_criteria(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<ThresholdCurve> curves;
  for (Criterion c : cfg.criteria) {
    ThresholdCurve curve;
    curve.criterion = criterion_label(c, cfg);
    curve.config = cfg;
    curve.points.resize(cfg.eta_grid.size());
    parallel_for(cfg.eta_grid.size(), cfg.threads, [&](std::size_t k) {
      const double eta = cfg.eta_grid[k];
      curve.points[k] = c == Criterion::kEvm ? evm_point(eta, cfg) : covariance_point(eta);
    });
    std::stable_sort(curve.points.begin(), curve.points.end(),
                     [](const ThresholdPoint& a, const ThresholdPoint& b) { return a.eta < b.eta; });
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<ThresholdCurve> alpha_dependence(double eta, std::span<const int> n_list,
                                             std::span<const double> alpha_grid,
                                             const SweepConfig& base) {
  for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
    if (!(alpha_grid[k] > 0.0) || (k > 0 && !(alpha_grid[k] > alpha_grid[k - 1]))) {
      throw InvalidArgument("amplitude grid must be positive and ascending");
    }
  }
  std::vector<ThresholdCurve> curves;
  for (int n : n_list) {
    SweepConfig cfg = base;
    cfg.n_states = n;
    cfg.eta_grid = {eta};
    cfg.criteria = {Criterion::kEvm};
    cfg.validate();
    ThresholdCurve curve;
    curve.criterion = "evm_n" + std::to_string(n);
    curve.config = cfg;
    curve.points.resize(alpha_grid.size());
    parallel_for(alpha_grid.size(), cfg.threads, [&](std::size_t k) {
      SweepConfig point_cfg = cfg;
      point_cfg.alpha = alpha_grid[k];
      ThresholdPoint p = evm_point(eta, point_cfg);
      p.alpha = alpha_grid[k];
      curve.points[k] = std::move(p);
    });
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<double> coarse_alpha_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 15; ++k) grid.push_back(0.1 * k);
  return grid;
}

BestAlpha best_alpha_threshold(double eta, std::span<const double> alpha_grid,
                               const SweepConfig& base) {
  const int n = base.n_states;
  const auto curves = alpha_dependence(eta, std::span<const int>(&n, 1), alpha_grid, base);
  BestAlpha best;
  best.nbar_threshold = -std::numeric_limits<double>::infinity();
  for (const auto& p : curves.front().points) {
    if (p.error) throw BracketError(*p.error);
    if (p.nbar_threshold > best.nbar_threshold) {
      best.nbar_threshold = p.nbar_threshold;
      best.alpha = *p.alpha;
    }
  }
  return best;
}

}  // namespace cvbench
