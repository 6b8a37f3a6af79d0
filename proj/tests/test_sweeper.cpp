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


#include <gtest/gtest.h>

#include <cmath>

#include "cvbench/analytic.hpp"
#include "cvbench/errors.hpp"
#include "cvbench/sweeper.hpp"

namespace cvbench {
namespace {

SweepConfig evm_config(std::vector<double> grid, int n = 3, double alpha = 0.01) {
  SweepConfig cfg;
  cfg.eta_grid = std::move(grid);
  cfg.n_states = n;
  cfg.alpha = alpha;
  cfg.criteria = {Criterion::kEvm};
  cfg.bisection.precision = 1e-2;
  return cfg;
}

TEST(SweepConfig, Validation) {
  SweepConfig cfg = evm_config({0.5});
  EXPECT_NO_THROW(cfg.validate());
  cfg.eta_grid = {1.0};
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = evm_config({0.5});
  cfg.n_states = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = evm_config({0.5});
  cfg.tol = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = evm_config({0.5});
  cfg.bisection.upper = -1.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(CriterionLabel, Names) {
  SweepConfig cfg = evm_config({}, 3, 0.01);
  EXPECT_EQ(criterion_label(Criterion::kEvm, cfg), "evm_n3_a0.01");
  EXPECT_EQ(criterion_label(Criterion::kCovariance, cfg), "covariance");
  cfg.moment_mode = MomentMode::kHomodyneOnly;
  EXPECT_EQ(criterion_label(Criterion::kEvm, cfg), "evm_n3_a0.01_homodyne");
}

TEST(EvmThreshold, ZeroTransmissivity) {
  EXPECT_EQ(evm_noise_threshold(0.0, evm_config({})), 0.0);
}

TEST(EvmThreshold, BracketStraddlesTheFlip) {
  const SweepConfig cfg = evm_config({});
  const ThresholdBracket b = evm_noise_bracket(0.5, cfg);
  EXPECT_LT(b.entangled, b.compatible);
  EXPECT_LE(b.compatible - b.entangled, cfg.bisection.precision);
  EXPECT_EQ(classify(channel_evm({0.5, b.entangled}, cfg)).status, VerdictStatus::kEntangled);
  EXPECT_EQ(classify(channel_evm({0.5, b.compatible}, cfg)).status, VerdictStatus::kCompatible);
  EXPECT_GT(b.evaluations, 0);
}

TEST(EvmThreshold, SmallUpperEndThrows) {
  SweepConfig cfg = evm_config({});
  cfg.bisection.upper = 0.05;
  EXPECT_THROW(evm_noise_bracket(0.5, cfg), BracketError);
}

TEST(EvmThreshold, HomodyneDataIsWeaker) {
  SweepConfig full = evm_config({}, 3, 0.3);
  SweepConfig homodyne = full;
  homodyne.moment_mode = MomentMode::kHomodyneOnly;
  EXPECT_LE(evm_noise_threshold(0.5, homodyne),
            evm_noise_threshold(0.5, full) + full.bisection.precision);
}

TEST(EvmThreshold, TwoStatesBelowThree) {
  EXPECT_LT(evm_noise_threshold(0.5, evm_config({}, 2, 0.1)),
            evm_noise_threshold(0.5, evm_config({}, 3, 0.01)));
}

TEST(EvmThreshold, PhaseCovariantAssemblyMatchesDirect) {
  SweepConfig direct = evm_config({});
  SweepConfig covariant = direct;
  covariant.assembly = Assembly::kPhaseCovariant;
  EXPECT_NEAR(evm_noise_threshold(0.5, covariant), evm_noise_threshold(0.5, direct),
              direct.bisection.precision);
}

TEST(Sweep, CovarianceCurve) {
  SweepConfig cfg;
  cfg.eta_grid = {0.25, 0.5, 0.75};
  cfg.criteria = {Criterion::kCovariance};
  const auto curves = sweep_criteria(cfg);
  ASSERT_EQ(curves.size(), 1u);
  EXPECT_EQ(curves[0].criterion, "covariance");
  ASSERT_EQ(curves[0].points.size(), 3u);
  EXPECT_NEAR(curves[0].points[0].nbar_threshold, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(curves[0].points[1].nbar_threshold, 1.0, 1e-12);
  EXPECT_NEAR(curves[0].points[2].nbar_threshold, 3.0, 1e-12);
  EXPECT_NEAR(curves[0].points[1].excess_variance, 0.5, 1e-12);
}

TEST(Sweep, EmptyGrid) {
  SweepConfig cfg;
  const auto curves = sweep_criteria(cfg);
  ASSERT_EQ(curves.size(), 2u);
  EXPECT_TRUE(curves[0].points.empty());
  EXPECT_TRUE(curves[1].points.empty());
}

TEST(Sweep, FailingPointDoesNotAbort) {
  SweepConfig cfg = evm_config({0.0, 0.5});
  cfg.bisection.upper = 0.05;
  const auto curves = sweep_criteria(cfg);
  ASSERT_EQ(curves[0].points.size(), 2u);
  EXPECT_FALSE(curves[0].points[0].error.has_value());
  EXPECT_EQ(curves[0].points[0].nbar_threshold, 0.0);
  ASSERT_TRUE(curves[0].points[1].error.has_value());
  EXPECT_TRUE(std::isnan(curves[0].points[1].nbar_threshold));
}

TEST(Sweep, MonotonicInTransmissivity) {
  const auto curves = sweep_criteria(evm_config({0.2, 0.4, 0.6}));
  const auto& pts = curves[0].points;
  ASSERT_EQ(pts.size(), 3u);
  for (size_t k = 1; k < pts.size(); ++k) {
    EXPECT_GT(pts[k].nbar_threshold, pts[k - 1].nbar_threshold);
    EXPECT_GT(pts[k].eta, pts[k - 1].eta);
  }
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  SweepConfig one = evm_config({0.3, 0.5, 0.7});
  one.threads = 1;
  SweepConfig many = one;
  many.threads = 4;
  const auto a = sweep_criteria(one);
  const auto b = sweep_criteria(many);
  ASSERT_EQ(a.size(), b.size());
  for (size_t k = 0; k < a[0].points.size(); ++k) {
    EXPECT_EQ(a[0].points[k].nbar_threshold, b[0].points[k].nbar_threshold);
  }
  EXPECT_EQ(sweep_criteria(one)[0].points, a[0].points);
}

TEST(AlphaDependence, ShapeAndLabels) {
  const std::vector<int> ns{2};
  const std::vector<double> alphas{0.1, 0.5};
  SweepConfig base = evm_config({});
  const auto curves = alpha_dependence(0.5, ns, alphas, base);
  ASSERT_EQ(curves.size(), 1u);
  EXPECT_EQ(curves[0].criterion, "evm_n2");
  ASSERT_EQ(curves[0].points.size(), 2u);
  EXPECT_EQ(curves[0].points[1].alpha, 0.5);
  const BestAlpha best = best_alpha_threshold(0.5, alphas, evm_config({}, 2));
  EXPECT_EQ(best.nbar_threshold,
            std::max(curves[0].points[0].nbar_threshold, curves[0].points[1].nbar_threshold));
}

TEST(AlphaDependence, CoarseGrid) {
  const auto g = coarse_alpha_grid();
  ASSERT_EQ(g.size(), 15u);
  EXPECT_NEAR(g.front(), 0.1, 1e-12);
  EXPECT_NEAR(g.back(), 1.5, 1e-12);
}

}  // namespace
}  // namespace cvbench
