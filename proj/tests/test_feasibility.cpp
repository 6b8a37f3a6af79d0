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
#include <random>

#include "cvbench/channel_models.hpp"
#include "cvbench/errors.hpp"
#include "cvbench/evm.hpp"
#include "cvbench/feasibility.hpp"
#include "maximize_oracle.hpp"

namespace cvbench {
namespace {

PartialEvm channel_evm(double eta, double nbar, double alpha, int n, bool homodyne = false) {
  const InputEnsemble ens = InputEnsemble::equally_spaced(alpha, n);
  std::vector<MomentSet> m;
  for (int j = 0; j < n; ++j) {
    const MomentSet s = apply_loss_noise({eta, nbar}, ens.amplitude(j));
    m.push_back(homodyne ? s.without_cross() : s);
  }
  return assemble_partial_evm(ens, m);
}

// Swaps 3x3 blocks (i, j) <-> (j, i).
Eigen::MatrixXcd swap_blocks(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows() / 3);
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.block(3 * i, 3 * j, 3, 3) = m.block(3 * j, 3 * i, 3, 3);
  }
  return out;
}

TEST(Realify, Examples) {
  EXPECT_EQ(realify(Eigen::MatrixXcd::Identity(3, 3)), Eigen::MatrixXd::Identity(6, 6));
  Eigen::Matrix2cd h;
  h << 0, Complex(0, 1), Complex(0, -1), 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(realify(h));
  EXPECT_NEAR(eig.eigenvalues()[0], -1.0, 1e-14);
  EXPECT_NEAR(eig.eigenvalues()[1], -1.0, 1e-14);
  EXPECT_NEAR(eig.eigenvalues()[2], 1.0, 1e-14);
  EXPECT_NEAR(eig.eigenvalues()[3], 1.0, 1e-14);
}

TEST(Realify, PreservesSmallestEigenvalue) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 6;
    Eigen::MatrixXcd a(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) a(r, c) = Complex(g(rng), g(rng));
    }
    const Eigen::MatrixXcd h = a + a.adjoint();
    EXPECT_NEAR(oracle::min_eig(realify(h)), oracle::min_eig(h), 1e-10);
  }
}

TEST(Realify, RejectsNonHermitian) {
  Eigen::Matrix2cd h;
  h << 1, 2, 3, 1;
  EXPECT_THROW(realify(h), InvalidArgument);
  EXPECT_THROW(realify(Eigen::MatrixXcd::Zero(2, 3)), InvalidArgument);
}

TEST(MaxMargin, FullySpecifiedMatrix) {
  PartialEvm evm(1);
  LocalBlock b = build_local_block(apply_loss_noise({0.5, 0.3}, 0.4), 1.0);
  evm.set_diagonal_block(0, b);
  ASSERT_EQ(evm.num_parameters(), 0);
  const FeasibilityReport r = max_margin({&evm, ConstraintSet::kPhysicalOnly});
  EXPECT_NEAR(r.margin, oracle::min_eig(Eigen::MatrixXcd(b.entries)), 1e-12);
}

// A single unknown complex entry: two real parameters, solved by nested line search.
TEST(MaxMargin, MatchesLineSearchWithTwoParameters) {
  const PartialEvm full = channel_evm(0.6, 0.4, 0.7, 2);
  // Fix every entry to a completion, then free one off-diagonal pair.
  const Eigen::MatrixXcd completion = full.complete(reference_completion(full));
  PartialEvm evm(2);
  for (int r = 0; r < 6; ++r) {
    for (int c = r; c < 6; ++c) evm.set_fixed(r, c, completion(r, c));
  }
  evm.set_free(1, 4);
  ASSERT_EQ(evm.num_parameters(), 2);

  auto build = [&](double re, double im) {
    Eigen::MatrixXcd m = completion;
    m(1, 4) = Complex(re, im);
    m(4, 1) = Complex(re, -im);
    return m;
  };
  for (const auto cs : {ConstraintSet::kPhysicalOnly, ConstraintSet::kPhysicalAndPpt}) {
    auto f = [&](double re, double im) {
      const Eigen::MatrixXcd m = build(re, im);
      double v = oracle::min_eig(m);
      if (cs == ConstraintSet::kPhysicalAndPpt) v = std::min(v, oracle::min_eig(swap_blocks(m)));
      return v;
    };
    const double expected = oracle::concave_maximize(f, 1.0);
    const FeasibilityReport r = max_margin({&evm, cs, Normalization::kRaw});
    EXPECT_NEAR(r.margin, expected, 1e-5);
  }
}

TEST(MaxMargin, HomodyneBlockDirectionMatchesScan) {
  // One diagonal block with an unknown cross moment: one real parameter.
  PartialEvm evm(1);
  evm.set_diagonal_block(0, build_local_block(apply_loss_noise({0.5, 0.3}, 0.4).without_cross(), 1.0));
  ASSERT_EQ(evm.num_parameters(), 1);
  const Eigen::Matrix3cd base = evm.block(0, 0);
  const Eigen::Matrix3d dir = *evm.block_direction(0);
  auto f = [&](double x) { return oracle::min_eig(Eigen::MatrixXcd(base + x * dir.cast<Complex>())); };
  const double expected = oracle::ternary_maximize(f, -2.0, 2.0);
  EXPECT_NEAR(max_margin({&evm, ConstraintSet::kPhysicalOnly}).margin, expected, 1e-5);
}

TEST(MaxMargin, OptimizerAttainsReportedMargin) {
  for (const auto norm : {Normalization::kRaw, Normalization::kWhitened}) {
    for (double nbar : {0.2, 1.5}) {
      const PartialEvm evm = channel_evm(0.5, nbar, 0.3, 3, true);
      const FeasibilityProblem p{&evm, ConstraintSet::kPhysicalAndPpt, norm};
      const FeasibilityReport r = max_margin(p);
      EXPECT_GE(margin_at(p, r.optimizer), r.margin - 1e-7);
      EXPECT_LE(r.margin, r.diagnostics.upper_bound + 1e-7);
    }
  }
}

TEST(MaxMargin, UnfixingEntriesNeverLowersMargin) {
  const PartialEvm full = channel_evm(0.5, 0.5, 0.5, 2);
  const Eigen::MatrixXcd completion = full.complete(reference_completion(full));
  PartialEvm fixed(2);
  for (int r = 0; r < 6; ++r) {
    for (int c = r; c < 6; ++c) fixed.set_fixed(r, c, completion(r, c));
  }
  PartialEvm one = fixed;
  one.set_free(1, 4);
  PartialEvm two = one;
  two.set_free(2, 5);
  const auto cs = ConstraintSet::kPhysicalAndPpt;
  const double t0 = max_margin({&fixed, cs}).margin;
  const double t1 = max_margin({&one, cs}).margin;
  const double t2 = max_margin({&two, cs}).margin;
  EXPECT_GE(t1, t0 - 1e-9);
  EXPECT_GE(t2, t1 - 1e-9);
}

TEST(MaxMargin, ScalesLinearlyWithFixedEntries) {
  const PartialEvm evm = channel_evm(0.5, 0.3, 0.4, 3);
  const double base = max_margin({&evm, ConstraintSet::kPhysicalAndPpt}).margin;
  for (double c : {0.5, 3.0}) {
    const PartialEvm scaled = evm.scaled(c);
    EXPECT_NEAR(max_margin({&scaled, ConstraintSet::kPhysicalAndPpt}).margin, c * base, 1e-8);
    EXPECT_EQ(classify(scaled).status, classify(evm).status);
  }
}

TEST(MaxMargin, PptNeverExceedsPhysicalMargin) {
  for (double nbar : {0.0, 0.5, 2.0}) {
    const PartialEvm evm = channel_evm(0.7, nbar, 0.5, 3);
    for (const auto norm : {Normalization::kRaw, Normalization::kWhitened}) {
      const double phys = max_margin({&evm, ConstraintSet::kPhysicalOnly, norm}).margin;
      const double ppt = max_margin({&evm, ConstraintSet::kPhysicalAndPpt, norm}).margin;
      EXPECT_GE(phys, ppt - 1e-9);
    }
  }
}

TEST(MaxMargin, IsDeterministic) {
  const PartialEvm evm = channel_evm(0.5, 0.6, 0.01, 3);
  const FeasibilityProblem p{&evm, ConstraintSet::kPhysicalAndPpt, Normalization::kWhitened};
  const FeasibilityReport a = max_margin(p);
  const FeasibilityReport b = max_margin(p);
  EXPECT_LT(std::abs(a.margin - b.margin), 1e-9);
}

TEST(MaxMargin, WhiteningKeepsTheSign) {
  for (double nbar : {0.1, 0.5, 1.5, 3.0}) {
    const PartialEvm evm = channel_evm(0.5, nbar, 0.3, 3);
    const double raw = max_margin({&evm, ConstraintSet::kPhysicalAndPpt, Normalization::kRaw}).margin;
    const double white =
        max_margin({&evm, ConstraintSet::kPhysicalAndPpt, Normalization::kWhitened}).margin;
    EXPECT_EQ(raw < 0.0, white < 0.0) << "nbar=" << nbar << " raw=" << raw << " white=" << white;
  }
}

TEST(MaxMargin, MeasurePrepareDataIsCompletable) {
  for (double eta : {0.1, 0.4, 0.8}) {
    const InputEnsemble ens = InputEnsemble::equally_spaced(0.5, 3);
    std::vector<MomentSet> m;
    for (int j = 0; j < 3; ++j) m.push_back(mp_channel_moments({std::sqrt(eta)}, ens.amplitude(j)));
    const PartialEvm evm = assemble_partial_evm(ens, m);
    EXPECT_GE(max_margin({&evm, ConstraintSet::kPhysicalAndPpt}).margin, -1e-7);
    EXPECT_EQ(classify(evm).status, VerdictStatus::kCompatible);
  }
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(channel_evm(0.5, 0.2, 0.01, 3)).status, VerdictStatus::kEntangled);
  EXPECT_EQ(classify(channel_evm(1.0, 0.0, 0.01, 3)).status, VerdictStatus::kEntangled);
  EXPECT_EQ(classify(channel_evm(0.5, 5.0, 0.01, 3)).status, VerdictStatus::kCompatible);

  const InputEnsemble ens = InputEnsemble::equally_spaced(0.5, 2);
  std::vector<MomentSet> bad(2);
  for (auto& m : bad) m.var_x = m.var_p = 0.1;
  const PartialEvm evm = assemble_partial_evm(ens, bad, PhysicalityCheck::kAllow);
  const Verdict v = classify(evm);
  EXPECT_EQ(v.status, VerdictStatus::kUnphysical);
  EXPECT_LT(v.physical_margin, -1e-7);
}

TEST(Classify, IdenticalStatesAreCompatible) {
  const InputEnsemble ens = InputEnsemble::equally_spaced(0.0, 3);
  const PartialEvm evm = assemble_partial_evm(ens, std::vector<MomentSet>(3));
  EXPECT_EQ(classify(evm).status, VerdictStatus::kCompatible);
}

TEST(Classify, RejectsNonPositiveTolerance) {
  const PartialEvm evm = channel_evm(0.5, 0.2, 0.1, 2);
  EXPECT_THROW(classify(evm, 0.0), InvalidArgument);
  EXPECT_THROW(classify(evm, -1.0), InvalidArgument);
}

TEST(Classify, StatusNames) {
  EXPECT_EQ(to_string(VerdictStatus::kEntangled), "ENTANGLED");
  EXPECT_EQ(to_string(VerdictStatus::kCompatible), "COMPATIBLE");
  EXPECT_EQ(to_string(VerdictStatus::kUnphysical), "UNPHYSICAL");
}

}  // namespace
}  // namespace cvbench
