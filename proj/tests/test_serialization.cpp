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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvbench/errors.hpp"
#include "cvbench/serialization.hpp"

namespace cvbench {
namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / ("cvbench_test_" + name);
  std::ofstream(p) << content;
  return p;
}

std::string parse_error_message(const Json& doc) {
  try {
    moments_from_json(doc);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

MomentsFile direct_file(double eta, double nbar, double alpha, int n, bool cross = true) {
  MomentsFile f;
  f.alpha = alpha;
  const InputEnsemble ens = InputEnsemble::equally_spaced(alpha, n);
  for (int j = 0; j < n; ++j) {
    MomentSet m = apply_loss_noise({eta, nbar}, ens.amplitude(j));
    if (!cross) m = m.without_cross();
    f.states.push_back(m);
    f.state_phases.push_back(ens.phases[static_cast<std::size_t>(j)]);
  }
  f.phases = f.state_phases;
  return f;
}

TEST(EvmJson, RoundTrip) {
  for (bool cross : {true, false}) {
    const PartialEvm evm = ingest(direct_file(0.5, 0.3, 0.4, 3, cross)).evm;
    const PartialEvm back = evm_from_json(Json::parse(evm_to_json(evm).dump()));
    EXPECT_EQ(back, evm);
  }
}

TEST(EvmJson, RejectsBadShapes) {
  Json doc = evm_to_json(ingest(direct_file(0.5, 0.3, 0.4, 2)).evm);
  Json bad = doc;
  bad["values"].erase(0);
  EXPECT_THROW(evm_from_json(bad), ParseError);
  bad = doc;
  bad["free"].push_back({0, 99});
  EXPECT_THROW(evm_from_json(bad), ParseError);
  bad = doc;
  bad.erase("n_states");
  EXPECT_THROW(evm_from_json(bad), ParseError);
}

TEST(MomentsJson, RoundTrip) {
  const MomentsFile f = direct_file(0.7, 0.2, 0.3, 3, false);
  EXPECT_EQ(moments_from_json(moments_to_json(f)), f);
}

TEST(MomentsJson, ErrorsNameTheField) {
  Json doc = moments_to_json(direct_file(0.7, 0.2, 0.3, 3));
  Json bad = doc;
  bad["states"][1]["var_x"] = "wide";
  EXPECT_NE(parse_error_message(bad).find("moments.states[1].var_x"), std::string::npos);
  bad = doc;
  bad["states"][2].erase("mean_p");
  EXPECT_NE(parse_error_message(bad).find("mean_p"), std::string::npos);
  bad = doc;
  bad["mode"] = "sideways";
  EXPECT_NE(parse_error_message(bad).find("moments.mode"), std::string::npos);
  bad = doc;
  bad["mode"] = "phase_covariant";
  EXPECT_NE(parse_error_message(bad).find("moments.states"), std::string::npos);
}

TEST(MomentsJson, MissingCrossMomentIsFree) {
  Json doc = moments_to_json(direct_file(0.7, 0.2, 0.3, 2));
  doc["states"][0].erase("cross_re");
  const MomentsFile f = moments_from_json(doc);
  EXPECT_FALSE(f.states[0].cross_re.has_value());
  EXPECT_TRUE(f.states[1].cross_re.has_value());
}

TEST(ReadJsonFile, ReportsLineAndColumn) {
  const fs::path p = temp_file("bad.json", "{\n  \"mode\": \"direct\",\n  \"alpha\": ,\n}\n");
  try {
    read_json_file(p);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  fs::remove(p);
  EXPECT_THROW(read_json_file("/nonexistent/cvbench.json"), Error);
}

TEST(Ingest, FlagsUnphysicalStates) {
  MomentsFile f = direct_file(0.5, 0.0, 0.5, 2);
  f.states[1].var_x = f.states[1].var_p = 0.1;
  const IngestResult r = ingest(f);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("state 1"), std::string::npos);
  EXPECT_EQ(classify(r.evm).status, VerdictStatus::kUnphysical);
}

TEST(Ingest, PhaseCovariantFileMatchesDirect) {
  const MomentsFile direct = direct_file(0.5, 0.4, 0.6, 3);
  // Base state measured at the last ensemble phase.
  MomentsFile cov;
  cov.mode = Assembly::kPhaseCovariant;
  cov.alpha = direct.alpha;
  cov.states = {direct.states[2]};
  cov.state_phases = {direct.state_phases[2]};
  cov.phases = direct.phases;
  const PartialEvm a = ingest(direct).evm;
  const PartialEvm b = ingest(moments_from_json(moments_to_json(cov))).evm;
  EXPECT_TRUE(a.values().isApprox(b.values(), 1e-12));
}

TEST(CurvesJson, RoundTripWithFailedPoint) {
  ThresholdCurve c;
  c.criterion = "evm_n3_a0.01";
  c.config.eta_grid = {0.2, 0.4};
  c.config.moment_mode = MomentMode::kHomodyneOnly;
  c.config.bisection.upper = 4.0;
  c.points.push_back({0.2, 0.05, 0.04, std::nullopt, std::nullopt});
  c.points.push_back({0.4, std::nan(""), std::nan(""), 0.3, "no bracket"});
  const ThresholdCurve back = curve_from_json(Json::parse(curve_to_json(c).dump()));
  EXPECT_EQ(back.criterion, c.criterion);
  EXPECT_EQ(back.config, c.config);
  ASSERT_EQ(back.points.size(), 2u);
  EXPECT_EQ(back.points[0], c.points[0]);
  EXPECT_TRUE(std::isnan(back.points[1].nbar_threshold));
  EXPECT_EQ(back.points[1].error, c.points[1].error);
  EXPECT_EQ(back.points[1].alpha, 0.3);
  EXPECT_TRUE(curve_to_json(c)["points"][1]["nbar_threshold"].is_null());
}

TEST(ConfigJson, RoundTrip) {
  SweepConfig cfg;
  cfg.eta_grid = {0.1, 0.9};
  cfg.n_states = 4;
  cfg.alpha = 0.05;
  cfg.assembly = Assembly::kPhaseCovariant;
  cfg.criteria = {Criterion::kCovariance};
  EXPECT_EQ(config_from_json(config_to_json(cfg)), cfg);
}

TEST(CurvesCsv, Format) {
  ThresholdCurve c;
  c.criterion = "covariance";
  c.points.push_back({0.5, 1.0, 0.5, std::nullopt, std::nullopt});
  std::ostringstream out;
  write_curves_csv(out, {c});
  EXPECT_EQ(out.str(), "criterion,eta,nbar_threshold,excess_variance\ncovariance,0.5,1,0.5\n");

  c.points[0].alpha = 0.25;
  std::ostringstream with_alpha;
  write_curves_csv(with_alpha, {c});
  EXPECT_EQ(with_alpha.str(),
            "criterion,eta,alpha,nbar_threshold,excess_variance\ncovariance,0.5,0.25,1,0.5\n");
}

TEST(RunRecord, RoundTripAndAppend) {
  RunRecord r{"classify", Json{{"eta", 0.5}}, Json{{"status", "ENTANGLED"}}, 0.25, version()};
  EXPECT_EQ(run_record_from_json(run_record_to_json(r)), r);
  EXPECT_FALSE(version().empty());

  const fs::path p = fs::temp_directory_path() / "cvbench_test_runs.jsonl";
  fs::remove(p);
  append_run_record(p, r);
  append_run_record(p, r);
  std::ifstream in(p);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(run_record_from_json(Json::parse(line)), r);
    ++lines;
  }
  EXPECT_EQ(lines, 2);
  fs::remove(p);
  EXPECT_THROW(append_run_record("/nonexistent/dir/runs.jsonl", r), Error);
}

}  // namespace
}  // namespace cvbench
