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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "cvbench/evm.hpp"
#include "cvbench/sweeper.hpp"

namespace cvbench {

using Json = nlohmann::json;

// PartialEvm document:
//   {"n_states": N,
//    "values": [[[re, im], ...], ...],          full 3N x 3N matrix
//    "free": [[r, c], ...],                      upper triangle, r <= c
//    "block_directions": [{"block": i, "direction": [[...], [...], [...]]}]}
Json evm_to_json(const PartialEvm& evm);
/// Throws ParseError naming the offending field.
PartialEvm evm_from_json(const Json& doc);

/// Measured moments as reported by an experiment.
///
///   {"mode": "direct" | "phase_covariant",
///    "alpha": a | [re, im],
///    "states": [{"phase", "mean_x", "mean_p", "var_x", "var_p", "cross_re"?}],
///    "phases": [...]}                           phase_covariant only
///
/// Direct mode carries one state per input phase. Phase-covariant mode
/// carries a single state measured at its `phase` and the list of ensemble
/// phases it is rotated to. A missing cross_re leaves that moment free.
struct MomentsFile {
  Assembly mode = Assembly::kDirect;
  Complex alpha{0.0, 0.0};
  std::vector<double> state_phases;
  std::vector<MomentSet> states;
  std::vector<double> phases;

  bool operator==(const MomentsFile&) const = default;
};

MomentsFile moments_from_json(const Json& doc);
Json moments_to_json(const MomentsFile& file);

/// Parses a file; syntax errors report line and column.
Json read_json_file(const std::filesystem::path& path);

struct IngestResult {
  PartialEvm evm;
  // One message per state whose moments violate the uncertainty relation.
  std::vector<std::string> warnings;
};

/// Builds the EVM without rejecting unphysical moments; they are reported
/// in `warnings` and show up as an UNPHYSICAL verdict.
IngestResult ingest(const MomentsFile& file);

Json config_to_json(const SweepConfig& cfg);
SweepConfig config_from_json(const Json& doc);

Json curve_to_json(const ThresholdCurve& curve);
ThresholdCurve curve_from_json(const Json& doc);
Json curves_to_json(const std::vector<ThresholdCurve>& curves);

/// criterion,eta,nbar_threshold,excess_variance; an alpha column is
/// inserted after eta when any point carries an amplitude.
void write_curves_csv(std::ostream& out, const std::vector<ThresholdCurve>& curves);

struct RunRecord {
  std::string command;
  Json config;
  Json results;
  double duration_seconds = 0.0;
  std::string version;

  bool operator==(const RunRecord&) const = default;
};

Json run_record_to_json(const RunRecord& r);
RunRecord run_record_from_json(const Json& doc);
/// Appends one line to a line-delimited JSON log. Throws Error with the path
/// when the file cannot be written.
void append_run_record(const std::filesystem::path& path, const RunRecord& r);

/// Library version string.
std::string version();

}  // namespace cvbench
