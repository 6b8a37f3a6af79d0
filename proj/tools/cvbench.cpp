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


// Command-line front end. Exit codes: 0 COMPATIBLE (or success), 2 ENTANGLED,
// 3 UNPHYSICAL, 1 error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cvbench/analytic.hpp"
#include "cvbench/errors.hpp"
#include "cvbench/feasibility.hpp"
#include "cvbench/serialization.hpp"
#include "cvbench/sweeper.hpp"

namespace fs = std::filesystem;
using namespace cvbench;

namespace {

constexpr int kExitError = 1;

int exit_code(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::kCompatible:
      return 0;
    case VerdictStatus::kEntangled:
      return 2;
    case VerdictStatus::kUnphysical:
      return 3;
  }
  return kExitError;
}

struct Options {
  double eta = 0.5;
  double nbar = 0.0;
  int n = 3;
  double alpha = 0.01;
  double tol = kDefaultVerdictTolerance;
  double precision = 1e-3;
  std::string moment_mode = "full";
  std::string assembly = "direct";
  std::vector<std::string> criteria{"evm", "covariance"};
  std::vector<double> eta_grid;
  int eta_points = 0;
  std::vector<int> ns{3, 4, 5};
  std::vector<double> alphas;
  std::string input;
  std::string out;
  std::string run_log;
  unsigned threads = 0;
};

SweepConfig make_config(const Options& o) {
  SweepConfig cfg;
  cfg.n_states = o.n;
  cfg.alpha = o.alpha;
  cfg.tol = o.tol;
  cfg.bisection.precision = o.precision;
  cfg.moment_mode = o.moment_mode == "homodyne" ? MomentMode::kHomodyneOnly : MomentMode::kFullMoments;
  cfg.assembly = o.assembly == "phase-covariant" ? Assembly::kPhaseCovariant : Assembly::kDirect;
  cfg.threads = o.threads;
  cfg.criteria.clear();
  for (const auto& c : o.criteria) {
    cfg.criteria.push_back(c == "evm" ? Criterion::kEvm : Criterion::kCovariance);
  }
  return cfg;
}

std::vector<double> eta_grid(const Options& o) {
  if (!o.eta_grid.empty()) return o.eta_grid;
  if (o.eta_points <= 0) return {o.eta};
  // Evenly spaced over (0, 1), endpoints excluded.
  std::vector<double> grid;
  for (int k = 1; k <= o.eta_points; ++k) grid.push_back(static_cast<double>(k) / (o.eta_points + 1));
  return grid;
}

// Loads either a measured-moments file or a serialized EVM.
IngestResult load_evm(const std::string& path) {
  const Json doc = read_json_file(path);
  if (doc.is_object() && doc.contains("n_states")) return {evm_from_json(doc), {}};
  return ingest(moments_from_json(doc));
}

void print_verdict(const Verdict& v) {
  std::cout << to_string(v.status) << " margin=" << v.margin
            << " physical_margin=" << v.physical_margin << " tol=" << v.tolerance << '\n';
}

Json verdict_json(const Verdict& v) {
  return {{"status", std::string(to_string(v.status))},
          {"margin", v.margin},
          {"physical_margin", v.physical_margin},
          {"tolerance", v.tolerance}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

void emit_curves(const std::vector<ThresholdCurve>& curves, const std::string& out_prefix) {
  std::ostringstream csv;
  write_curves_csv(csv, curves);
  if (out_prefix.empty()) {
    std::cout << csv.str();
    return;
  }
  write_text(out_prefix + ".csv", csv.str());
  write_text(out_prefix + ".json", curves_to_json(curves).dump(2) + "\n");
}

std::string default_log(const Options& o) {
  return o.out.empty() ? std::string() : o.out + ".runs.jsonl";
}

void log_run(const Options& o, const std::string& command, const Json& config, const Json& results,
             std::chrono::steady_clock::time_point start) {
  const std::string path = o.run_log.empty() ? default_log(o) : o.run_log;
  if (path.empty()) return;
  RunRecord r;
  r.command = command;
  r.config = config;
  r.results = results;
  r.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.version = version();
  append_run_record(path, r);
}

void add_channel_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--eta", o.eta, "channel transmissivity")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--n", o.n, "number of input states")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", o.alpha, "coherent amplitude");
  cmd->add_option("--tol", o.tol, "verdict tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--moment-mode", o.moment_mode, "full or homodyne")
      ->check(CLI::IsMember({"full", "homodyne"}));
  cmd->add_option("--assembly", o.assembly, "direct or phase-covariant")
      ->check(CLI::IsMember({"direct", "phase-covariant"}));
  cmd->add_option("--run-log", o.run_log, "line-delimited JSON run log to append to");
}

void add_bisection_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--precision", o.precision, "bisection precision in nbar")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  cmd->add_option("--out", o.out, "output prefix: writes <out>.csv and <out>.json");
}

int run_classify(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  Json config;
  PartialEvm evm;
  if (!o.input.empty()) {
    IngestResult r = load_evm(o.input);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    evm = std::move(r.evm);
    config = {{"input", o.input}, {"tol", o.tol}};
  } else {
    const SweepConfig cfg = make_config(o);
    evm = channel_evm({o.eta, o.nbar}, cfg);
    config = config_to_json(cfg);
    config["eta"] = o.eta;
    config["nbar"] = o.nbar;
  }
  const Verdict v = classify(evm, o.tol);
  print_verdict(v);
  log_run(o, "classify", config, verdict_json(v), start);
  return exit_code(v.status);
}

int run_threshold(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  SweepConfig cfg = make_config(o);
  cfg.eta_grid = {o.eta};
  const auto curves = sweep_criteria(cfg);
  emit_curves(curves, o.out);
  log_run(o, "threshold", config_to_json(cfg), curves_to_json(curves), start);
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      if (p.error) {
        std::cerr << "error: " << c.criterion << " at eta=" << p.eta << ": " << *p.error << '\n';
        return kExitError;
      }
    }
  }
  return 0;
}

int run_sweep(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  SweepConfig cfg = make_config(o);
  cfg.eta_grid = eta_grid(o);
  const auto curves = sweep_criteria(cfg);
  emit_curves(curves, o.out);
  log_run(o, "sweep", config_to_json(cfg), curves_to_json(curves), start);
  int failures = 0;
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      if (p.error) {
        std::cerr << "warning: " << c.criterion << " at eta=" << p.eta << ": " << *p.error << '\n';
        ++failures;
      }
    }
  }
  return failures == 0 ? 0 : kExitError;
}

int run_alpha_scan(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const SweepConfig base = make_config(o);
  const std::vector<double> alphas = o.alphas.empty() ? coarse_alpha_grid() : o.alphas;
  const auto curves = alpha_dependence(o.eta, o.ns, alphas, base);
  emit_curves(curves, o.out);
  Json config = config_to_json(base);
  config["eta"] = o.eta;
  config["n_list"] = o.ns;
  config["alpha_grid"] = alphas;
  log_run(o, "alpha-scan", config, curves_to_json(curves), start);
  return 0;
}

int run_ingest(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  IngestResult r = load_evm(o.input);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  const std::string doc = evm_to_json(r.evm).dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << doc;
  } else {
    write_text(o.out, doc);
  }
  const Verdict v = classify(r.evm, o.tol);
  (o.out.empty() ? std::cerr : std::cout) << to_string(v.status) << " margin=" << v.margin
                                          << " physical_margin=" << v.physical_margin
                                          << " tol=" << v.tolerance << '\n';
  log_run(o, "ingest", {{"input", o.input}, {"tol", o.tol}}, verdict_json(v), start);
  return exit_code(v.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-domain benchmarks for continuous-variable channels"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  Options o;

  auto* classify_cmd = app.add_subcommand("classify", "verdict for one EVM");
  add_channel_flags(classify_cmd, o);
  classify_cmd->add_option("--nbar", o.nbar, "thermal photon number")->check(CLI::NonNegativeNumber);
  classify_cmd->add_option("--input", o.input, "moments file or serialized EVM")
      ->check(CLI::ExistingFile);

  auto* threshold_cmd = app.add_subcommand("threshold", "noise threshold at one transmissivity");
  add_channel_flags(threshold_cmd, o);
  add_bisection_flags(threshold_cmd, o);
  threshold_cmd->add_option("--criteria", o.criteria, "evm and/or covariance")
      ->check(CLI::IsMember({"evm", "covariance"}))
      ->delimiter(',');

  auto* sweep_cmd = app.add_subcommand("sweep", "threshold curves over a transmissivity grid");
  add_channel_flags(sweep_cmd, o);
  add_bisection_flags(sweep_cmd, o);
  sweep_cmd->add_option("--criteria", o.criteria, "evm and/or covariance")
      ->check(CLI::IsMember({"evm", "covariance"}))
      ->delimiter(',');
  sweep_cmd->add_option("--eta-grid", o.eta_grid, "explicit transmissivities")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--eta-points", o.eta_points, "evenly spaced grid inside (0, 1)");

  auto* alpha_cmd = app.add_subcommand("alpha-scan", "thresholds against input amplitude");
  add_channel_flags(alpha_cmd, o);
  add_bisection_flags(alpha_cmd, o);
  alpha_cmd->add_option("--ns", o.ns, "ensemble sizes")->delimiter(',');
  alpha_cmd->add_option("--alphas", o.alphas, "amplitudes (default 0.1..1.5)")->delimiter(',');

  auto* ingest_cmd = app.add_subcommand("ingest", "build an EVM from measured moments");
  ingest_cmd->add_option("--input", o.input, "moments file or serialized EVM")
      ->required()
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", o.out, "where to write the EVM (default stdout)");
  ingest_cmd->add_option("--tol", o.tol, "verdict tolerance")->check(CLI::PositiveNumber);
  ingest_cmd->add_option("--run-log", o.run_log, "line-delimited JSON run log to append to");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*classify_cmd) return run_classify(o);
    if (*threshold_cmd) return run_threshold(o);
    if (*sweep_cmd) return run_sweep(o);
    if (*alpha_cmd) return run_alpha_scan(o);
    if (*ingest_cmd) return run_ingest(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
