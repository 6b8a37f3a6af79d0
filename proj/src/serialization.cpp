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


#include "cvbench/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cvbench/errors.hpp"

#ifndef CVBENCH_VERSION
#define CVBENCH_VERSION "unknown"
#endif

namespace cvbench {
namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const Json& field(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing field '" + key + "'");
  return *it;
}

double number(const Json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "expected a finite number");
  return x;
}

int integer(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

const Json& array(const Json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array");
  return v;
}

Complex complex_from(const Json& v, const std::string& where) {
  if (v.is_number()) return {number(v, where), 0.0};
  if (!v.is_array() || v.size() != 2) fail(where, "expected [re, im]");
  return {number(v[0], where + "[0]"), number(v[1], where + "[1]")};
}

Json complex_to(Complex z) { return Json::array({z.real(), z.imag()}); }

// NaN is not representable in JSON; failed points carry null.
Json maybe_number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double number_or_nan(const Json& v, const std::string& where) {
  return v.is_null() ? std::nan("") : number(v, where);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string where_at(const std::string& parent, std::size_t k) {
  return parent + "[" + std::to_string(k) + "]";
}

MomentSet state_from_json(const Json& s, const std::string& where, double* phase) {
  MomentSet m;
  *phase = number(field(s, "phase", where), where + ".phase");
  m.mean_x = number(field(s, "mean_x", where), where + ".mean_x");
  m.mean_p = number(field(s, "mean_p", where), where + ".mean_p");
  m.var_x = number(field(s, "var_x", where), where + ".var_x");
  m.var_p = number(field(s, "var_p", where), where + ".var_p");
  const auto it = s.find("cross_re");
  if (it == s.end() || it->is_null()) {
    m.cross_re.reset();
  } else {
    m.cross_re = number(*it, where + ".cross_re");
  }
  return m;
}

Json state_to_json(const MomentSet& m, double phase) {
  Json s = {{"phase", phase},   {"mean_x", m.mean_x}, {"mean_p", m.mean_p},
            {"var_x", m.var_x}, {"var_p", m.var_p}};
  if (m.cross_re) s["cross_re"] = *m.cross_re;
  return s;
}

std::string mode_name(MomentMode m) {
  return m == MomentMode::kFullMoments ? "full_moments" : "homodyne_only";
}

std::string criterion_name(Criterion c) { return c == Criterion::kEvm ? "evm" : "covariance"; }

std::string assembly_name(Assembly a) {
  return a == Assembly::kDirect ? "direct" : "phase_covariant";
}

Assembly assembly_from(const Json& v, const std::string& where) {
  if (v == "direct") return Assembly::kDirect;
  if (v == "phase_covariant") return Assembly::kPhaseCovariant;
  fail(where, "expected \"direct\" or \"phase_covariant\"");
}

}  // namespace

Json evm_to_json(const PartialEvm& evm) {
  Json values = Json::array();
  for (int r = 0; r < evm.dim(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < evm.dim(); ++c) row.push_back(complex_to(evm.values()(r, c)));
    values.push_back(std::move(row));
  }
  Json free = Json::array();
  for (int r = 0; r < evm.dim(); ++r) {
    for (int c = r; c < evm.dim(); ++c) {
      if (evm.is_free(r, c)) free.push_back({r, c});
    }
  }
  Json directions = Json::array();
  for (int b = 0; b < evm.n_states(); ++b) {
    const auto& d = evm.block_direction(b);
    if (!d) continue;
    Json rows = Json::array();
    for (int r = 0; r < 3; ++r) rows.push_back({(*d)(r, 0), (*d)(r, 1), (*d)(r, 2)});
    directions.push_back({{"block", b}, {"direction", std::move(rows)}});
  }
  return {{"n_states", evm.n_states()},
          {"values", std::move(values)},
          {"free", std::move(free)},
          {"block_directions", std::move(directions)}};
}

PartialEvm evm_from_json(const Json& doc) {
  const int n = integer(field(doc, "n_states", "evm"), "evm.n_states");
  if (n < 1) fail("evm.n_states", "must be at least 1");
  const int dim = 3 * n;
  const Json& values = array(field(doc, "values", "evm"), "evm.values");
  if (static_cast<int>(values.size()) != dim) fail("evm.values", "expected 3N rows");
  Eigen::MatrixXcd m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const std::string row_where = where_at("evm.values", static_cast<std::size_t>(r));
    const Json& row = array(values[static_cast<std::size_t>(r)], row_where);
    if (static_cast<int>(row.size()) != dim) fail(row_where, "expected 3N entries");
    for (int c = 0; c < dim; ++c) {
      m(r, c) = complex_from(row[static_cast<std::size_t>(c)],
                             where_at(row_where, static_cast<std::size_t>(c)));
    }
  }
  std::vector<bool> free(static_cast<std::size_t>(dim * dim), false);
  const Json& free_list = array(field(doc, "free", "evm"), "evm.free");
  for (std::size_t k = 0; k < free_list.size(); ++k) {
    const std::string where = where_at("evm.free", k);
    const Json& e = array(free_list[k], where);
    if (e.size() != 2) fail(where, "expected [row, col]");
    const int r = integer(e[0], where);
    const int c = integer(e[1], where);
    if (r < 0 || c < 0 || r >= dim || c >= dim) fail(where, "index out of range");
    free[static_cast<std::size_t>(r * dim + c)] = true;
    free[static_cast<std::size_t>(c * dim + r)] = true;
  }

  PartialEvm evm(n);
  for (int r = 0; r < dim; ++r) {
    for (int c = r; c < dim; ++c) {
      if (!free[static_cast<std::size_t>(r * dim + c)]) evm.set_fixed(r, c, m(r, c));
    }
  }
  const auto it = doc.find("block_directions");
  if (it != doc.end()) {
    const Json& dirs = array(*it, "evm.block_directions");
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const std::string where = where_at("evm.block_directions", k);
      const int b = integer(field(dirs[k], "block", where), where + ".block");
      if (b < 0 || b >= n) fail(where + ".block", "index out of range");
      const Json& rows = array(field(dirs[k], "direction", where), where + ".direction");
      if (rows.size() != 3) fail(where + ".direction", "expected a 3x3 matrix");
      Eigen::Matrix3d d;
      for (int r = 0; r < 3; ++r) {
        const Json& row = array(rows[static_cast<std::size_t>(r)], where + ".direction");
        if (row.size() != 3) fail(where + ".direction", "expected a 3x3 matrix");
        for (int c = 0; c < 3; ++c) {
          d(r, c) = number(row[static_cast<std::size_t>(c)], where + ".direction");
        }
      }
      LocalBlock blk;
      blk.entries = m.block<3, 3>(3 * b, 3 * b);
      blk.free_direction = d;
      evm.set_diagonal_block(b, blk);
    }
  }
  return evm;
}

MomentsFile moments_from_json(const Json& doc) {
  MomentsFile f;
  f.mode = assembly_from(field(doc, "mode", "moments"), "moments.mode");
  f.alpha = complex_from(field(doc, "alpha", "moments"), "moments.alpha");
  const Json& states = array(field(doc, "states", "moments"), "moments.states");
  if (states.empty()) fail("moments.states", "needs at least one state");
  for (std::size_t k = 0; k < states.size(); ++k) {
    double phase = 0.0;
    f.states.push_back(state_from_json(states[k], where_at("moments.states", k), &phase));
    f.state_phases.push_back(phase);
  }
  if (f.mode == Assembly::kPhaseCovariant) {
    if (f.states.size() != 1) fail("moments.states", "phase_covariant mode takes one base state");
    const Json& phases = array(field(doc, "phases", "moments"), "moments.phases");
    if (phases.empty()) fail("moments.phases", "needs at least one phase");
    for (std::size_t k = 0; k < phases.size(); ++k) {
      f.phases.push_back(number(phases[k], where_at("moments.phases", k)));
    }
  } else {
    f.phases = f.state_phases;
  }
  return f;
}

Json moments_to_json(const MomentsFile& f) {
  Json states = Json::array();
  for (std::size_t k = 0; k < f.states.size(); ++k) {
    states.push_back(state_to_json(f.states[k], f.state_phases.at(k)));
  }
  Json doc = {{"mode", assembly_name(f.mode)},
              {"alpha", complex_to(f.alpha)},
              {"states", std::move(states)}};
  if (f.mode == Assembly::kPhaseCovariant) doc["phases"] = f.phases;
  return doc;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < end; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << path.string() << ":" << line << ":" << col << ": malformed JSON";
    throw ParseError(msg.str());
  }
}

IngestResult ingest(const MomentsFile& f) {
  IngestResult out;
  for (std::size_t k = 0; k < f.states.size(); ++k) {
    if (!f.states[k].is_physical()) {
      std::ostringstream msg;
      msg << "state " << k << " violates var_x * var_p >= 1/4 (var_x=" << f.states[k].var_x
          << ", var_p=" << f.states[k].var_p << "); UNPHYSICAL data";
      out.warnings.push_back(msg.str());
    }
  }
  InputEnsemble ens;
  ens.alpha = f.alpha;
  ens.phases = f.phases;
  if (f.mode == Assembly::kPhaseCovariant) {
    const LocalBlock measured =
        build_local_block(f.states.front(), 1.0, PhysicalityCheck::kAllow);
    out.evm = assemble_phase_covariant(rotate_block(measured, -f.state_phases.front()), ens);
  } else {
    out.evm = assemble_partial_evm(ens, f.states, PhysicalityCheck::kAllow);
  }
  return out;
}

Json config_to_json(const SweepConfig& cfg) {
  Json criteria = Json::array();
  for (Criterion c : cfg.criteria) criteria.push_back(criterion_name(c));
  Json bisection = {{"lower", cfg.bisection.lower}, {"precision", cfg.bisection.precision}};
  bisection["upper"] = cfg.bisection.upper ? Json(*cfg.bisection.upper) : Json(nullptr);
  return {{"eta_grid", cfg.eta_grid},
          {"n_states", cfg.n_states},
          {"alpha", cfg.alpha},
          {"moment_mode", mode_name(cfg.moment_mode)},
          {"assembly", assembly_name(cfg.assembly)},
          {"tol", cfg.tol},
          {"bisection", std::move(bisection)},
          {"criteria", std::move(criteria)}};
}

SweepConfig config_from_json(const Json& doc) {
  SweepConfig cfg;
  const Json& grid = array(field(doc, "eta_grid", "config"), "config.eta_grid");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    cfg.eta_grid.push_back(number(grid[k], where_at("config.eta_grid", k)));
  }
  cfg.n_states = integer(field(doc, "n_states", "config"), "config.n_states");
  cfg.alpha = number(field(doc, "alpha", "config"), "config.alpha");
  const Json& mode = field(doc, "moment_mode", "config");
  if (mode == "full_moments") {
    cfg.moment_mode = MomentMode::kFullMoments;
  } else if (mode == "homodyne_only") {
    cfg.moment_mode = MomentMode::kHomodyneOnly;
  } else {
    fail("config.moment_mode", "expected \"full_moments\" or \"homodyne_only\"");
  }
  cfg.assembly = assembly_from(field(doc, "assembly", "config"), "config.assembly");
  cfg.tol = number(field(doc, "tol", "config"), "config.tol");
  const Json& b = field(doc, "bisection", "config");
  cfg.bisection.lower = number(field(b, "lower", "config.bisection"), "config.bisection.lower");
  cfg.bisection.precision =
      number(field(b, "precision", "config.bisection"), "config.bisection.precision");
  const Json& upper = field(b, "upper", "config.bisection");
  if (!upper.is_null()) cfg.bisection.upper = number(upper, "config.bisection.upper");
  cfg.criteria.clear();
  const Json& criteria = array(field(doc, "criteria", "config"), "config.criteria");
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (criteria[k] == "evm") {
      cfg.criteria.push_back(Criterion::kEvm);
    } else if (criteria[k] == "covariance") {
      cfg.criteria.push_back(Criterion::kCovariance);
    } else {
      fail(where_at("config.criteria", k), "expected \"evm\" or \"covariance\"");
    }
  }
  return cfg;
}

Json curve_to_json(const ThresholdCurve& curve) {
  Json points = Json::array();
  for (const auto& p : curve.points) {
    Json j = {{"eta", p.eta},
              {"nbar_threshold", maybe_number(p.nbar_threshold)},
              {"excess_variance", maybe_number(p.excess_variance)}};
    if (p.alpha) j["alpha"] = *p.alpha;
    if (p.error) j["error"] = *p.error;
    points.push_back(std::move(j));
  }
  return {{"criterion", curve.criterion},
          {"points", std::move(points)},
          {"config", config_to_json(curve.config)}};
}

ThresholdCurve curve_from_json(const Json& doc) {
  ThresholdCurve curve;
  const Json& label = field(doc, "criterion", "curve");
  if (!label.is_string()) fail("curve.criterion", "expected a string");
  curve.criterion = label.get<std::string>();
  curve.config = config_from_json(field(doc, "config", "curve"));
  const Json& points = array(field(doc, "points", "curve"), "curve.points");
  for (std::size_t k = 0; k < points.size(); ++k) {
    const std::string where = where_at("curve.points", k);
    ThresholdPoint p;
    p.eta = number(field(points[k], "eta", where), where + ".eta");
    p.nbar_threshold =
        number_or_nan(field(points[k], "nbar_threshold", where), where + ".nbar_threshold");
    p.excess_variance =
        number_or_nan(field(points[k], "excess_variance", where), where + ".excess_variance");
    if (const auto a = points[k].find("alpha"); a != points[k].end()) {
      p.alpha = number(*a, where + ".alpha");
    }
    if (const auto e = points[k].find("error"); e != points[k].end()) {
      p.error = e->get<std::string>();
    }
    curve.points.push_back(std::move(p));
  }
  return curve;
}

Json curves_to_json(const std::vector<ThresholdCurve>& curves) {
  Json out = Json::array();
  for (const auto& c : curves) out.push_back(curve_to_json(c));
  return out;
}

void write_curves_csv(std::ostream& out, const std::vector<ThresholdCurve>& curves) {
  bool with_alpha = false;
  for (const auto& c : curves) {
    for (const auto& p : c.points) with_alpha = with_alpha || p.alpha.has_value();
  }
  out << (with_alpha ? "criterion,eta,alpha,nbar_threshold,excess_variance\n"
                     : "criterion,eta,nbar_threshold,excess_variance\n");
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << c.criterion << ',' << format_double(p.eta) << ',';
      if (with_alpha) out << (p.alpha ? format_double(*p.alpha) : "") << ',';
      out << format_double(p.nbar_threshold) << ',' << format_double(p.excess_variance) << '\n';
    }
  }
}

Json run_record_to_json(const RunRecord& r) {
  return {{"command", r.command},
          {"config", r.config},
          {"results", r.results},
          {"duration_seconds", r.duration_seconds},
          {"version", r.version}};
}

RunRecord run_record_from_json(const Json& doc) {
  RunRecord r;
  const Json& command = field(doc, "command", "run");
  const Json& ver = field(doc, "version", "run");
  if (!command.is_string()) fail("run.command", "expected a string");
  if (!ver.is_string()) fail("run.version", "expected a string");
  r.command = command.get<std::string>();
  r.config = field(doc, "config", "run");
  r.results = field(doc, "results", "run");
  r.duration_seconds = number(field(doc, "duration_seconds", "run"), "run.duration_seconds");
  r.version = ver.get<std::string>();
  return r;
}

void append_run_record(const std::filesystem::path& path, const RunRecord& r) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot open run log " + path.string());
  out << run_record_to_json(r).dump() << '\n';
  if (!out) throw Error("cannot write run log " + path.string());
}

std::string version() { return CVBENCH_VERSION; }

}  // namespace cvbench
