// Copyright 2026 The pgeo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pgeo/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pgeo/polynomial.h"

namespace pgeo {
namespace {

namespace pt = boost::property_tree;

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> Split(std::string_view s, std::string_view seps) {
  std::vector<std::string> out;
  size_t begin = 0;
  while (begin <= s.size()) {
    const size_t end = std::min(s.find_first_of(seps, begin), s.size());
    out.push_back(Trim(s.substr(begin, end - begin)));
    begin = end + 1;
  }
  return out;
}

std::map<std::string, int> IndexLines(const std::string& text) {
  std::map<std::string, int> lines;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  for (int line = 1; std::getline(in, raw); ++line) {
    const std::string s = Trim(raw);
    if (s.empty() || s[0] == ';' || s[0] == '#') continue;
    if (s.front() == '[' && s.back() == ']') {
      section = Trim(std::string_view(s).substr(1, s.size() - 2));
      lines.emplace("[" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = Trim(std::string_view(s).substr(0, eq));
    lines.emplace(section.empty() ? key : section + "." + key, line);
  }
  return lines;
}

class Reader {
 public:
  explicit Reader(const ProblemSpec& spec) : spec_(spec) {}

  [[noreturn]] void Fail(const std::string& key, const std::string& what) const {
    throw ConfigError(what, spec_.LineOf(key), key);
  }

  double Double(const std::string& key, const std::string& value) const {
    double out = 0.0;
    const std::string v = Trim(value);
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || end != v.data() + v.size() ||
        !std::isfinite(out)) {
      Fail(key, "expected a finite number, got '" + v + "'");
    }
    return out;
  }

  int Int(const std::string& key, const std::string& value) const {
    int out = 0;
    const std::string v = Trim(value);
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || end != v.data() + v.size()) {
      Fail(key, "expected an integer, got '" + v + "'");
    }
    return out;
  }

  bool Bool(const std::string& key, const std::string& value) const {
    std::string v = Trim(value);
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    Fail(key, "expected true or false, got '" + v + "'");
  }

  Point Vector(const std::string& key, const std::string& value) const {
    std::vector<double> values;
    for (const std::string& item : Split(value, " \t,")) {
      if (!item.empty()) values.push_back(Double(key, item));
    }
    if (values.empty()) Fail(key, "expected at least one coordinate");
    return Eigen::Map<Point>(values.data(), static_cast<Eigen::Index>(values.size()));
  }

  // Rows separated by ';', entries by ','; checked against rows x cols.
  std::vector<std::string> Table(const std::string& key, const std::string& value,
                                 int rows, int cols) const {
    const std::vector<std::string> row_text = Split(value, ";");
    if (static_cast<int>(row_text.size()) != rows) {
      Fail(key, "expected " + std::to_string(rows) + " rows separated by ';'");
    }
    std::vector<std::string> entries;
    for (const std::string& row : row_text) {
      const std::vector<std::string> cells = Split(row, ",");
      if (static_cast<int>(cells.size()) != cols) {
        Fail(key, "expected " + std::to_string(cols) + " entries per row");
      }
      entries.insert(entries.end(), cells.begin(), cells.end());
    }
    return entries;
  }

 private:
  const ProblemSpec& spec_;
};

void ReadSchedule(const Reader& r, const pt::ptree& node, ProblemSpec& spec) {
  for (const auto& [key, child] : node) {
    const std::string full = "schedule." + key;
    const std::string& v = child.data();
    if (key == "q_start") {
      spec.schedule.q_start = r.Double(full, v);
    } else if (key == "ratio") {
      spec.schedule.ratio = r.Double(full, v);
    } else if (key == "steps") {
      spec.schedule.steps = r.Int(full, v);
    } else {
      r.Fail(full, "unknown key");
    }
  }
  try {
    spec.schedule.Validate();
  } catch (const std::invalid_argument& e) {
    r.Fail("[schedule]", e.what());
  }
}

void ReadSolver(const Reader& r, const pt::ptree& node, ProblemSpec& spec) {
  SolverConfig& c = spec.solver;
  for (const auto& [key, child] : node) {
    const std::string full = "solver." + key;
    const std::string& v = child.data();
    if (key == "max_iterations") {
      c.max_iterations = r.Int(full, v);
    } else if (key == "gradient_tolerance") {
      c.gradient_tolerance = r.Double(full, v);
    } else if (key == "initial_step") {
      c.initial_step = r.Double(full, v);
    } else if (key == "backtracking_ratio") {
      c.backtracking_ratio = r.Double(full, v);
    } else if (key == "sufficient_decrease") {
      c.sufficient_decrease = r.Double(full, v);
    } else if (key == "memory") {
      c.memory = r.Int(full, v);
    } else if (key == "preconditioner") {
      const std::string p = Trim(v);
      if (p == "segment-hessian") {
        c.preconditioner = Preconditioner::kSegmentHessian;
      } else if (p == "frozen-metric") {
        c.preconditioner = Preconditioner::kFrozenMetric;
      } else {
        r.Fail(full, "expected segment-hessian or frozen-metric");
      }
    } else {
      r.Fail(full, "unknown key");
    }
  }
}

void ReadDrift(const Reader& r, const pt::ptree& node, ProblemSpec& spec) {
  DriftSettings d;
  bool preset_given = false;
  for (const auto& [key, child] : node) {
    const std::string full = "drift." + key;
    const std::string& v = child.data();
    if (key == "preset") {
      d.preset = Trim(v);
      preset_given = true;
      if (d.preset != "default" && d.preset != "zero" && d.preset != "inline") {
        r.Fail(full, "expected default, zero or inline");
      }
    } else if (key == "field") {
      d.field = Split(v, ",");
    } else if (key == "integrator_steps") {
      d.integrator_steps = r.Int(full, v);
      if (d.integrator_steps < 1) r.Fail(full, "must be >= 1");
    } else if (key == "endpoint_tolerance") {
      d.endpoint_tolerance = r.Double(full, v);
      if (!(d.endpoint_tolerance > 0.0)) r.Fail(full, "must be positive");
    } else if (key == "free_time") {
      d.free_time = r.Bool(full, v);
    } else {
      r.Fail(full, "unknown key");
    }
  }
  if (!d.field.empty() && !preset_given) d.preset = "inline";
  if (d.preset == "inline" && d.field.empty()) {
    r.Fail("[drift]", "inline drift needs a field");
  }
  if (d.preset != "inline" && !d.field.empty()) {
    r.Fail("drift.field", "field given with preset " + d.preset);
  }
  spec.drift = std::move(d);
}

void ReadInline(const Reader& r, const pt::ptree& node, ProblemSpec& spec) {
  InlineDefinition def;
  std::string frame_text;
  std::string metric_text;
  for (const auto& [key, child] : node) {
    const std::string full = "inline." + key;
    const std::string& v = child.data();
    if (key == "dimension") {
      def.dimension = r.Int(full, v);
    } else if (key == "rank") {
      def.rank = r.Int(full, v);
    } else if (key == "frame") {
      frame_text = v;
    } else if (key == "metric") {
      metric_text = v;
    } else {
      r.Fail(full, "unknown key");
    }
  }
  if (def.dimension < 1) r.Fail("inline.dimension", "must be >= 1");
  if (def.rank < 1 || def.rank > def.dimension) {
    r.Fail("inline.rank", "must be in 1..dimension");
  }
  if (frame_text.empty()) r.Fail("[inline]", "missing key 'frame'");
  def.frame = r.Table("inline.frame", frame_text, def.dimension, def.rank);
  const std::string metric = Trim(metric_text);
  if (!metric.empty() && metric != "identity") {
    def.metric = r.Table("inline.metric", metric, def.dimension, def.dimension);
  }
  spec.inline_definition = std::move(def);
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line, std::string key)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : "") +
                         (key.empty() ? "" : "key '" + key + "': ") + message),
      line_(line),
      key_(std::move(key)) {}

int ProblemSpec::LineOf(const std::string& key) const {
  const auto it = key_lines.find(key);
  return it == key_lines.end() ? 0 : it->second;
}

ProblemSpec ParseProblemSpec(const std::string& text) {
  ProblemSpec spec;
  spec.source = text;
  spec.key_lines = IndexLines(text);
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.message(), static_cast<int>(e.line()));
  }

  const Reader r(spec);
  for (const auto& [key, node] : tree) {
    const bool is_section = spec.key_lines.count("[" + key + "]") > 0;
    const std::string& v = node.data();
    if (is_section) {
      if (key == "schedule") {
        ReadSchedule(r, node, spec);
      } else if (key == "solver") {
        ReadSolver(r, node, spec);
      } else if (key == "drift") {
        ReadDrift(r, node, spec);
      } else if (key == "inline") {
        ReadInline(r, node, spec);
      } else {
        r.Fail("[" + key + "]", "unknown section");
      }
    } else if (key == "problem") {
      spec.problem = Trim(v);
    } else if (key == "start") {
      spec.start = r.Vector(key, v);
    } else if (key == "end") {
      spec.end = r.Vector(key, v);
    } else if (key == "grid_size") {
      spec.solver.grid_size = r.Int(key, v);
    } else if (key == "reference_distance") {
      spec.reference_distance = r.Double(key, v);
      if (*spec.reference_distance < 0.0) r.Fail(key, "must be >= 0");
    } else if (key == "unique") {
      spec.unique = r.Bool(key, v);
    } else if (key == "perturbation") {
      spec.perturbation = r.Double(key, v);
    } else if (key == "cauchy_threshold") {
      spec.cauchy_threshold = r.Double(key, v);
      if (!(spec.cauchy_threshold > 0.0)) r.Fail(key, "must be positive");
    } else if (key == "output") {
      spec.output = Trim(v);
    } else {
      r.Fail(key, "unknown key");
    }
  }
  if (spec.problem.empty()) throw ConfigError("missing key 'problem'", 0, "problem");
  if ((spec.problem == "inline") != spec.inline_definition.has_value()) {
    r.Fail("problem", "an [inline] section goes with problem = inline");
  }
  try {
    spec.solver.Validate();
  } catch (const std::invalid_argument& e) {
    const std::string key = spec.LineOf("grid_size") > 0 ? "grid_size" : "[solver]";
    r.Fail(key, e.what());
  }
  return spec;
}

ProblemSpec LoadProblemSpec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return ParseProblemSpec(text.str());
}

Problem Instantiate(const ProblemSpec& spec) {
  const Reader r(spec);
  auto check_dim = [&](const std::optional<Point>& p, const char* key, int n) {
    if (p.has_value() && p->size() != n) {
      r.Fail(key, "expected " + std::to_string(n) + " coordinates, got " +
                      std::to_string(p->size()));
    }
  };

  std::optional<Problem> problem;
  if (spec.problem == "inline") {
    const InlineDefinition& def = *spec.inline_definition;
    const int n = def.dimension;
    if (!spec.start || !spec.end) {
      r.Fail(spec.start ? "end" : "start", "inline problems need endpoints");
    }
    check_dim(spec.start, "start", n);
    check_dim(spec.end, "end", n);
    std::optional<PolynomialMatrix> frame;
    std::optional<PolynomialMatrix> metric;
    try {
      frame = PolynomialMatrix::Parse(def.frame, n, def.rank, n);
    } catch (const std::invalid_argument& e) {
      r.Fail("inline.frame", e.what());
    }
    try {
      if (!def.metric.empty()) metric = PolynomialMatrix::Parse(def.metric, n, n, n);
    } catch (const std::invalid_argument& e) {
      r.Fail("inline.metric", e.what());
    }
    problem.emplace(Problem{"inline", PolynomialStructure("inline", *frame, metric),
                            std::nullopt, *spec.start, *spec.end});
    try {
      Projector(problem->structure, problem->start);
      Projector(problem->structure, problem->end);
    } catch (const GeometryError& e) {
      r.Fail("[inline]", e.what());
    }
  } else {
    try {
      problem.emplace(MakeProblem(spec.problem));
    } catch (const std::invalid_argument& e) {
      r.Fail("problem", e.what());
    }
    const int n = problem->structure.dimension();
    check_dim(spec.start, "start", n);
    check_dim(spec.end, "end", n);
    if (spec.start || spec.end) {
      problem.emplace(MakeProblem(spec.problem, spec.start.value_or(problem->start),
                                  spec.end.value_or(problem->end)));
    }
  }
  if (spec.unique) problem->unique_limit = *spec.unique;
  if (spec.reference_distance) problem->reference_distance = spec.reference_distance;
  if (spec.perturbation) problem->perturbation = *spec.perturbation;
  return std::move(*problem);
}

DriftField ResolveDrift(const ProblemSpec& spec, const Problem& problem) {
  const int n = problem.structure.dimension();
  const std::string preset = spec.drift ? spec.drift->preset : "default";
  const Reader r(spec);
  if (preset == "zero") return DriftField::Zero(n);
  if (preset == "inline") {
    if (static_cast<int>(spec.drift->field.size()) != n) {
      r.Fail("drift.field", "expected " + std::to_string(n) + " components");
    }
    std::vector<Polynomial> components;
    try {
      for (const auto& f : spec.drift->field) {
        components.push_back(Polynomial::Parse(f, n));
      }
    } catch (const std::invalid_argument& e) {
      r.Fail("drift.field", e.what());
    }
    return PolynomialDrift(std::move(components));
  }
  if (!problem.drift) {
    throw ConfigError("problem '" + problem.name +
                          "' has no drift; add a [drift] section",
                      spec.LineOf("problem"), "problem");
  }
  return *problem.drift;
}

}  // namespace pgeo
