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

#ifndef PGEO_CONFIG_H_
#define PGEO_CONFIG_H_

// Run specifications in INI form:
//
//   problem = heisenberg
//   start = 0 0 0
//   end = 0 0 0.0795774715459477
//   grid_size = 200
//
//   [schedule]
//   q_start = 1
//   ratio = 10
//   steps = 5
//
//   [solver]
//   gradient_tolerance = 1e-8
//
//   [drift]
//   preset = zero
//
// See README.md for every key.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgeo/geometry.h"
#include "pgeo/optimizer.h"
#include "pgeo/problems.h"

namespace pgeo {

class ConfigError : public std::runtime_error {
 public:
  /// line 0 means unknown.
  ConfigError(const std::string& message, int line = 0, std::string key = "");

  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

struct InlineDefinition {
  int dimension = 0;
  int rank = 0;
  /// Row-major n x k polynomial entries.
  std::vector<std::string> frame;
  /// Row-major n x n entries; identity when empty.
  std::vector<std::string> metric;
};

struct DriftSettings {
  /// "default" (the catalogue drift), "zero" or "inline" (from `field`).
  std::string preset = "default";
  std::vector<std::string> field;
  int integrator_steps = 100;
  double endpoint_tolerance = 1e-8;
  bool free_time = false;
};

struct ProblemSpec {
  /// Catalogue name or "inline".
  std::string problem;
  std::optional<InlineDefinition> inline_definition;
  std::optional<Point> start;
  std::optional<Point> end;
  ContinuationSchedule schedule;
  SolverConfig solver;
  std::optional<double> reference_distance;
  std::optional<bool> unique;
  std::optional<double> perturbation;
  double cauchy_threshold = 1e-6;
  std::optional<std::string> output;
  /// Set when the [drift] section is present.
  std::optional<DriftSettings> drift;

  /// Original text, copied next to the results.
  std::string source;
  /// "section.key" (or "key" at top level) -> line number.
  std::map<std::string, int> key_lines;

  int LineOf(const std::string& key) const;
};

/// Throws ConfigError naming the line and key.
ProblemSpec ParseProblemSpec(const std::string& text);
ProblemSpec LoadProblemSpec(const std::filesystem::path& path);

/// Builds the problem with spec overrides applied. Throws ConfigError for
/// inconsistent specs (e.g. endpoint dimensions).
Problem Instantiate(const ProblemSpec& spec);

/// Drift for a drift solve: the [drift] preset, or the catalogue drift when
/// the section is absent. Throws ConfigError if there is none.
DriftField ResolveDrift(const ProblemSpec& spec, const Problem& problem);

}  // namespace pgeo

#endif  // PGEO_CONFIG_H_
