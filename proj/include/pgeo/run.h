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

#ifndef PGEO_RUN_H_
#define PGEO_RUN_H_

// Batch runs writing plot-ready files into one output directory:
//
//   config.ini          copy of the run specification
//   results.csv         one row per q
//   path_q<q>.csv       t, x1..xn
//   report.json         convergence report and run metadata
//
// drift runs add lifted_path_q<q>.csv (t, x1..xn, s) and control_q<q>.csv
// (t, Y1..Yn).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "pgeo/config.h"

namespace pgeo {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  /// A step did not converge or an activated check failed.
  kExitFailure = 1,
  /// Bad configuration or unreadable results.
  kExitUsage = 2,
};

/// Output directory: `out` if non-empty, else the spec's output key, else
/// <root>/<problem> with root from PGEO_OUTPUT_ROOT (default "pgeo-results").
std::filesystem::path ResolveOutputDir(const ProblemSpec& spec,
                                       const std::filesystem::path& out);

/// "%g" rendering of q used in file names, e.g. path_q1000.csv.
std::string QTag(double q);

/// Continuation solve on the spec's structure. Config errors propagate as
/// ConfigError.
int RunSolve(const ProblemSpec& spec, const std::filesystem::path& out_dir,
             std::ostream& log);

/// Lifted solve for the spec's drift.
int RunDriftSolve(const ProblemSpec& spec, const std::filesystem::path& out_dir,
                  std::ostream& log);

/// Re-evaluates the stored paths of a finished run, checks every stored
/// functional to 1e-9, recomputes the verdicts and writes diagnose.json.
int Diagnose(const std::filesystem::path& dir, std::ostream& log);

}  // namespace pgeo

#endif  // PGEO_RUN_H_
