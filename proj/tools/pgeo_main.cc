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

// Command line front end:
//
//   pgeo list-problems
//   pgeo solve --config run.ini [--out DIR]
//   pgeo drift-solve --config run.ini [--out DIR]
//   pgeo diagnose --results DIR

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pgeo/config.h"
#include "pgeo/problems.h"
#include "pgeo/run.h"

namespace {

void PrintCatalogue() {
  for (const pgeo::CatalogueEntry& e : pgeo::ListProblems()) {
    std::cout << e.name << '\n'
              << "  dimension:   "
              << (e.dimension == 0 ? std::string("n") : std::to_string(e.dimension))
              << (e.has_drift ? " (with drift)" : "") << '\n'
              << "  structure:   " << e.description << '\n'
              << "  endpoints:   " << e.default_endpoints << '\n'
              << "  unique:      " << (e.unique_limit ? "true" : "false") << '\n'
              << "  reference:   " << e.reference << '\n';
  }
}

int RunWithConfig(const std::string& config, const std::string& out, bool drift) {
  try {
    const pgeo::ProblemSpec spec = pgeo::LoadProblemSpec(config);
    const auto dir = pgeo::ResolveOutputDir(spec, out);
    return drift ? pgeo::RunDriftSolve(spec, dir, std::cout)
                 : pgeo::RunSolve(spec, dir, std::cout);
  } catch (const pgeo::ConfigError& e) {
    std::cerr << config << ": " << e.what() << '\n';
    return pgeo::kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-Riemannian geodesics by penalised energy continuation"};
  app.set_version_flag("--version", std::string(pgeo::kVersion));
  app.require_subcommand(1);

  app.add_subcommand("list-problems", "List the built-in problems");

  std::string config;
  std::string out;
  auto* solve = app.add_subcommand("solve", "Continuation solve of a problem");
  solve->add_option("--config", config, "Run specification (INI)")->required();
  solve->add_option("--out", out, "Output directory");

  auto* drift = app.add_subcommand("drift-solve", "Minimum-energy control with drift");
  drift->add_option("--config", config, "Run specification (INI)")->required();
  drift->add_option("--out", out, "Output directory");

  std::string results;
  auto* diagnose = app.add_subcommand("diagnose", "Re-check a finished run");
  diagnose->add_option("--results", results, "Output directory of a run")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pgeo::kExitUsage;
  }

  try {
    if (app.got_subcommand("list-problems")) {
      PrintCatalogue();
      return pgeo::kExitOk;
    }
    if (solve->parsed()) return RunWithConfig(config, out, false);
    if (drift->parsed()) return RunWithConfig(config, out, true);
    if (diagnose->parsed()) return pgeo::Diagnose(results, std::cout);
  } catch (const pgeo::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pgeo::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pgeo::kExitFailure;
  }
  return pgeo::kExitUsage;
}
