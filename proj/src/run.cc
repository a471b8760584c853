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

#include "pgeo/run.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "pgeo/drift.h"
#include "pgeo/functionals.h"
#include "pgeo/gamma_diag.h"
#include "pgeo/optimizer.h"

namespace pgeo {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr double kConsistencyTolerance = 1e-9;
constexpr double kCostIdentityTolerance = 1e-6;

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

json ToJson(const Eigen::VectorXd& v) {
  if (v.size() == 0) return nullptr;
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

template <typename T>
json ToJson(const std::optional<T>& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// Header t,<names...> then one row per node.
std::string NodeTable(const DiscretePath& grid, const Eigen::MatrixXd& columns,
                      const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "t";
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (Eigen::Index i = 0; i < columns.cols(); ++i) {
    out << Num(grid.time(static_cast<int>(i)));
    for (Eigen::Index r = 0; r < columns.rows(); ++r) {
      out << ',' << Num(columns(r, i));
    }
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> Names(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<std::string> CoordinateNames(int n, bool lifted) {
  std::vector<std::string> out = Names("x", lifted ? n - 1 : n);
  if (lifted) out.push_back("s");
  return out;
}

struct DriftColumns {
  double control_cost;
  double control_defect;
  double sampled_control_cost;
  double cost_identity_residual;
  double endpoint_error;
};

std::string ResultsTable(const ConvergenceReport& report,
                         const std::vector<SolveResult>& results,
                         const std::vector<std::string>& coords,
                         const std::vector<DriftColumns>* drift) {
  std::ostringstream out;
  out << "q,energy,length,defect,iterations,converged,gradient_norm,"
         "speed_variation";
  for (const auto& c : coords) out << ",rho0_" << c;
  for (const auto& c : coords) out << ",rho1_" << c;
  if (drift != nullptr) {
    out << ",control_cost,control_defect,sampled_control_cost,"
           "cost_identity_residual,endpoint_error";
  }
  out << '\n';
  for (size_t j = 0; j < report.records.size(); ++j) {
    const ConvergenceRecord& r = report.records[j];
    out << Num(r.q) << ',' << Num(r.energy) << ',' << Num(r.length) << ','
        << Num(r.defect) << ',' << r.iterations << ',' << (r.converged ? 1 : 0)
        << ',' << Num(r.gradient_norm) << ',' << Num(results[j].speed_variation);
    for (const Eigen::VectorXd* rho : {&r.rho0_prev, &r.rho1_prev}) {
      for (size_t c = 0; c < coords.size(); ++c) {
        out << ',' << (rho->size() == 0 ? "nan" : Num((*rho)[c]));
      }
    }
    if (drift != nullptr) {
      const DriftColumns& d = (*drift)[j];
      out << ',' << Num(d.control_cost) << ',' << Num(d.control_defect) << ','
          << Num(d.sampled_control_cost) << ',' << Num(d.cost_identity_residual)
          << ',' << Num(d.endpoint_error);
    }
    out << '\n';
  }
  return out.str();
}

json VerdictJson(const ConvergenceReport& report,
                 const std::optional<CauchyReport>& cauchy, double threshold) {
  json v;
  v["all_converged"] = report.all_converged;
  v["energy_nondecreasing"] = report.energy_nondecreasing;
  v["length_nondecreasing"] = report.length_nondecreasing;
  v["defect_nonincreasing"] = report.defect_nonincreasing;
  v["reference_distance"] = ToJson(report.reference_distance);
  v["within_reference"] = ToJson(report.within_reference);
  v["max_length_ratio"] = ToJson(report.max_length_ratio);
  v["final_gap"] = ToJson(report.final_gap);
  json c;
  if (cauchy.has_value()) {
    c["asserted"] = cauchy->asserted;
    c["holds"] = cauchy->holds;
    c["threshold"] = threshold;
    c["last_rho1"] = cauchy->last_rho1;
    c["rho0"] = json::array();
    c["rho1"] = json::array();
    for (size_t j = 0; j < cauchy->rho0.size(); ++j) {
      c["rho0"].push_back(ToJson(cauchy->rho0[j]));
      c["rho1"].push_back(ToJson(cauchy->rho1[j]));
    }
  }
  v["cauchy"] = cauchy.has_value() ? c : json(nullptr);
  json decay = json::array();
  for (double d : report.defect_decay) {
    decay.push_back(std::isfinite(d) ? json(d) : json(nullptr));
  }
  v["defect_decay"] = decay;
  return v;
}

json RecordsJson(const ConvergenceReport& report,
                 const std::vector<SolveResult>& results) {
  json out = json::array();
  for (size_t j = 0; j < report.records.size(); ++j) {
    const ConvergenceRecord& r = report.records[j];
    out.push_back({{"q", r.q},
                   {"energy", r.energy},
                   {"length", r.length},
                   {"defect", r.defect},
                   {"iterations", r.iterations},
                   {"converged", r.converged},
                   {"termination", std::string(ToString(results[j].termination))},
                   {"gradient_norm", r.gradient_norm},
                   {"speed_variation", results[j].speed_variation},
                   {"rho0_prev", ToJson(r.rho0_prev)},
                   {"rho1_prev", ToJson(r.rho1_prev)}});
  }
  return out;
}

json BracketJson(const SubRiemannianStructure& s, const Point& p) {
  try {
    const BracketCertificate c = ValidateBracketGenerating(s, p, s.dimension());
    return {{"generated_rank", c.generated_rank},
            {"depth_reached", c.depth_reached},
            {"verified", c.verified}};
  } catch (const std::exception& e) {
    return {{"error", e.what()}};
  }
}

json RunJson(const ProblemSpec& spec, const Problem& problem,
             const std::string& mode, double wall_seconds) {
  return {{"problem", problem.name},
          {"mode", mode},
          {"dimension", problem.structure.dimension()},
          {"rank", problem.structure.rank()},
          {"start", ToJson(problem.start)},
          {"end", ToJson(problem.end)},
          {"grid_size", spec.solver.grid_size},
          {"schedule",
           {{"q_start", spec.schedule.q_start},
            {"ratio", spec.schedule.ratio},
            {"steps", spec.schedule.steps}}},
          {"gradient_tolerance", spec.solver.gradient_tolerance},
          {"max_iterations", spec.solver.max_iterations},
          {"perturbation", problem.perturbation},
          {"unique_limit", problem.unique_limit},
          {"solver_version", std::string(kVersion)},
          {"wall_time_seconds", wall_seconds}};
}

void PrepareDir(const fs::path& dir, const ProblemSpec& spec) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory " + dir.string() + ": " +
                      ec.message());
  }
  WriteFile(dir / "config.ini", spec.source);
}

void LogStep(std::ostream& log, const SolveResult& r) {
  log << "q=" << Short(r.q) << " energy=" << Num(r.energy)
      << " length=" << Num(r.length) << " defect=" << Short(r.defect)
      << " iterations=" << r.iterations << ' ' << ToString(r.termination)
      << '\n';
}

std::optional<CauchyReport> Cauchy(const std::vector<SolveResult>& results,
                                   bool unique, double threshold) {
  if (results.size() < 2) return std::nullopt;
  return MinimizerCauchyReport(results, unique, threshold);
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------------------
// Reading stored runs.

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int Column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw std::runtime_error("missing column " + name);
  }
};

CsvTable ReadCsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is empty");
  std::stringstream head(line);
  for (std::string cell; std::getline(head, cell, ',');) table.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      char* end = nullptr;
      row.push_back(std::strtod(cell.c_str(), &end));
      if (end == cell.c_str()) {
        throw std::runtime_error("bad number '" + cell + "' in " + path.string());
      }
    }
    if (row.size() != table.header.size()) {
      throw std::runtime_error("ragged row in " + path.string());
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Drops the t column.
DiscretePath ReadPath(const fs::path& path) {
  const CsvTable t = ReadCsv(path);
  Eigen::MatrixXd nodes(static_cast<Eigen::Index>(t.header.size()) - 1,
                        static_cast<Eigen::Index>(t.rows.size()));
  for (size_t i = 0; i < t.rows.size(); ++i) {
    for (size_t c = 1; c < t.header.size(); ++c) {
      nodes(static_cast<Eigen::Index>(c) - 1, static_cast<Eigen::Index>(i)) =
          t.rows[i][c];
    }
  }
  return DiscretePath(std::move(nodes));
}

class Consistency {
 public:
  void Check(const std::string& what, double stored, double recomputed,
             bool relative = true) {
    const double scale = relative ? std::max(1.0, std::abs(stored)) : 1.0;
    const bool both_nan = std::isnan(stored) && std::isnan(recomputed);
    const double diff = std::abs(stored - recomputed);
    if (!both_nan && !(diff <= kConsistencyTolerance * scale)) {
      mismatches_.push_back({{"field", what},
                             {"stored", stored},
                             {"recomputed", recomputed}});
    }
    ++checked_;
  }
  bool ok() const { return mismatches_.empty(); }
  int checked() const { return checked_; }
  const json& mismatches() const { return mismatches_; }

 private:
  json mismatches_ = json::array();
  int checked_ = 0;
};

}  // namespace

std::string QTag(double q) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", q);
  return buf;
}

fs::path ResolveOutputDir(const ProblemSpec& spec, const fs::path& out) {
  if (!out.empty()) return out;
  if (spec.output.has_value() && !spec.output->empty()) return *spec.output;
  const char* root = std::getenv("PGEO_OUTPUT_ROOT");
  const fs::path base = (root != nullptr && *root != '\0') ? root : "pgeo-results";
  return base / spec.problem;
}

int RunSolve(const ProblemSpec& spec, const fs::path& out_dir, std::ostream& log) {
  const Problem problem = Instantiate(spec);
  if (problem.drift.has_value()) {
    throw ConfigError("problem '" + problem.name + "' has a drift; use drift-solve",
                      spec.LineOf("problem"), "problem");
  }
  PrepareDir(out_dir, spec);
  const int n = problem.structure.dimension();
  log << "solve " << problem.name << " N=" << spec.solver.grid_size << " -> "
      << out_dir.string() << '\n';

  const auto t0 = std::chrono::steady_clock::now();
  ContinuationOptions options;
  options.perturbation = problem.perturbation;
  std::vector<SolveResult> results;
  json doc;
  try {
    results = ContinuationSolve(problem.structure, problem.start, problem.end,
                                spec.schedule, spec.solver, options);
  } catch (const GeometryError& e) {
    doc["run"] = RunJson(spec, problem, "solve", Seconds(t0));
    doc["status"] = "failed";
    doc["error"] = e.what();
    WriteFile(out_dir / "report.json", doc.dump(2) + "\n");
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  const double wall = Seconds(t0);

  for (const SolveResult& r : results) {
    LogStep(log, r);
    WriteFile(out_dir / ("path_q" + QTag(r.q) + ".csv"),
              NodeTable(r.path, r.path.nodes(), Names("x", n)));
  }
  const ConvergenceReport report =
      DistanceChainReport(results, problem.reference_distance);
  const auto cauchy = Cauchy(results, problem.unique_limit, spec.cauchy_threshold);
  WriteFile(out_dir / "results.csv",
            ResultsTable(report, results, Names("x", n), nullptr));

  const bool ok = report.all_converged && report.Holds() &&
                  (!cauchy.has_value() || cauchy->holds);
  doc["run"] = RunJson(spec, problem, "solve", wall);
  doc["records"] = RecordsJson(report, results);
  doc["verdicts"] = VerdictJson(report, cauchy, spec.cauchy_threshold);
  doc["bracket"] = {{"start", BracketJson(problem.structure, problem.start)},
                    {"end", BracketJson(problem.structure, problem.end)}};
  doc["status"] = ok ? "ok" : "failed";
  WriteFile(out_dir / "report.json", doc.dump(2) + "\n");
  log << (ok ? "ok" : "FAILED") << " (" << Short(wall) << " s)\n";
  return ok ? kExitOk : kExitFailure;
}

int RunDriftSolve(const ProblemSpec& spec, const fs::path& out_dir,
                  std::ostream& log) {
  const Problem problem = Instantiate(spec);
  const DriftField drift = ResolveDrift(spec, problem);
  const DriftSettings settings = spec.drift.value_or(DriftSettings{});
  PrepareDir(out_dir, spec);
  const int n = problem.structure.dimension();
  log << "drift-solve " << problem.name << " N=" << spec.solver.grid_size
      << " -> " << out_dir.string() << '\n';

  DriftOptions options;
  options.steps_per_unit_time = settings.integrator_steps;
  options.perturbation = problem.perturbation;
  options.endpoint_tolerance = settings.endpoint_tolerance;
  options.free_time = settings.free_time;

  const auto t0 = std::chrono::steady_clock::now();
  DriftSolveResult solved;
  json doc;
  try {
    solved = SolveDriftProblem(problem.structure, drift, problem.start,
                               problem.end, spec.schedule, spec.solver, options);
  } catch (const GeometryError& e) {
    doc["run"] = RunJson(spec, problem, "drift-solve", Seconds(t0));
    doc["status"] = "failed";
    doc["error"] = e.what();
    WriteFile(out_dir / "report.json", doc.dump(2) + "\n");
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  const double wall = Seconds(t0);
  const std::vector<SolveResult> lifted = solved.LiftedResults();

  bool identity_ok = true;
  bool endpoints_ok = true;
  std::vector<DriftColumns> columns;
  json drift_json = json::array();
  for (const DriftStepResult& step : solved.steps) {
    const SolveResult& r = step.lifted;
    LogStep(log, r);
    log << "  control_cost=" << Num(step.control_cost)
        << " control_defect=" << Short(step.control_defect)
        << " identity_residual=" << Short(step.cost_identity_residual) << '\n';
    const std::string tag = QTag(r.q);
    WriteFile(out_dir / ("path_q" + tag + ".csv"),
              NodeTable(r.path, step.trajectory.nodes(), Names("x", n)));
    WriteFile(out_dir / ("lifted_path_q" + tag + ".csv"),
              NodeTable(r.path, r.path.nodes(), CoordinateNames(n + 1, true)));
    WriteFile(out_dir / ("control_q" + tag + ".csv"),
              NodeTable(r.path, step.control_samples, Names("Y", n)));
    if (!options.free_time && r.converged &&
        !(step.cost_identity_residual <= kCostIdentityTolerance)) {
      identity_ok = false;
    }
    endpoints_ok = endpoints_ok && step.endpoint_ok;
    columns.push_back({step.control_cost, step.control_defect,
                       step.sampled_control_cost, step.cost_identity_residual,
                       step.endpoint_error});
    const double lhs = 2.0 * r.energy - 1.0;
    drift_json.push_back(
        {{"q", r.q},
         {"control_cost", step.control_cost},
         {"control_defect", step.control_defect},
         {"sampled_control_cost", step.sampled_control_cost},
         {"cost_identity",
          {{"two_energy_minus_one", lhs},
           {"control_cost_plus_penalty",
            step.control_cost + (r.q - 1.0) * step.control_defect},
           {"relative_residual", options.free_time
                                     ? json(nullptr)
                                     : json(step.cost_identity_residual)}}},
         {"endpoint_error", step.endpoint_error},
         {"time_deviation", step.time_deviation}});
  }

  const ConvergenceReport report = DistanceChainReport(lifted, std::nullopt);
  const auto cauchy = Cauchy(lifted, problem.unique_limit, spec.cauchy_threshold);
  WriteFile(out_dir / "results.csv",
            ResultsTable(report, lifted, CoordinateNames(n + 1, true), &columns));

  const bool ok = report.all_converged && report.Holds() &&
                  (!cauchy.has_value() || cauchy->holds) && identity_ok &&
                  endpoints_ok;
  doc["run"] = RunJson(spec, problem, "drift-solve", wall);
  doc["run"]["integrator_steps"] = options.steps_per_unit_time;
  doc["run"]["free_time"] = options.free_time;
  doc["run"]["lifted_end"] = ToJson(solved.lifted_end);
  doc["records"] = RecordsJson(report, lifted);
  doc["verdicts"] = VerdictJson(report, cauchy, spec.cauchy_threshold);
  doc["verdicts"]["cost_identity_holds"] = identity_ok;
  doc["verdicts"]["endpoints_hold"] = endpoints_ok;
  doc["drift"] = drift_json;
  doc["status"] = ok ? "ok" : "failed";
  WriteFile(out_dir / "report.json", doc.dump(2) + "\n");
  log << (ok ? "ok" : "FAILED") << " (" << Short(wall) << " s)\n";
  return ok ? kExitOk : kExitFailure;
}

int Diagnose(const fs::path& dir, std::ostream& log) {
  ProblemSpec spec;
  std::string mode;
  CsvTable table;
  try {
    spec = LoadProblemSpec(dir / "config.ini");
    std::ifstream in(dir / "report.json");
    if (!in) throw std::runtime_error("cannot read report.json");
    mode = json::parse(in).at("run").at("mode").get<std::string>();
    table = ReadCsv(dir / "results.csv");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const bool drift_mode = mode == "drift-solve";
  const Problem problem = Instantiate(spec);
  std::optional<FlowMap> flow;
  std::optional<SubRiemannianStructure> lifted;
  if (drift_mode) {
    const DriftSettings settings = spec.drift.value_or(DriftSettings{});
    flow.emplace(ResolveDrift(spec, problem), settings.integrator_steps);
    lifted.emplace(BuildLiftedStructure(problem.structure, *flow));
  }
  const SubRiemannianStructure& s = drift_mode ? *lifted : problem.structure;
  const std::vector<std::string> coords = CoordinateNames(s.dimension(), drift_mode);

  Consistency check;
  std::vector<SolveResult> results;
  try {
    for (const auto& row : table.rows) {
      auto col = [&](const std::string& name) { return row[table.Column(name)]; };
      const double q = col("q");
      const std::string tag = QTag(q);
      DiscretePath path =
          ReadPath(dir / ((drift_mode ? "lifted_path_q" : "path_q") + tag + ".csv"));
      const SegmentNorms norms = EvaluateSegments(s, path);
      check.Check("energy@q" + tag, col("energy"), norms.Energy(q));
      check.Check("length@q" + tag, col("length"), norms.Length(q));
      check.Check("defect@q" + tag, col("defect"), norms.Defect());
      check.Check("speed_variation@q" + tag, col("speed_variation"),
                  norms.SpeedVariation(q));
      if (!results.empty()) {
        const Eigen::VectorXd rho0 = SemimetricRho(path, results.back().path, 0);
        const Eigen::VectorXd rho1 = SemimetricRho(path, results.back().path, 1);
        for (size_t c = 0; c < coords.size(); ++c) {
          check.Check("rho0_" + coords[c] + "@q" + tag, col("rho0_" + coords[c]),
                      rho0[static_cast<Eigen::Index>(c)]);
          check.Check("rho1_" + coords[c] + "@q" + tag, col("rho1_" + coords[c]),
                      rho1[static_cast<Eigen::Index>(c)]);
        }
      }
      SolveResult r{.q = q, .path = path};
      r.energy = col("energy");
      r.length = col("length");
      r.defect = col("defect");
      r.iterations = static_cast<int>(col("iterations"));
      r.converged = col("converged") != 0.0;
      r.gradient_norm = col("gradient_norm");
      r.speed_variation = col("speed_variation");
      if (drift_mode) {
        const DriftStepResult step =
            RecoverControl(problem.structure, *flow, r, problem.end);
        check.Check("control_cost@q" + tag, col("control_cost"), step.control_cost);
        check.Check("control_defect@q" + tag, col("control_defect"),
                    step.control_defect);
        check.Check("sampled_control_cost@q" + tag, col("sampled_control_cost"),
                    step.sampled_control_cost);
        check.Check("endpoint_error@q" + tag, col("endpoint_error"),
                    step.endpoint_error, false);
        const DiscretePath gamma = ReadPath(dir / ("path_q" + tag + ".csv"));
        check.Check("trajectory@q" + tag, 0.0,
                    (gamma.nodes() - step.trajectory.nodes())
                        .lpNorm<Eigen::Infinity>(),
                    false);
      }
      results.push_back(std::move(r));
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (results.empty()) {
    log << "error: no results to diagnose\n";
    return kExitUsage;
  }

  const ConvergenceReport report = DistanceChainReport(
      results, drift_mode ? std::nullopt : problem.reference_distance);
  const auto cauchy = Cauchy(results, problem.unique_limit, spec.cauchy_threshold);
  const bool verdicts_ok = report.all_converged && report.Holds() &&
                           (!cauchy.has_value() || cauchy->holds);
  json doc;
  doc["directory"] = dir.string();
  doc["mode"] = mode;
  doc["checked_fields"] = check.checked();
  doc["consistent"] = check.ok();
  doc["mismatches"] = check.mismatches();
  doc["verdicts"] = VerdictJson(report, cauchy, spec.cauchy_threshold);
  try {
    WriteFile(dir / "diagnose.json", doc.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "warning: " << e.what() << '\n';
  }
  log << "checked " << check.checked() << " stored fields: "
      << (check.ok() ? "consistent" : "MISMATCH") << '\n';
  log << "verdicts: " << (verdicts_ok ? "hold" : "FAILED") << '\n';
  return check.ok() && verdicts_ok ? kExitOk : kExitFailure;
}

}  // namespace pgeo
