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

// Acceptance run: ten numbered criteria at full desk-scale resolution. Prints
// one PASS or FAIL line per criterion and exits nonzero if any failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "pgeo/drift.h"
#include "pgeo/gamma_diag.h"
#include "pgeo/optimizer.h"
#include "pgeo/problems.h"
#include "pgeo/structures.h"

namespace pgeo {
namespace {

using std::numbers::pi;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double Seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const ContinuationSchedule kSchedule{1.0, 10.0, 5};

Point P3(double x, double y, double z) { return Eigen::Vector3d(x, y, z); }

std::vector<SolveResult> SolveProblem(const Problem& p, int grid = 200) {
  SolverConfig config;
  config.grid_size = grid;
  ContinuationOptions options;
  options.perturbation = p.perturbation;
  return ContinuationSolve(p.structure, p.start, p.end, kSchedule, config, options);
}

// Shared runs, solved once.
struct Runs {
  std::vector<SolveResult> chord;
  std::vector<SolveResult> vertical;
  double vertical_seconds = 0.0;
};

Runs& Shared() {
  static Runs runs = [] {
    Runs r;
    r.chord = SolveProblem(MakeProblem("heisenberg", P3(0, 0, 0), P3(1, 0, 0)));
    const auto t0 = Clock::now();
    r.vertical = SolveProblem(MakeProblem("heisenberg"));
    r.vertical_seconds = Seconds(t0);
    return r;
  }();
  return runs;
}

Verdict AffineIdentity() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> logq(0.0, 4.0);
  const auto h = HeisenbergStructure();
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const DiscretePath path = oracle::RandomPath(rng, 3, 100);
    double q1 = std::pow(10.0, logq(rng));
    double q2 = std::pow(10.0, logq(rng));
    if (q1 > q2) std::swap(q1, q2);
    const double lhs =
        Energy(h, PenaltyParameter(q2), path) - Energy(h, PenaltyParameter(q1), path);
    const double rhs = (q2 - q1) / 2.0 * HorizontalityDefect(h, path);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
  }
  return {worst <= 1e-10, Fmt("50 random paths, max relative residual %.2e", worst)};
}

Verdict GradientCheck() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> logq(0.0, 2.0);
  double worst = 0.0;
  for (const auto& s : {HeisenbergStructure(), MartinetStructure(), EuclideanStructure(3)}) {
    for (int trial = 0; trial < 20; ++trial) {
      const DiscretePath path = oracle::RandomPath(rng, 3, 30);
      const double q = std::pow(10.0, logq(rng));
      const Eigen::VectorXd g = EnergyGradient(s, PenaltyParameter(q), path);
      const Eigen::VectorXd fd = oracle::FiniteDifferenceGradient(s, q, path);
      worst = std::max(worst, (g - fd).lpNorm<Eigen::Infinity>() /
                                  std::max(1.0, fd.lpNorm<Eigen::Infinity>()));
    }
  }
  return {worst <= 1e-5, Fmt("3 structures x 20 paths, max relative error %.2e", worst)};
}

Verdict ChordFixedPoint() {
  const auto& runs = Shared().chord;
  double length_err = 0.0;
  double defect = 0.0;
  bool converged = true;
  for (const SolveResult& r : runs) {
    length_err = std::max(length_err, std::abs(r.length - 1.0));
    defect = std::max(defect, r.defect);
    converged = converged && r.converged;
  }
  return {converged && length_err <= 1e-4 && defect <= 1e-8,
          Fmt("%zu steps converged=%d, max |L-1| %.2e, max defect %.2e", runs.size(),
              converged, length_err, defect)};
}

Verdict CarnotLimit() {
  const Runs& shared = Shared();
  const auto& runs = shared.vertical;
  bool increasing = true;
  double max_length = 0.0;
  for (size_t j = 0; j < runs.size(); ++j) {
    max_length = std::max(max_length, runs[j].length);
    if (j > 0 && !(runs[j].length > runs[j - 1].length)) increasing = false;
  }
  const double final_length = runs.back().length;
  const double defect = runs.back().defect;
  std::ostringstream lengths;
  for (const auto& r : runs) lengths << Fmt("%.6f ", r.length);
  const bool pass = increasing && max_length <= 1.01 && final_length >= 0.95 &&
                    defect <= 1e-3 && shared.vertical_seconds <= 120.0;
  return {pass, Fmt("lengths %sfinal defect %.2e, %.1f s", lengths.str().c_str(), defect,
                    shared.vertical_seconds)};
}

// Counts strict decreases of the minimized energy along the schedule.
int EnergyDrops(const std::vector<SolveResult>& runs) {
  int drops = 0;
  for (size_t j = 1; j < runs.size(); ++j) {
    if (runs[j].energy < runs[j - 1].energy) ++drops;
  }
  return drops;
}

Verdict MonotoneInfima() {
  std::ostringstream detail;
  int total = 0;
  auto record = [&](const std::string& name, const std::vector<SolveResult>& runs) {
    const int drops = EnergyDrops(runs);
    total += drops;
    detail << name << '=' << drops << ' ';
  };
  record("heisenberg-chord", Shared().chord);
  record("heisenberg-vertical", Shared().vertical);
  for (const char* name : {"euclidean-3", "euclidean-6", "martinet"}) {
    record(name, SolveProblem(MakeProblem(name)));
  }
  const Problem chord = MakeProblem("martinet", P3(0, 0, 0), P3(1, 0, 0));
  record("martinet-chord", SolveProblem(chord));
  for (const char* name : {"drift-constant-1d", "drift-linear-2d", "heisenberg-drift"}) {
    const Problem p = MakeProblem(name);
    SolverConfig config;
    DriftOptions options;
    options.perturbation = p.perturbation;
    const DriftSolveResult r =
        SolveDriftProblem(p.structure, *p.drift, p.start, p.end, kSchedule, config, options);
    record(name, r.LiftedResults());
  }
  return {total == 0, "decreases per problem: " + detail.str()};
}

Verdict DriftLq() {
  const Problem p = MakeProblem("drift-linear-2d");
  const Eigen::MatrixXd a = p.drift->Jacobian(0.0, p.start);
  const double oracle_cost = oracle::GramianCost(a, p.start, p.end);
  const DriftSolveResult r = SolveDriftProblem(p.structure, *p.drift, p.start, p.end,
                                               kSchedule, SolverConfig{});
  double worst_rel = 0.0;
  double worst_identity = 0.0;
  for (const DriftStepResult& step : r.steps) {
    worst_rel = std::max(worst_rel, std::abs(step.control_cost - oracle_cost) / oracle_cost);
    worst_identity = std::max(worst_identity, step.cost_identity_residual);
  }
  return {worst_rel <= 0.01 && worst_identity <= 1e-6,
          Fmt("oracle %.9f, final cost %.9f, max relative gap %.2e, identity residual %.2e",
              oracle_cost, r.steps.back().control_cost, worst_rel, worst_identity)};
}

Verdict ZeroDrift() {
  double worst = 0.0;
  for (const char* name : {"euclidean-3", "heisenberg"}) {
    const Problem p = MakeProblem(name);
    const auto base = SolveProblem(p);
    DriftOptions options;
    options.perturbation = p.perturbation;
    const DriftSolveResult lifted =
        SolveDriftProblem(p.structure, DriftField::Zero(p.structure.dimension()), p.start,
                          p.end, kSchedule, SolverConfig{}, options);
    for (size_t j = 0; j < base.size(); ++j) {
      worst = std::max(worst, std::abs(lifted.steps[j].lifted.energy - 0.5 - base[j].energy));
    }
  }
  return {worst <= 1e-8, Fmt("euclidean-3 and heisenberg, max energy gap %.2e", worst)};
}

Verdict Recovery() {
  const std::vector<double> qs = {1.0, 10.0, 100.0, 1e3, 1e4};
  const auto h = HeisenbergStructure();
  const auto m = MartinetStructure();
  std::vector<std::pair<const SubRiemannianStructure*, DiscretePath>> paths;
  paths.push_back({&h, DiscretePath::Chord(P3(0, 0, 0), P3(1, 0, 0), 200)});
  paths.push_back({&h, DiscretePath::Chord(P3(0.5, 0.5, 0), P3(1.5, 1.5, 0), 200)});
  paths.push_back({&h, oracle::HeisenbergLift(
                           [](double t) {
                             return Eigen::Vector2d(std::cos(2 * pi * t) - 1,
                                                    std::sin(2 * pi * t));
                           },
                           200)});
  paths.push_back({&h, oracle::HeisenbergLift(
                           [](double t) { return Eigen::Vector2d(t, t * t - t); }, 200)});
  paths.push_back({&m, DiscretePath::Chord(P3(0, 0, 0), P3(1, 0, 0), 200)});
  paths.push_back({&m, oracle::MartinetLift(
                           [](double t) {
                             return Eigen::Vector2d(t, 0.3 * std::sin(pi * t));
                           },
                           200)});
  for (const SolveResult& r : Shared().chord) paths.push_back({&h, r.path});
  const auto e3 = EuclideanStructure(3);
  std::mt19937_64 rng(108);
  paths.push_back({&e3, oracle::RandomPath(rng, 3, 200)});

  double worst = 0.0;
  for (const auto& [s, path] : paths) {
    worst = std::max(worst, RecoverySequenceCheck(*s, path, qs));
  }
  return {worst <= 1e-10,
          Fmt("%zu horizontal paths, max |J_q - J_inf| %.2e", paths.size(), worst)};
}

Verdict Cauchy() {
  double worst = 0.0;
  auto track = [&](const std::vector<SolveResult>& runs) {
    const CauchyReport c = MinimizerCauchyReport(runs, true);
    for (const auto& rho : c.rho1) worst = std::max(worst, rho.lpNorm<Eigen::Infinity>());
  };
  for (const char* name : {"euclidean-2", "euclidean-3", "euclidean-6"}) {
    track(SolveProblem(MakeProblem(name)));
  }
  track(Shared().chord);
  const CauchyReport vertical = MinimizerCauchyReport(Shared().vertical, false);
  std::ostringstream reported;
  for (const auto& rho : vertical.rho1) {
    reported << Fmt("%.2e ", rho.lpNorm<Eigen::Infinity>());
  }
  return {worst <= 1e-6, Fmt("unique-limit max rho1 %.2e; vertical (reported only) %s",
                             worst, reported.str().c_str())};
}

Verdict Brackets() {
  std::mt19937_64 rng(110);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const auto h = HeisenbergStructure();
  const auto m = MartinetStructure();
  int agree = 0;
  for (int i = 0; i < 10; ++i) {
    const Eigen::Vector3d p(u(rng), u(rng), u(rng));
    const BracketCertificate c = ValidateBracketGenerating(h, p, 3);
    if (c.verified && c.generated_rank == 3 && c.depth_reached == 2 &&
        oracle::HeisenbergBracketDepth(p) == 2) {
      ++agree;
    }
  }
  for (int i = 0; i < 10; ++i) {
    const Eigen::Vector3d p(u(rng), 0.0, u(rng));
    const BracketCertificate c = ValidateBracketGenerating(m, p, 3);
    if (c.verified && c.generated_rank == 3 && c.depth_reached == 3 &&
        oracle::MartinetBracketDepth(p) == 3) {
      ++agree;
    }
  }
  return {agree == 20, Fmt("%d of 20 certificates match the hand-computed brackets", agree)};
}

}  // namespace
}  // namespace pgeo

int main() {
  using pgeo::Verdict;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"affine identity in q", pgeo::AffineIdentity},
      {"gradient vs finite differences", pgeo::GradientCheck},
      {"horizontal chord fixed point", pgeo::ChordFixedPoint},
      {"Carnot-Caratheodory limit", pgeo::CarnotLimit},
      {"monotone infima", pgeo::MonotoneInfima},
      {"drift LQ Gramian oracle", pgeo::DriftLq},
      {"zero-drift reduction", pgeo::ZeroDrift},
      {"recovery-sequence bound", pgeo::Recovery},
      {"semimetric Cauchy behaviour", pgeo::Cauchy},
      {"bracket-generation certificates", pgeo::Brackets},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = pgeo::Clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s  %2zu %-32s %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, v.detail.c_str(), pgeo::Seconds(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
