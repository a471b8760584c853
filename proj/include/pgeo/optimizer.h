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

#ifndef PGEO_OPTIMIZER_H_
#define PGEO_OPTIMIZER_H_

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pgeo/functionals.h"
#include "pgeo/geometry.h"

namespace pgeo {

/// Initial inverse-Hessian model of the quasi-Newton iteration.
enum class Preconditioner {
  /// Block tridiagonal Hessian of the energy with g_q frozen at the current
  /// midpoints. Always positive definite.
  kFrozenMetric,
  /// Exact block tridiagonal Hessian of the discrete energy (velocity terms
  /// analytic, midpoint terms by central differences), shifted towards the
  /// frozen-metric matrix when indefinite.
  kSegmentHessian,
};

struct SolverConfig {
  int max_iterations = 5000;
  /// Convergence when |grad|_inf <= gradient_tolerance * (1 + energy).
  double gradient_tolerance = 1e-8;
  double initial_step = 1.0;
  double backtracking_ratio = 0.5;
  /// Armijo constant.
  double sufficient_decrease = 1e-4;
  /// Number of curvature pairs kept; 0 disables quasi-Newton updates and
  /// leaves preconditioned steepest descent.
  int memory = 0;
  Preconditioner preconditioner = Preconditioner::kSegmentHessian;
  int grid_size = 200;
  /// Keep the energy after every accepted iteration in the result.
  bool record_history = false;

  /// Throws std::invalid_argument naming the offending field.
  void Validate() const;
};

/// q_j = q_start * ratio^j for j = 0 .. steps - 1.
struct ContinuationSchedule {
  double q_start = 1.0;
  double ratio = 10.0;
  int steps = 5;

  void Validate() const;
  std::vector<double> Values() const;
};

enum class Termination {
  kConverged,
  kMaxIterations,
  /// No acceptable step above the underflow threshold; the energy could not
  /// be reduced further in floating point.
  kStepUnderflow,
};

std::string_view ToString(Termination t);

struct SolveResult {
  double q = 1.0;
  DiscretePath path;
  double energy = 0.0;
  double length = 0.0;
  double defect = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  /// Coefficient of variation of the discrete g_q speed.
  double speed_variation = 0.0;
  Termination termination = Termination::kMaxIterations;
  /// Energy at the start and after every accepted step, if recorded.
  std::vector<double> energy_history;
};

/// Which chart coordinates are optimized; empty means all of them. Pinned
/// coordinates keep their value at every interior node.
using CoordinateMask = std::vector<bool>;

/// Gradient of Energy with respect to the interior nodes, laid out node by
/// node ((N - 1) * n entries). The velocity dependence is differentiated
/// exactly; the midpoint dependence of g_q by central differences of
/// |Pv|^2 + q |P^perp v|^2. Entries for pinned coordinates are zero.
Eigen::VectorXd EnergyGradient(const SubRiemannianStructure& s,
                               const PenaltyParameter& q,
                               const DiscretePath& path,
                               const CoordinateMask& free = {});

/// Preconditioned descent with backtracking line search and optional
/// limited-memory BFGS corrections on top of the preconditioner (see
/// SolverConfig). Never throws on non-convergence.
SolveResult MinimizeEnergy(const SubRiemannianStructure& s,
                           const PenaltyParameter& q,
                           const DiscretePath& initial,
                           const SolverConfig& config,
                           const CoordinateMask& free = {});

struct ContinuationOptions {
  /// Starting path for the first q; the straight chord if unset.
  std::optional<DiscretePath> initial;
  /// Amplitude a of the symmetry-breaking deflection
  /// a sin((j + 1) pi t) added to free coordinate j of every start path.
  double perturbation = 0.0;
  CoordinateMask free;
};

/// Minimizes J_q for each q of the schedule, warm-starting from the previous
/// minimizer. Non-converged steps are kept and the run continues.
std::vector<SolveResult> ContinuationSolve(
    const SubRiemannianStructure& s, const Point& start, const Point& end,
    const ContinuationSchedule& schedule, const SolverConfig& config,
    const ContinuationOptions& options = {});

/// Adds the deflection described in ContinuationOptions::perturbation.
DiscretePath PerturbPath(const DiscretePath& path, double amplitude,
                         const CoordinateMask& free = {});

/// Resamples the polyline at equal g_q arclength (segment lengths measured at
/// midpoints) onto the same uniform grid. Throws std::invalid_argument for a
/// zero-length path.
DiscretePath ConstantSpeedReparametrize(const SubRiemannianStructure& s,
                                        const PenaltyParameter& q,
                                        const DiscretePath& path);

}  // namespace pgeo

#endif  // PGEO_OPTIMIZER_H_
