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

#ifndef PGEO_GAMMA_DIAG_H_
#define PGEO_GAMMA_DIAG_H_

// Computable witnesses of the convergence of penalised minimizers: the exact
// affine q-dependence of the discrete energy, the recovery bound along
// horizontal paths, and the monotone chain of minimized lengths.

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "pgeo/functionals.h"
#include "pgeo/geometry.h"
#include "pgeo/optimizer.h"

namespace pgeo {

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct AffineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double max_residual = 0.0;
};

/// Least-squares line through q -> Energy(q, path). Needs at least three
/// distinct q values.
AffineFit PointwiseAffineCheck(const SubRiemannianStructure& s,
                               const DiscretePath& path,
                               const std::vector<double>& q_list);

/// max over q of |J_q(path) - J_inf(path)| for a path that is horizontal
/// within `horizontal_tol`; throws PreconditionError otherwise.
double RecoverySequenceCheck(const SubRiemannianStructure& s,
                             const DiscretePath& horizontal_path,
                             const std::vector<double>& q_list,
                             double horizontal_tol = kDefaultHorizontalTolerance);

struct ConvergenceRecord {
  double q = 1.0;
  double energy = 0.0;
  double length = 0.0;
  double defect = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  /// Semimetric distances to the previous record's minimizer, per
  /// coordinate; empty for the first record.
  Eigen::VectorXd rho0_prev;
  Eigen::VectorXd rho1_prev;
};

struct ChainTolerances {
  /// Slack allowed in "length_q nondecreasing".
  double length = 1e-9;
  /// Relative slack for energies nondecreasing and absolute slack for
  /// defects nonincreasing; both only absorb rounding.
  double rounding = 1e-12;
  /// length_q <= d_inf (1 + reference) when a reference is given.
  double reference = 0.05;
};

struct ConvergenceReport {
  std::vector<ConvergenceRecord> records;
  bool energy_nondecreasing = true;
  bool length_nondecreasing = true;
  bool defect_nonincreasing = true;
  bool all_converged = true;
  /// defect_j / defect_{j+1}; reported, never asserted.
  std::vector<double> defect_decay;

  std::optional<double> reference_distance;
  /// Set when a reference is given.
  std::optional<bool> within_reference;
  std::optional<double> max_length_ratio;
  /// d_inf - length at the final q.
  std::optional<double> final_gap;

  /// Every verdict that was evaluated holds.
  bool Holds() const;
};

/// Builds the per-q records of one continuation run and checks the monotone
/// chain. Violations are verdicts, not exceptions.
ConvergenceReport DistanceChainReport(
    const std::vector<SolveResult>& results,
    std::optional<double> reference_distance = std::nullopt,
    const ChainTolerances& tol = {});

struct CauchyReport {
  /// Entry j compares minimizer j + 1 with minimizer j.
  std::vector<Eigen::VectorXd> rho0;
  std::vector<Eigen::VectorXd> rho1;
  /// True when the limit is declared unique and the check was applied.
  bool asserted = false;
  /// Max-coordinate rho1 of the final step is below the threshold (always
  /// true when not asserted).
  bool holds = true;
  double last_rho1 = 0.0;
};

/// Semimetric distances between consecutive minimizers. Throws
/// std::invalid_argument on mismatched grids or fewer than two results.
CauchyReport MinimizerCauchyReport(const std::vector<SolveResult>& results,
                                   bool unique_limit, double threshold = 1e-6);

}  // namespace pgeo

#endif  // PGEO_GAMMA_DIAG_H_
