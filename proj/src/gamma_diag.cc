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

#include "pgeo/gamma_diag.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/QR>

namespace pgeo {

AffineFit PointwiseAffineCheck(const SubRiemannianStructure& s,
                               const DiscretePath& path,
                               const std::vector<double>& q_list) {
  if (q_list.size() < 3 ||
      std::set<double>(q_list.begin(), q_list.end()).size() != q_list.size()) {
    throw std::invalid_argument("affine check needs at least 3 distinct q");
  }
  const SegmentNorms norms = EvaluateSegments(s, path);
  const Eigen::Index m = static_cast<Eigen::Index>(q_list.size());
  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd energy(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    PenaltyParameter q(q_list[i]);
    design(i, 0) = 1.0;
    design(i, 1) = q.value();
    energy[i] = norms.Energy(q.value());
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(energy);
  AffineFit fit{coef[0], coef[1], 0.0};
  fit.max_residual = (design * coef - energy).lpNorm<Eigen::Infinity>();
  return fit;
}

double RecoverySequenceCheck(const SubRiemannianStructure& s,
                             const DiscretePath& horizontal_path,
                             const std::vector<double>& q_list,
                             double horizontal_tol) {
  const FunctionalValue limit = LimitEnergy(s, horizontal_path, horizontal_tol);
  if (!limit.is_finite()) {
    throw PreconditionError(
        "recovery check needs a path horizontal within the tolerance");
  }
  const SegmentNorms norms = EvaluateSegments(s, horizontal_path);
  double worst = 0.0;
  for (double q : q_list) {
    worst = std::max(worst,
                     std::abs(norms.Energy(PenaltyParameter(q).value()) -
                              limit.value()));
  }
  return worst;
}

bool ConvergenceReport::Holds() const {
  return energy_nondecreasing && length_nondecreasing &&
         defect_nonincreasing && within_reference.value_or(true);
}

ConvergenceReport DistanceChainReport(const std::vector<SolveResult>& results,
                                      std::optional<double> reference_distance,
                                      const ChainTolerances& tol) {
  ConvergenceReport report;
  report.reference_distance = reference_distance;
  for (size_t j = 0; j < results.size(); ++j) {
    const SolveResult& r = results[j];
    ConvergenceRecord rec{r.q,          r.energy,    r.length,
                          r.defect,     r.iterations, r.converged,
                          r.gradient_norm, {},        {}};
    if (j > 0 && results[j - 1].path.segments() == r.path.segments()) {
      rec.rho0_prev = SemimetricRho(r.path, results[j - 1].path, 0);
      rec.rho1_prev = SemimetricRho(r.path, results[j - 1].path, 1);
    }
    report.all_converged = report.all_converged && r.converged;
    report.records.push_back(std::move(rec));
  }
  std::stable_sort(report.records.begin(), report.records.end(),
                   [](const ConvergenceRecord& a, const ConvergenceRecord& b) {
                     return a.q < b.q;
                   });

  const auto& rec = report.records;
  for (size_t j = 1; j < rec.size(); ++j) {
    const auto& prev = rec[j - 1];
    const auto& cur = rec[j];
    if (cur.energy < prev.energy - tol.rounding * (1.0 + std::abs(prev.energy))) {
      report.energy_nondecreasing = false;
    }
    if (cur.length < prev.length - tol.length) {
      report.length_nondecreasing = false;
    }
    if (cur.defect > prev.defect + tol.rounding) {
      report.defect_nonincreasing = false;
    }
    report.defect_decay.push_back(cur.defect > 0.0
                                      ? prev.defect / cur.defect
                                      : std::numeric_limits<double>::infinity());
  }

  if (reference_distance.has_value() && !rec.empty()) {
    const double d = *reference_distance;
    double max_length = 0.0;
    for (const auto& r : rec) max_length = std::max(max_length, r.length);
    report.max_length_ratio = d > 0.0 ? max_length / d : 0.0;
    report.within_reference = max_length <= d * (1.0 + tol.reference);
    report.final_gap = d - rec.back().length;
  }
  return report;
}

CauchyReport MinimizerCauchyReport(const std::vector<SolveResult>& results,
                                   bool unique_limit, double threshold) {
  if (results.size() < 2) {
    throw std::invalid_argument("Cauchy report needs at least two minimizers");
  }
  CauchyReport report;
  for (size_t j = 1; j < results.size(); ++j) {
    report.rho0.push_back(SemimetricRho(results[j].path, results[j - 1].path, 0));
    report.rho1.push_back(SemimetricRho(results[j].path, results[j - 1].path, 1));
  }
  report.last_rho1 = report.rho1.back().lpNorm<Eigen::Infinity>();
  report.asserted = unique_limit;
  report.holds = !unique_limit || report.last_rho1 <= threshold;
  return report;
}

}  // namespace pgeo
