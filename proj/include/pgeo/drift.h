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

#ifndef PGEO_DRIFT_H_
#define PGEO_DRIFT_H_

// Control systems with drift, gamma' = X(t, gamma) + Y with Y in D, reduced
// to a geodesic problem on M x R by moving to the frame of the drift's flow:
// gamma(t) = phi_t(zeta(t)), where zeta is horizontal for the lifted
// structure
//
//   h = Phi^T g(phi_s(p)) Phi  (+)  ds^2,
//   E = Phi^{-1} D(phi_s(p))   (+)  span{d/ds},
//
// with Phi = d(phi_s) at p.

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "pgeo/functionals.h"
#include "pgeo/geometry.h"
#include "pgeo/optimizer.h"

namespace pgeo {

class FlowError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class DriftField {
 public:
  using Eval = std::function<Tangent(double t, const Point& p)>;
  using JacobianEval = std::function<Eigen::MatrixXd(double t, const Point& p)>;

  /// Without `jacobian`, dX/dp is taken by central differences of `eval`.
  DriftField(int dimension, Eval eval, JacobianEval jacobian = nullptr);

  static DriftField Zero(int dimension);
  static DriftField Constant(const Tangent& c);
  /// X(t, p) = A p.
  static DriftField Linear(const Eigen::MatrixXd& a);

  int dimension() const { return dimension_; }
  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_); }

  Tangent operator()(double t, const Point& p) const;
  Eigen::MatrixXd Jacobian(double t, const Point& p) const;

 private:
  int dimension_;
  Eval eval_;
  JacobianEval jacobian_;
};

struct FlowSample {
  Point image;
  Eigen::MatrixXd jacobian;
};

/// Classical RK4 on p' = X(t, p) together with Phi' = (dX/dp) Phi from
/// Phi(0) = I, `steps` equal steps over [0, t]. Throws FlowError on a
/// non-finite state.
FlowSample IntegrateFlow(const DriftField& drift, const Point& p, double t,
                         int steps);

class FlowMap {
 public:
  static constexpr int kDefaultStepsPerUnitTime = 100;

  explicit FlowMap(DriftField drift,
                   int steps_per_unit_time = kDefaultStepsPerUnitTime);

  const DriftField& drift() const { return drift_; }
  int steps_per_unit_time() const { return steps_per_unit_time_; }
  int dimension() const { return drift_.dimension(); }

  /// (phi(t, p), Phi(t, p)) using ceil(m |t|) steps (at least one).
  FlowSample operator()(double t, const Point& p) const;
  Point Image(double t, const Point& p) const { return (*this)(t, p).image; }

  /// Solves phi(t, z) = y for z by Newton's method on the forward flow.
  /// Throws FlowError if it does not converge.
  Point Preimage(double t, const Point& y) const;

 private:
  DriftField drift_;
  int steps_per_unit_time_;
};

using ControlField = std::function<Tangent(double t, const Point& p)>;

/// Phi(t, p)^{-1} Y(t, phi(t, p)). Throws FlowError if Phi is singular.
Tangent PullbackControl(const FlowMap& flow, const ControlField& y, double t,
                        const Point& p);

/// Structure of dimension n + 1 over (p, s); see the file comment.
/// Evaluations throw FlowError where Phi is singular.
SubRiemannianStructure BuildLiftedStructure(const SubRiemannianStructure& s,
                                            const FlowMap& flow);
SubRiemannianStructure BuildLiftedStructure(
    const SubRiemannianStructure& s, const DriftField& drift,
    int steps_per_unit_time = FlowMap::kDefaultStepsPerUnitTime);

struct DriftOptions {
  int steps_per_unit_time = FlowMap::kDefaultStepsPerUnitTime;
  /// Deflection of the lifted start paths, see ContinuationOptions.
  double perturbation = 0.0;
  /// Allowed |gamma(1) - y|_inf.
  double endpoint_tolerance = 1e-8;
  /// Optimize the s-coordinate too instead of pinning s(t_i) = t_i.
  /// Experimental; the cost identity is then not checked.
  bool free_time = false;
};

struct DriftStepResult {
  /// Lifted solve on M x R.
  SolveResult lifted;
  /// gamma(t_i) = phi(s_i, zeta_i).
  DiscretePath trajectory;
  /// Y(t_i) = gamma'(t_i) - X(t_i, gamma(t_i)), columns over the grid nodes;
  /// gamma' by second-order differences.
  Eigen::MatrixXd control_samples;

  /// Midpoint rule for int g(Y, Y) and int g(P^perp Y, P^perp Y) with
  /// Y = Phi zeta' evaluated at segment midpoints.
  double control_cost = 0.0;
  double control_defect = 0.0;
  /// Trapezoidal int g(Y, Y) from control_samples.
  double sampled_control_cost = 0.0;

  /// |(2 E_lifted - 1) - (control_cost + (q - 1) control_defect)| relative
  /// to max(1, |2 E_lifted - 1|); NaN with free_time.
  double cost_identity_residual = 0.0;
  double endpoint_error = 0.0;
  bool endpoint_ok = true;
  /// max_i |s_i - t_i|; zero when s is pinned.
  double time_deviation = 0.0;
};

struct DriftSolveResult {
  Point lifted_start;
  Point lifted_end;
  std::vector<DriftStepResult> steps;

  std::vector<SolveResult> LiftedResults() const;
};

/// Continuation on the lifted structure between (x, 0) and
/// (phi_1^{-1}(y), 1), then recovery of trajectory and control per q.
DriftSolveResult SolveDriftProblem(const SubRiemannianStructure& s,
                                   const DriftField& drift, const Point& x,
                                   const Point& y,
                                   const ContinuationSchedule& schedule,
                                   const SolverConfig& config,
                                   const DriftOptions& options = {});

/// Recovers trajectory, control and cost checks from a lifted solve.
DriftStepResult RecoverControl(const SubRiemannianStructure& s,
                               const FlowMap& flow, const SolveResult& lifted,
                               const Point& y, bool pinned_time = true);

}  // namespace pgeo

#endif  // PGEO_DRIFT_H_
