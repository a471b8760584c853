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

#include "pgeo/drift.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace pgeo {
namespace {

// Reciprocal condition below which Phi counts as singular.
constexpr double kMinJacobianRcond = 1e-12;

Eigen::PartialPivLU<Eigen::MatrixXd> FactorJacobian(const Eigen::MatrixXd& j) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(j);
  if (!(lu.rcond() > kMinJacobianRcond)) {
    throw FlowError("flow Jacobian is singular");
  }
  return lu;
}

}  // namespace

DriftField::DriftField(int dimension, Eval eval, JacobianEval jacobian)
    : dimension_(dimension),
      eval_(std::move(eval)),
      jacobian_(std::move(jacobian)) {
  if (dimension < 1) throw std::invalid_argument("drift dimension must be >= 1");
  if (!eval_) throw std::invalid_argument("drift needs an evaluation function");
}

DriftField DriftField::Zero(int dimension) {
  return DriftField(
      dimension,
      [dimension](double, const Point&) { return Tangent::Zero(dimension); },
      [dimension](double, const Point&) {
        return Eigen::MatrixXd::Zero(dimension, dimension);
      });
}

DriftField DriftField::Constant(const Tangent& c) {
  const int n = static_cast<int>(c.size());
  return DriftField(
      n, [c](double, const Point&) { return c; },
      [n](double, const Point&) { return Eigen::MatrixXd::Zero(n, n); });
}

DriftField DriftField::Linear(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("linear drift matrix must be square");
  }
  return DriftField(
      static_cast<int>(a.rows()),
      [a](double, const Point& p) -> Tangent { return a * p; },
      [a](double, const Point&) { return a; });
}

Tangent DriftField::operator()(double t, const Point& p) const {
  Tangent v = eval_(t, p);
  if (v.size() != dimension_) {
    throw std::invalid_argument("drift returned a vector of size " +
                                std::to_string(v.size()));
  }
  return v;
}

Eigen::MatrixXd DriftField::Jacobian(double t, const Point& p) const {
  if (jacobian_) {
    Eigen::MatrixXd j = jacobian_(t, p);
    if (j.rows() != dimension_ || j.cols() != dimension_) {
      throw std::invalid_argument("drift Jacobian has the wrong shape");
    }
    return j;
  }
  Eigen::MatrixXd j(dimension_, dimension_);
  Point probe = p;
  for (int k = 0; k < dimension_; ++k) {
    const double h = 6e-6 * (1.0 + std::abs(p[k]));
    probe[k] = p[k] + h;
    const Tangent plus = (*this)(t, probe);
    probe[k] = p[k] - h;
    const Tangent minus = (*this)(t, probe);
    probe[k] = p[k];
    j.col(k) = (plus - minus) / (2.0 * h);
  }
  return j;
}

FlowSample IntegrateFlow(const DriftField& drift, const Point& p, double t,
                         int steps) {
  if (steps < 1) throw std::invalid_argument("flow needs at least one step");
  if (p.size() != drift.dimension()) {
    throw std::invalid_argument("flow start point has the wrong dimension");
  }
  const int n = drift.dimension();
  const double h = t / steps;
  Point x = p;
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(n, n);
  if (h == 0.0) return {x, phi};
  for (int i = 0; i < steps; ++i) {
    const double t0 = i * h;
    const Tangent k1 = drift(t0, x);
    const Eigen::MatrixXd j1 = drift.Jacobian(t0, x) * phi;
    const Point x2 = x + 0.5 * h * k1;
    const Tangent k2 = drift(t0 + 0.5 * h, x2);
    const Eigen::MatrixXd j2 =
        drift.Jacobian(t0 + 0.5 * h, x2) * (phi + 0.5 * h * j1);
    const Point x3 = x + 0.5 * h * k2;
    const Tangent k3 = drift(t0 + 0.5 * h, x3);
    const Eigen::MatrixXd j3 =
        drift.Jacobian(t0 + 0.5 * h, x3) * (phi + 0.5 * h * j2);
    const Point x4 = x + h * k3;
    const Tangent k4 = drift(t0 + h, x4);
    const Eigen::MatrixXd j4 = drift.Jacobian(t0 + h, x4) * (phi + h * j3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    phi += (h / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
    if (!x.allFinite() || !phi.allFinite()) {
      throw FlowError("flow left the finite range at t = " +
                      std::to_string(t0 + h));
    }
  }
  return {x, phi};
}

FlowMap::FlowMap(DriftField drift, int steps_per_unit_time)
    : drift_(std::move(drift)), steps_per_unit_time_(steps_per_unit_time) {
  if (steps_per_unit_time < 1) {
    throw std::invalid_argument("integrator steps per unit time must be >= 1");
  }
}

FlowSample FlowMap::operator()(double t, const Point& p) const {
  const int steps = std::max(
      1, static_cast<int>(std::ceil(steps_per_unit_time_ * std::abs(t))));
  return IntegrateFlow(drift_, p, t, steps);
}

Point FlowMap::Preimage(double t, const Point& y) const {
  Point z = y;
  const double scale = 1.0 + y.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < 50; ++it) {
    const FlowSample f = (*this)(t, z);
    const Tangent r = f.image - y;
    if (r.lpNorm<Eigen::Infinity>() <= 1e-14 * scale) return z;
    z -= FactorJacobian(f.jacobian).solve(r);
  }
  const Tangent r = Image(t, z) - y;
  if (r.lpNorm<Eigen::Infinity>() <= 1e-12 * scale) return z;
  throw FlowError("Newton iteration for the flow preimage did not converge");
}

Tangent PullbackControl(const FlowMap& flow, const ControlField& y, double t,
                        const Point& p) {
  const FlowSample f = flow(t, p);
  return FactorJacobian(f.jacobian).solve(y(t, f.image));
}

SubRiemannianStructure BuildLiftedStructure(const SubRiemannianStructure& s,
                                            const FlowMap& flow) {
  const int n = s.dimension();
  const int k = s.rank();
  if (flow.dimension() != n) {
    throw std::invalid_argument("drift and structure dimensions differ");
  }
  return SubRiemannianStructure::FromLocalField(
      s.name() + "-lifted", n + 1, k + 1,
      [s, flow, n, k](const Point& ps) {
        const FlowSample f = flow(ps[n], ps.head(n));
        const LocalGeometry base = s.At(f.image);
        const Eigen::MatrixXd m = f.jacobian.transpose() * (base.metric * f.jacobian);
        LocalGeometry out{Eigen::MatrixXd::Zero(n + 1, n + 1),
                          Eigen::MatrixXd::Zero(n + 1, k + 1)};
        out.metric.topLeftCorner(n, n) = 0.5 * (m + m.transpose());
        out.metric(n, n) = 1.0;
        out.frame.topLeftCorner(n, k) = FactorJacobian(f.jacobian).solve(base.frame);
        out.frame(n, k) = 1.0;
        return out;
      });
}

SubRiemannianStructure BuildLiftedStructure(const SubRiemannianStructure& s,
                                            const DriftField& drift,
                                            int steps_per_unit_time) {
  return BuildLiftedStructure(s, FlowMap(drift, steps_per_unit_time));
}

std::vector<SolveResult> DriftSolveResult::LiftedResults() const {
  std::vector<SolveResult> out;
  out.reserve(steps.size());
  for (const auto& step : steps) out.push_back(step.lifted);
  return out;
}

DriftStepResult RecoverControl(const SubRiemannianStructure& s,
                               const FlowMap& flow, const SolveResult& lifted,
                               const Point& y, bool pinned_time) {
  const int n = s.dimension();
  const DiscretePath& zeta = lifted.path;
  if (zeta.dimension() != n + 1) {
    throw std::invalid_argument("lifted path must have dimension n + 1");
  }
  const int segments = zeta.segments();

  Eigen::MatrixXd gamma(n, segments + 1);
  Eigen::VectorXd time(segments + 1);
  double time_deviation = 0.0;
  for (int i = 0; i <= segments; ++i) {
    const Point node = zeta.node(i);
    time[i] = node[n];
    time_deviation = std::max(time_deviation, std::abs(node[n] - zeta.time(i)));
    gamma.col(i) = flow.Image(node[n], node.head(n));
  }

  DriftStepResult out{.lifted = lifted, .trajectory = DiscretePath(gamma)};
  out.time_deviation = time_deviation;
  out.endpoint_error = (gamma.col(segments) - y).lpNorm<Eigen::Infinity>();

  // Second-order differences of gamma on the grid.
  const double inv2dt = 0.5 * segments;
  out.control_samples.resize(n, segments + 1);
  for (int i = 0; i <= segments; ++i) {
    Tangent velocity;
    if (i == 0) {
      velocity = inv2dt * (-3.0 * gamma.col(0) + 4.0 * gamma.col(1) - gamma.col(2));
    } else if (i == segments) {
      velocity = inv2dt * (3.0 * gamma.col(i) - 4.0 * gamma.col(i - 1) +
                           gamma.col(i - 2));
    } else {
      velocity = inv2dt * (gamma.col(i + 1) - gamma.col(i - 1));
    }
    out.control_samples.col(i) =
        velocity - flow.drift()(time[i], gamma.col(i));
  }
  double sampled = 0.0;
  for (int i = 0; i <= segments; ++i) {
    const Tangent yi = out.control_samples.col(i);
    const double w = (i == 0 || i == segments) ? 0.5 : 1.0;
    sampled += w * yi.dot(s.Metric(gamma.col(i)) * yi);
  }
  out.sampled_control_cost = sampled / segments;

  double cost = 0.0;
  double defect = 0.0;
  for (int i = 0; i < segments; ++i) {
    const SegmentSample seg = DiscreteVelocity(zeta, i);
    const FlowSample f = flow(seg.midpoint[n], seg.midpoint.head(n));
    const Tangent control = f.jacobian * seg.velocity.head(n);
    const auto [h, w] = Projector(s, f.image).SquaredNorms(control);
    cost += h + w;
    defect += w;
  }
  out.control_cost = cost / segments;
  out.control_defect = defect / segments;

  if (pinned_time) {
    const double lhs = 2.0 * lifted.energy - 1.0;
    const double rhs = out.control_cost + (lifted.q - 1.0) * out.control_defect;
    out.cost_identity_residual =
        std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
  } else {
    out.cost_identity_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

DriftSolveResult SolveDriftProblem(const SubRiemannianStructure& s,
                                   const DriftField& drift, const Point& x,
                                   const Point& y,
                                   const ContinuationSchedule& schedule,
                                   const SolverConfig& config,
                                   const DriftOptions& options) {
  const int n = s.dimension();
  if (drift.dimension() != n || x.size() != n || y.size() != n) {
    throw std::invalid_argument("drift, endpoints and structure dimensions "
                                "must agree");
  }
  if (!(options.endpoint_tolerance > 0.0)) {
    throw std::invalid_argument("endpoint tolerance must be positive");
  }
  const FlowMap flow(drift, options.steps_per_unit_time);
  DriftSolveResult result;
  result.lifted_start = Point::Zero(n + 1);
  result.lifted_start.head(n) = x;
  result.lifted_end = Point::Ones(n + 1);
  result.lifted_end.head(n) = flow.Preimage(1.0, y);

  const SubRiemannianStructure lifted = BuildLiftedStructure(s, flow);
  ContinuationOptions copt;
  copt.perturbation = options.perturbation;
  copt.free.assign(n + 1, true);
  copt.free[n] = options.free_time;
  const std::vector<SolveResult> solves =
      ContinuationSolve(lifted, result.lifted_start, result.lifted_end,
                        schedule, config, copt);
  for (const SolveResult& r : solves) {
    DriftStepResult step = RecoverControl(s, flow, r, y, !options.free_time);
    step.endpoint_ok = step.endpoint_error <= options.endpoint_tolerance;
    result.steps.push_back(std::move(step));
  }
  return result;
}

}  // namespace pgeo
