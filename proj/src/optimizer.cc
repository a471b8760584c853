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

#include "pgeo/optimizer.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace pgeo {
namespace {

constexpr double kMinStep = 1e-20;
// Curvature condition used when the energy change is lost in rounding.
constexpr double kWolfeCurvature = 0.9;

std::vector<int> FreeCoordinates(const CoordinateMask& free, int n) {
  if (!free.empty() && static_cast<int>(free.size()) != n) {
    throw std::invalid_argument("coordinate mask has " +
                                std::to_string(free.size()) +
                                " entries for dimension " + std::to_string(n));
  }
  std::vector<int> out;
  for (int c = 0; c < n; ++c) {
    if (free.empty() || free[c]) out.push_back(c);
  }
  return out;
}

double FiniteDifferenceStep(double x) { return 1e-5 * (1.0 + std::abs(x)); }

// Second-order information for one segment, restricted to the coordinates
// being optimized. `a` is the segment's first node and `b` its second.
struct SegmentCurvature {
  Eigen::MatrixXd gram;  // g_q at the midpoint
  Eigen::MatrixXd aa;
  Eigen::MatrixXd ab;
  Eigen::MatrixXd bb;
};

enum class Order { kGradient, kGram, kHessian };

// Gradient over all interior coordinates. With Order::kGram also returns the
// g_q Gram matrix at every midpoint, with Order::kHessian the full segment
// Hessian blocks of the discrete energy.
Eigen::VectorXd GradientImpl(const SubRiemannianStructure& s, double q,
                             const DiscretePath& path,
                             const std::vector<int>& coords, Order order,
                             std::vector<SegmentCurvature>* curvature) {
  const int n = path.dimension();
  const int segments = path.segments();
  const double big_n = static_cast<double>(segments);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero((segments - 1) * n);
  if (curvature != nullptr) curvature->resize(segments);

  auto add = [&](int node, const Eigen::VectorXd& g) {
    if (node <= 0 || node >= segments) return;
    grad.segment((node - 1) * n, n) += g;
  };

  const double weight = 1.0 / (2.0 * big_n);
  const int nf = static_cast<int>(coords.size());
  for (int i = 0; i < segments; ++i) {
    const SegmentSample seg = DiscreteVelocity(path, i);
    const Eigen::VectorXd& v = seg.velocity;
    const Projector proj(s, seg.midpoint);
    const HorizontalSplit split = proj.Split(v);
    // u = G_q v; d/dv of (1/2N) v^T G_q v chained through v = N (b - a).
    const Eigen::VectorXd u =
        proj.metric() * (split.horizontal + q * split.vertical);
    const double f0 = v.dot(u);

    // f(m) = v^T G_q(m) v and u(m) = G_q(m) v at shifted midpoints.
    auto sample = [&](const Point& m, Eigen::VectorXd* u_out) {
      const Projector p(s, m);
      const HorizontalSplit sp = p.Split(v);
      const Eigen::VectorXd gv = p.metric() * sp.horizontal;
      const Eigen::VectorXd gw = p.metric() * sp.vertical;
      if (u_out != nullptr) *u_out = gv + q * gw;
      return sp.horizontal.dot(gv) + q * sp.vertical.dot(gw);
    };

    Eigen::VectorXd dm = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd d2m_diag = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd du = Eigen::MatrixXd::Zero(n, n);  // du(:, c) = d u / d m_c
    std::vector<double> steps(n, 0.0);
    Point shifted = seg.midpoint;
    const bool hessian = order == Order::kHessian;
    for (int c : coords) {
      const double h = FiniteDifferenceStep(seg.midpoint[c]);
      steps[c] = h;
      Eigen::VectorXd up;
      Eigen::VectorXd um;
      shifted[c] = seg.midpoint[c] + h;
      const double fp = sample(shifted, hessian ? &up : nullptr);
      shifted[c] = seg.midpoint[c] - h;
      const double fm = sample(shifted, hessian ? &um : nullptr);
      shifted[c] = seg.midpoint[c];
      dm[c] = (fp - fm) / (2.0 * h);
      if (hessian) {
        d2m_diag[c] = (fp - 2.0 * f0 + fm) / (h * h);
        du.col(c) = (up - um) / (2.0 * h);
      }
    }
    // Each endpoint moves the midpoint by half its displacement.
    const Eigen::VectorXd from_mid = 0.5 * weight * dm;
    add(i, from_mid - u);
    add(i + 1, from_mid + u);

    if (curvature == nullptr || order == Order::kGradient) continue;
    SegmentCurvature& out = (*curvature)[i];
    out.gram = proj.PenalizedGram(q);
    if (!hessian) continue;

    // phi(m, v) = v^T G_q(m) v; derivatives restricted to free coordinates.
    Eigen::MatrixXd phi_mm = Eigen::MatrixXd::Zero(nf, nf);
    Eigen::MatrixXd phi_mv = Eigen::MatrixXd::Zero(nf, nf);  // d_m_i d_v_j
    Eigen::MatrixXd phi_vv = Eigen::MatrixXd::Zero(nf, nf);
    for (int a = 0; a < nf; ++a) {
      const int ca = coords[a];
      phi_mm(a, a) = d2m_diag[ca];
      for (int b = 0; b < nf; ++b) {
        const int cb = coords[b];
        phi_mv(a, b) = 2.0 * du(cb, ca);
        phi_vv(a, b) = 2.0 * out.gram(ca, cb);
      }
      for (int b = a + 1; b < nf; ++b) {
        const int cb = coords[b];
        const double ha = steps[ca];
        const double hb = steps[cb];
        double acc = 0.0;
        for (int sa : {1, -1}) {
          for (int sb : {1, -1}) {
            shifted[ca] = seg.midpoint[ca] + sa * ha;
            shifted[cb] = seg.midpoint[cb] + sb * hb;
            acc += sa * sb * sample(shifted, nullptr);
          }
        }
        shifted[ca] = seg.midpoint[ca];
        shifted[cb] = seg.midpoint[cb];
        phi_mm(a, b) = phi_mm(b, a) = acc / (4.0 * ha * hb);
      }
    }
    // d/da = d_m / 2 - N d_v and d/db = d_m / 2 + N d_v.
    const Eigen::MatrixXd cross = 0.5 * big_n * (phi_mv + phi_mv.transpose());
    const Eigen::MatrixXd skew = 0.5 * big_n * (phi_mv - phi_mv.transpose());
    const Eigen::MatrixXd vv = big_n * big_n * phi_vv;
    out.aa = weight * (0.25 * phi_mm - cross + vv);
    out.bb = weight * (0.25 * phi_mm + cross + vv);
    out.ab = weight * (0.25 * phi_mm + skew - vv);
  }
  if (coords.size() != static_cast<size_t>(n)) {
    Eigen::VectorXd masked = Eigen::VectorXd::Zero(grad.size());
    for (int node = 0; node < segments - 1; ++node) {
      for (int c : coords) masked[node * n + c] = grad[node * n + c];
    }
    return masked;
  }
  return grad;
}

// Optimization state over the free interior coordinates.
class PathObjective {
 public:
  PathObjective(const SubRiemannianStructure& s, double q,
                const DiscretePath& base, std::vector<int> coords,
                Preconditioner kind)
      : s_(s), q_(q), base_(base), coords_(std::move(coords)), kind_(kind) {
    n_ = base_.dimension();
    segments_ = base_.segments();
  }

  Eigen::Index size() const {
    return static_cast<Eigen::Index>(segments_ - 1) * coords_.size();
  }

  Eigen::VectorXd Pack(const DiscretePath& path) const {
    Eigen::VectorXd x(size());
    Eigen::Index k = 0;
    for (int node = 1; node < segments_; ++node) {
      for (int c : coords_) x[k++] = path.nodes()(c, node);
    }
    return x;
  }

  DiscretePath Unpack(const Eigen::VectorXd& x) const {
    DiscretePath path = base_;
    Eigen::Index k = 0;
    for (int node = 1; node < segments_; ++node) {
      Point p = base_.node(node);
      for (int c : coords_) p[c] = x[k++];
      path.SetInterior(node, p);
    }
    return path;
  }

  double Energy(const Eigen::VectorXd& x) const {
    return EvaluateSegments(s_, Unpack(x)).Energy(q_);
  }

  // Gradient restricted to the free coordinates; refreshes the
  // preconditioner at x.
  Eigen::VectorXd Gradient(const Eigen::VectorXd& x) {
    std::vector<SegmentCurvature> curvature;
    const Order order = kind_ == Preconditioner::kSegmentHessian
                            ? Order::kHessian
                            : Order::kGram;
    const Eigen::VectorXd full =
        GradientImpl(s_, q_, Unpack(x), coords_, order, &curvature);
    Eigen::VectorXd g(size());
    Eigen::Index k = 0;
    for (int node = 0; node < segments_ - 1; ++node) {
      for (int c : coords_) g[k++] = full[node * n_ + c];
    }
    Factor(curvature);
    return g;
  }

  Eigen::VectorXd Precondition(const Eigen::VectorXd& v) const {
    if (!factor_ok_) return v;
    return llt_.solve(v);
  }

  // True when the last factorization used the unmodified Hessian.
  bool exact_hessian() const { return exact_; }

 private:
  using Sparse = Eigen::SparseMatrix<double>;

  void AddBlock(std::vector<Eigen::Triplet<double>>& triplets, int row_node,
                int col_node, const Eigen::MatrixXd& k) const {
    if (row_node <= 0 || row_node >= segments_ || col_node <= 0 ||
        col_node >= segments_) {
      return;
    }
    const int nf = static_cast<int>(coords_.size());
    for (int a = 0; a < nf; ++a) {
      for (int b = 0; b < nf; ++b) {
        triplets.emplace_back((row_node - 1) * nf + a, (col_node - 1) * nf + b,
                              k(a, b));
      }
    }
  }

  Sparse FrozenMetricMatrix(const std::vector<SegmentCurvature>& curvature) const {
    const int nf = static_cast<int>(coords_.size());
    std::vector<Eigen::Triplet<double>> triplets;
    for (int i = 0; i < segments_; ++i) {
      Eigen::MatrixXd k(nf, nf);
      for (int a = 0; a < nf; ++a) {
        for (int b = 0; b < nf; ++b) {
          k(a, b) = segments_ * curvature[i].gram(coords_[a], coords_[b]);
        }
      }
      AddBlock(triplets, i, i, k);
      AddBlock(triplets, i + 1, i + 1, k);
      AddBlock(triplets, i, i + 1, -k);
      AddBlock(triplets, i + 1, i, -k);
    }
    Sparse m(size(), size());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
  }

  Sparse HessianMatrix(const std::vector<SegmentCurvature>& curvature) const {
    std::vector<Eigen::Triplet<double>> triplets;
    for (int i = 0; i < segments_; ++i) {
      const SegmentCurvature& c = curvature[i];
      AddBlock(triplets, i, i, c.aa);
      AddBlock(triplets, i + 1, i + 1, c.bb);
      AddBlock(triplets, i, i + 1, c.ab);
      AddBlock(triplets, i + 1, i, c.ab.transpose());
    }
    Sparse m(size(), size());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
  }

  bool TryFactor(const Sparse& m) {
    if (!pattern_ready_) {
      llt_.analyzePattern(m);
      pattern_ready_ = true;
    }
    llt_.factorize(m);
    return llt_.info() == Eigen::Success;
  }

  void Factor(const std::vector<SegmentCurvature>& curvature) {
    const Sparse frozen = FrozenMetricMatrix(curvature);
    exact_ = false;
    if (kind_ == Preconditioner::kSegmentHessian) {
      const Sparse hessian = HessianMatrix(curvature);
      if (TryFactor(hessian)) {
        exact_ = true;
        factor_ok_ = true;
        return;
      }
      // Indefinite: shift towards the frozen-metric matrix until positive.
      for (double tau = 1e-4; tau <= 1e4; tau *= 10.0) {
        if (TryFactor(hessian + tau * frozen)) {
          factor_ok_ = true;
          return;
        }
      }
    }
    factor_ok_ = TryFactor(frozen);
  }

  const SubRiemannianStructure& s_;
  double q_;
  const DiscretePath& base_;
  std::vector<int> coords_;
  Preconditioner kind_;
  int n_ = 0;
  int segments_ = 0;
  Eigen::SimplicialLLT<Sparse, Eigen::Lower, Eigen::NaturalOrdering<int>> llt_;
  bool pattern_ready_ = false;
  bool factor_ok_ = false;
  bool exact_ = false;
};

}  // namespace

void SolverConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("solver config: " + what);
  };
  if (max_iterations < 1) fail("max_iterations must be positive");
  if (!(gradient_tolerance > 0.0)) fail("gradient_tolerance must be positive");
  if (!(initial_step > 0.0)) fail("initial_step must be positive");
  if (!(backtracking_ratio > 0.0 && backtracking_ratio < 1.0)) {
    fail("backtracking_ratio must lie in (0, 1)");
  }
  if (!(sufficient_decrease > 0.0 && sufficient_decrease <= 0.5)) {
    fail("sufficient_decrease must lie in (0, 0.5]");
  }
  if (memory < 0) fail("memory must be non-negative");
  if (grid_size < 2) fail("grid_size must be at least 2");
}

void ContinuationSchedule::Validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("schedule: " + what);
  };
  if (!std::isfinite(q_start) || q_start < 1.0) fail("q_start must be >= 1");
  if (!std::isfinite(ratio) || ratio <= 1.0) fail("ratio must be > 1");
  if (steps < 1) fail("steps must be >= 1");
  if (!std::isfinite(q_start * std::pow(ratio, steps - 1))) {
    fail("final q is not finite");
  }
}

std::vector<double> ContinuationSchedule::Values() const {
  Validate();
  std::vector<double> out;
  double q = q_start;
  for (int j = 0; j < steps; ++j) {
    out.push_back(q);
    q *= ratio;
  }
  return out;
}

std::string_view ToString(Termination t) {
  switch (t) {
    case Termination::kConverged:
      return "converged";
    case Termination::kMaxIterations:
      return "max_iterations";
    case Termination::kStepUnderflow:
      return "step_underflow";
  }
  return "unknown";
}

Eigen::VectorXd EnergyGradient(const SubRiemannianStructure& s,
                               const PenaltyParameter& q,
                               const DiscretePath& path,
                               const CoordinateMask& free) {
  return GradientImpl(s, q.value(), path,
                      FreeCoordinates(free, path.dimension()), Order::kGradient,
                      nullptr);
}

SolveResult MinimizeEnergy(const SubRiemannianStructure& s,
                           const PenaltyParameter& q,
                           const DiscretePath& initial,
                           const SolverConfig& config,
                           const CoordinateMask& free) {
  config.Validate();
  if (initial.dimension() != s.dimension()) {
    throw std::invalid_argument("initial path dimension does not match the "
                                "structure");
  }
  PathObjective objective(s, q.value(), initial,
                          FreeCoordinates(free, initial.dimension()),
                          config.preconditioner);

  Eigen::VectorXd x = objective.Pack(initial);
  double energy = objective.Energy(x);
  Eigen::VectorXd grad = objective.Gradient(x);

  std::deque<Eigen::VectorXd> s_hist;
  std::deque<Eigen::VectorXd> y_hist;
  std::deque<double> rho_hist;

  SolveResult result{.q = q.value(), .path = initial};
  if (config.record_history) result.energy_history.push_back(energy);

  auto grad_norm = [](const Eigen::VectorXd& g) {
    return g.size() == 0 ? 0.0 : g.lpNorm<Eigen::Infinity>();
  };
  auto converged = [&](double e, const Eigen::VectorXd& g) {
    return grad_norm(g) <= config.gradient_tolerance * (1.0 + std::abs(e));
  };

  int iter = 0;
  result.termination = Termination::kMaxIterations;
  while (true) {
    if (converged(energy, grad)) {
      result.termination = Termination::kConverged;
      break;
    }
    if (iter >= config.max_iterations) break;

    // Two-loop recursion with the frozen-metric Hessian as initial matrix.
    Eigen::VectorXd d = grad;
    std::vector<double> alpha(s_hist.size());
    for (int j = static_cast<int>(s_hist.size()) - 1; j >= 0; --j) {
      alpha[j] = rho_hist[j] * s_hist[j].dot(d);
      d -= alpha[j] * y_hist[j];
    }
    d = objective.Precondition(d);
    for (size_t j = 0; j < s_hist.size(); ++j) {
      const double beta = rho_hist[j] * y_hist[j].dot(d);
      d += (alpha[j] - beta) * s_hist[j];
    }
    d = -d;
    double slope = grad.dot(d);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -objective.Precondition(grad);
      slope = grad.dot(d);
      if (!(slope < 0.0)) {
        d = -grad;
        slope = grad.dot(d);
      }
    }

    double step = config.initial_step;
    bool accepted = false;
    Eigen::VectorXd x_new;
    Eigen::VectorXd grad_new;
    double energy_new = energy;
    bool have_grad_new = false;
    while (step >= kMinStep) {
      x_new = x + step * d;
      have_grad_new = false;
      try {
        energy_new = objective.Energy(x_new);
      } catch (const GeometryError&) {
        energy_new = std::numeric_limits<double>::infinity();
      }
      if (std::isfinite(energy_new)) {
        if (energy_new <= energy + config.sufficient_decrease * step * slope) {
          accepted = true;
          break;
        }
        // The Armijo test is meaningless once the predicted decrease drops
        // below the rounding level of the energy; fall back to the slope.
        const double noise =
            16.0 * std::numeric_limits<double>::epsilon() * std::abs(energy);
        if (energy_new <= energy && energy - energy_new <= noise) {
          grad_new = objective.Gradient(x_new);
          have_grad_new = true;
          const double slope_new = grad_new.dot(d);
          if (slope_new >= kWolfeCurvature * slope &&
              slope_new <= (2.0 * config.sufficient_decrease - 1.0) * slope) {
            accepted = true;
            break;
          }
        }
      }
      step *= config.backtracking_ratio;
    }
    if (!accepted) {
      result.termination = Termination::kStepUnderflow;
      // Restore the preconditioner for the current point.
      grad = objective.Gradient(x);
      break;
    }
    if (!have_grad_new) grad_new = objective.Gradient(x_new);
    ++iter;

    if (config.memory > 0) {
      Eigen::VectorXd sk = x_new - x;
      Eigen::VectorXd yk = grad_new - grad;
      const double sy = sk.dot(yk);
      if (sy > 1e-12 * sk.norm() * yk.norm()) {
        s_hist.push_back(std::move(sk));
        y_hist.push_back(std::move(yk));
        rho_hist.push_back(1.0 / sy);
        if (static_cast<int>(s_hist.size()) > config.memory) {
          s_hist.pop_front();
          y_hist.pop_front();
          rho_hist.pop_front();
        }
      }
    }
    x = std::move(x_new);
    grad = std::move(grad_new);
    energy = energy_new;
    if (config.record_history) result.energy_history.push_back(energy);
  }

  result.path = objective.Unpack(x);
  const SegmentNorms norms = EvaluateSegments(s, result.path);
  result.energy = norms.Energy(q.value());
  result.length = norms.Length(q.value());
  result.defect = norms.Defect();
  result.speed_variation = norms.SpeedVariation(q.value());
  result.iterations = iter;
  result.gradient_norm = grad_norm(grad);
  result.converged = converged(result.energy, grad);
  if (result.converged) result.termination = Termination::kConverged;
  return result;
}

DiscretePath PerturbPath(const DiscretePath& path, double amplitude,
                         const CoordinateMask& free) {
  const std::vector<int> coords = FreeCoordinates(free, path.dimension());
  DiscretePath out = path;
  if (amplitude == 0.0) return out;
  for (int i = 1; i < path.segments(); ++i) {
    Point p = path.node(i);
    const double t = path.time(i);
    for (int c : coords) {
      p[c] += amplitude * std::sin((c + 1) * std::numbers::pi * t);
    }
    out.SetInterior(i, p);
  }
  return out;
}

std::vector<SolveResult> ContinuationSolve(const SubRiemannianStructure& s,
                                           const Point& start,
                                           const Point& end,
                                           const ContinuationSchedule& schedule,
                                           const SolverConfig& config,
                                           const ContinuationOptions& options) {
  const std::vector<double> qs = schedule.Values();
  config.Validate();
  DiscretePath current = options.initial.has_value()
                             ? *options.initial
                             : DiscretePath::Chord(start, end, config.grid_size);
  if (current.start() != start || current.end() != end) {
    throw std::invalid_argument("initial path endpoints differ from the "
                                "problem endpoints");
  }
  std::vector<SolveResult> results;
  results.reserve(qs.size());
  for (double q : qs) {
    const DiscretePath seed =
        PerturbPath(current, options.perturbation, options.free);
    results.push_back(
        MinimizeEnergy(s, PenaltyParameter(q), seed, config, options.free));
    current = results.back().path;
  }
  return results;
}

DiscretePath ConstantSpeedReparametrize(const SubRiemannianStructure& s,
                                        const PenaltyParameter& q,
                                        const DiscretePath& path) {
  const int segments = path.segments();
  const SegmentNorms norms = EvaluateSegments(s, path);
  const Eigen::VectorXd seg_len =
      (norms.horizontal + q.value() * norms.vertical).cwiseSqrt() / segments;
  std::vector<double> cumulative(segments + 1, 0.0);
  for (int i = 0; i < segments; ++i) {
    cumulative[i + 1] = cumulative[i] + seg_len[i];
  }
  const double total = cumulative.back();
  if (!(total > 0.0)) {
    throw std::invalid_argument("cannot reparametrize a zero-length path");
  }
  DiscretePath out = path;
  int seg = 0;
  for (int k = 1; k < segments; ++k) {
    const double target = total * k / segments;
    while (seg < segments - 1 && cumulative[seg + 1] < target) ++seg;
    const double frac =
        seg_len[seg] > 0.0
            ? std::clamp((target - cumulative[seg]) / seg_len[seg], 0.0, 1.0)
            : 0.0;
    const Point a = path.node(seg);
    const Point b = path.node(seg + 1);
    out.SetInterior(k, a + frac * (b - a));
  }
  return out;
}

}  // namespace pgeo
