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

#ifndef PGEO_FUNCTIONALS_H_
#define PGEO_FUNCTIONALS_H_

#include <functional>

#include <Eigen/Core>

#include "pgeo/geometry.h"

namespace pgeo {

/// A piecewise-linear curve sampled on the uniform grid t_i = i / N with
/// fixed endpoints. Only interior nodes can be modified, so node 0 and node N
/// always equal the recorded start and end bit for bit.
class DiscretePath {
 public:
  /// Columns of `nodes` are the N + 1 grid points. Requires N >= 2 and
  /// finite entries.
  explicit DiscretePath(Eigen::MatrixXd nodes);

  static DiscretePath Chord(const Point& start, const Point& end,
                            int segments);
  /// Samples curve(t_i); the endpoints are curve(0) and curve(1).
  static DiscretePath Sample(const std::function<Point(double)>& curve,
                             int segments);

  int segments() const { return static_cast<int>(nodes_.cols()) - 1; }
  int dimension() const { return static_cast<int>(nodes_.rows()); }
  double time(int i) const { return static_cast<double>(i) / segments(); }

  const Point& start() const { return start_; }
  const Point& end() const { return end_; }
  Point node(int i) const { return nodes_.col(i); }
  const Eigen::MatrixXd& nodes() const { return nodes_; }

  /// Replaces interior node i, 0 < i < N.
  void SetInterior(int i, const Point& p);

 private:
  Eigen::MatrixXd nodes_;
  Point start_;
  Point end_;
};

struct SegmentSample {
  Point midpoint;
  Tangent velocity;
};

/// Midpoint and forward-difference velocity N (x_{i+1} - x_i) of segment i.
SegmentSample DiscreteVelocity(const DiscretePath& path, int i);

/// Per-segment squared g-norms of the horizontal and vertical parts of the
/// discrete velocity, evaluated at segment midpoints. Every functional below
/// is a midpoint-rule sum over these.
struct SegmentNorms {
  Eigen::VectorXd horizontal;
  Eigen::VectorXd vertical;

  double Energy(double q) const;
  double Length(double q) const;
  double Defect() const;
  /// Coefficient of variation of the g_q speed across segments.
  double SpeedVariation(double q) const;
};

SegmentNorms EvaluateSegments(const SubRiemannianStructure& s,
                              const DiscretePath& path);

/// (1 / 2N) sum_i g_q(v_i, v_i) at the midpoints.
double Energy(const SubRiemannianStructure& s, const PenaltyParameter& q,
              const DiscretePath& path);
/// (1 / N) sum_i sqrt(g_q(v_i, v_i)) at the midpoints.
double Length(const SubRiemannianStructure& s, const PenaltyParameter& q,
              const DiscretePath& path);
/// (1 / N) sum_i g(P^perp v_i, P^perp v_i). Satisfies
/// Energy(q2) - Energy(q1) = (q2 - q1) / 2 * defect.
double HorizontalityDefect(const SubRiemannianStructure& s,
                           const DiscretePath& path);

/// A non-negative value or an explicit infinity. Arithmetic on the infinite
/// state is deliberately not offered.
class FunctionalValue {
 public:
  static FunctionalValue Finite(double value);
  static FunctionalValue Infinite() { return FunctionalValue(); }

  bool is_finite() const { return finite_; }
  /// Throws std::logic_error on the infinite marker.
  double value() const;

 private:
  FunctionalValue() = default;
  bool finite_ = false;
  double value_ = 0.0;
};

inline constexpr double kDefaultHorizontalTolerance = 1e-6;

/// The q = 1 energy if the path is horizontal within `horizontal_tol`,
/// otherwise infinite.
FunctionalValue LimitEnergy(const SubRiemannianStructure& s,
                            const DiscretePath& path,
                            double horizontal_tol = kDefaultHorizontalTolerance);
/// Carnot-Caratheodory length under the same horizontality test.
FunctionalValue LimitLength(const SubRiemannianStructure& s,
                            const DiscretePath& path,
                            double horizontal_tol = kDefaultHorizontalTolerance);

/// Discrete L2 distance, per chart coordinate, between the coordinate
/// functions of two paths (order 0, midpoint values) or of their velocities
/// (order 1). Throws std::invalid_argument on mismatched grids.
Eigen::VectorXd SemimetricRho(const DiscretePath& a, const DiscretePath& b,
                              int order);

}  // namespace pgeo

#endif  // PGEO_FUNCTIONALS_H_
