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

#ifndef PGEO_GEOMETRY_H_
#define PGEO_GEOMETRY_H_

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace pgeo {

/// Chart coordinates of a point on the manifold.
using Point = Eigen::VectorXd;
/// Chart components of a tangent vector.
using Tangent = Eigen::VectorXd;

/// Condition number of the frame Gram matrix above which the frame is
/// treated as rank deficient.
inline constexpr double kMaxFrameCondition = 1e8;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the frame spanning the distribution loses rank at a point.
class DegenerateFrameError : public GeometryError {
 public:
  DegenerateFrameError(const Point& point, double condition);

  const Point& point() const { return point_; }
  double condition() const { return condition_; }

 private:
  Point point_;
  double condition_;
};

/// Metric Gram matrix and frame matrix of a structure at one point.
struct LocalGeometry {
  Eigen::MatrixXd metric;  // n x n, symmetric positive definite
  Eigen::MatrixXd frame;   // n x k, columns span the distribution
};

/// A rank-k distribution D with a Riemannian metric g on a single chart of
/// dimension n. Immutable after construction; evaluation is thread-safe as
/// long as the supplied fields are.
class SubRiemannianStructure {
 public:
  using MetricField = std::function<Eigen::MatrixXd(const Point&)>;
  using FrameField = std::function<Eigen::MatrixXd(const Point&)>;
  using LocalField = std::function<LocalGeometry(const Point&)>;

  SubRiemannianStructure(std::string name, int dimension, int rank,
                         MetricField metric, FrameField frame);

  /// For structures whose metric and frame share an expensive intermediate
  /// (e.g. a flow integration) and are cheaper to evaluate together.
  static SubRiemannianStructure FromLocalField(std::string name, int dimension,
                                               int rank, LocalField field);

  const std::string& name() const { return name_; }
  int dimension() const { return dimension_; }
  int rank() const { return rank_; }

  LocalGeometry At(const Point& p) const;
  Eigen::MatrixXd Metric(const Point& p) const { return At(p).metric; }
  Eigen::MatrixXd Frame(const Point& p) const { return At(p).frame; }

 private:
  SubRiemannianStructure(std::string name, int dimension, int rank,
                         LocalField field);

  std::string name_;
  int dimension_;
  int rank_;
  LocalField field_;
};

/// Penalty weight q >= 1 applied to the D-orthogonal part of the metric.
class PenaltyParameter {
 public:
  explicit PenaltyParameter(double q);
  double value() const { return q_; }

 private:
  double q_;
};

/// g-orthogonal decomposition v = horizontal + vertical.
struct HorizontalSplit {
  Tangent horizontal;
  Tangent vertical;
};

/// The g-orthogonal projection onto D at a fixed point. Computes
/// P v = F c with (F^T G F) c = F^T G v.
class Projector {
 public:
  /// Throws DegenerateFrameError if cond(F^T G F) exceeds kMaxFrameCondition
  /// and GeometryError if the metric is not positive definite.
  Projector(const SubRiemannianStructure& s, const Point& p);
  explicit Projector(LocalGeometry local, const Point& p);

  HorizontalSplit Split(const Tangent& v) const;

  /// Returns (g(Pv, Pv), g(P^perp v, P^perp v)).
  std::pair<double, double> SquaredNorms(const Tangent& v) const;

  /// Gram matrix of g_q, i.e. G + (q - 1) (P^perp)^T G P^perp.
  Eigen::MatrixXd PenalizedGram(double q) const;

  const Eigen::MatrixXd& metric() const { return local_.metric; }
  const Eigen::MatrixXd& frame() const { return local_.frame; }

 private:
  LocalGeometry local_;
  Eigen::LLT<Eigen::MatrixXd> frame_gram_;
};

HorizontalSplit ProjectHorizontal(const SubRiemannianStructure& s,
                                  const Point& p, const Tangent& v);

/// g_q(v, w) = g(Pv, Pw) + q g(P^perp v, P^perp w).
double PenalizedMetricEval(const SubRiemannianStructure& s,
                           const PenaltyParameter& q, const Point& p,
                           const Tangent& v, const Tangent& w);

struct BracketCertificate {
  int generated_rank = 0;
  /// First depth whose span has full rank, or max_depth if none did.
  int depth_reached = 0;
  bool verified = false;
};

/// Adjoins iterated brackets [W, X_j] of the frame fields X_j, one depth at a
/// time, and reports the numerical rank of their values at p. Depth 1 is the
/// frame itself. Jacobians are central differences with step
/// 1e-5 (1 + |p|_inf); singular values above 1e-6 sigma_max count.
BracketCertificate ValidateBracketGenerating(const SubRiemannianStructure& s,
                                             const Point& p, int max_depth);

}  // namespace pgeo

#endif  // PGEO_GEOMETRY_H_
