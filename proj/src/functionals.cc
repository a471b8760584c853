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

#include "pgeo/functionals.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pgeo {

DiscretePath::DiscretePath(Eigen::MatrixXd nodes) : nodes_(std::move(nodes)) {
  if (nodes_.rows() < 1) {
    throw std::invalid_argument("path dimension must be positive");
  }
  if (nodes_.cols() < 3) {
    throw std::invalid_argument("path needs at least 2 segments");
  }
  if (!nodes_.allFinite()) {
    throw std::invalid_argument("path has non-finite nodes");
  }
  start_ = nodes_.col(0);
  end_ = nodes_.col(nodes_.cols() - 1);
}

DiscretePath DiscretePath::Chord(const Point& start, const Point& end,
                                 int segments) {
  if (start.size() != end.size()) {
    throw std::invalid_argument("chord endpoints have different dimensions");
  }
  if (segments < 2) {
    throw std::invalid_argument("path needs at least 2 segments");
  }
  Eigen::MatrixXd nodes(start.size(), segments + 1);
  for (int i = 0; i <= segments; ++i) {
    const double t = static_cast<double>(i) / segments;
    nodes.col(i) = start + t * (end - start);
  }
  nodes.col(0) = start;
  nodes.col(segments) = end;
  return DiscretePath(std::move(nodes));
}

DiscretePath DiscretePath::Sample(const std::function<Point(double)>& curve,
                                  int segments) {
  if (segments < 2) {
    throw std::invalid_argument("path needs at least 2 segments");
  }
  const Point first = curve(0.0);
  Eigen::MatrixXd nodes(first.size(), segments + 1);
  nodes.col(0) = first;
  for (int i = 1; i < segments; ++i) {
    nodes.col(i) = curve(static_cast<double>(i) / segments);
  }
  nodes.col(segments) = curve(1.0);
  return DiscretePath(std::move(nodes));
}

void DiscretePath::SetInterior(int i, const Point& p) {
  if (i <= 0 || i >= segments()) {
    throw std::out_of_range("node " + std::to_string(i) +
                            " is not an interior node");
  }
  if (p.size() != dimension() || !p.allFinite()) {
    throw std::invalid_argument("interior node must be finite with matching "
                                "dimension");
  }
  nodes_.col(i) = p;
}

SegmentSample DiscreteVelocity(const DiscretePath& path, int i) {
  if (i < 0 || i >= path.segments()) {
    throw std::out_of_range("segment index " + std::to_string(i) +
                            " outside [0, " + std::to_string(path.segments()) +
                            ")");
  }
  const auto a = path.nodes().col(i);
  const auto b = path.nodes().col(i + 1);
  return {0.5 * (a + b), path.segments() * (b - a)};
}

double SegmentNorms::Energy(double q) const {
  const double n = static_cast<double>(horizontal.size());
  return (horizontal.sum() + q * vertical.sum()) / (2.0 * n);
}

double SegmentNorms::Length(double q) const {
  const double n = static_cast<double>(horizontal.size());
  return (horizontal + q * vertical).cwiseSqrt().sum() / n;
}

double SegmentNorms::Defect() const {
  return vertical.sum() / static_cast<double>(vertical.size());
}

double SegmentNorms::SpeedVariation(double q) const {
  const Eigen::VectorXd speed = (horizontal + q * vertical).cwiseSqrt();
  const double mean = speed.mean();
  if (mean <= 0.0) return 0.0;
  const double var = (speed.array() - mean).square().mean();
  return std::sqrt(var) / mean;
}

SegmentNorms EvaluateSegments(const SubRiemannianStructure& s,
                              const DiscretePath& path) {
  const int segments = path.segments();
  SegmentNorms out{Eigen::VectorXd(segments), Eigen::VectorXd(segments)};
  for (int i = 0; i < segments; ++i) {
    const SegmentSample seg = DiscreteVelocity(path, i);
    const auto [h, w] = Projector(s, seg.midpoint).SquaredNorms(seg.velocity);
    out.horizontal[i] = h;
    out.vertical[i] = w;
  }
  return out;
}

double Energy(const SubRiemannianStructure& s, const PenaltyParameter& q,
              const DiscretePath& path) {
  return EvaluateSegments(s, path).Energy(q.value());
}

double Length(const SubRiemannianStructure& s, const PenaltyParameter& q,
              const DiscretePath& path) {
  return EvaluateSegments(s, path).Length(q.value());
}

double HorizontalityDefect(const SubRiemannianStructure& s,
                           const DiscretePath& path) {
  return EvaluateSegments(s, path).Defect();
}

FunctionalValue FunctionalValue::Finite(double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument("functional value must be finite and >= 0");
  }
  FunctionalValue out;
  out.finite_ = true;
  out.value_ = value;
  return out;
}

double FunctionalValue::value() const {
  if (!finite_) throw std::logic_error("functional value is infinite");
  return value_;
}

FunctionalValue LimitEnergy(const SubRiemannianStructure& s,
                            const DiscretePath& path, double horizontal_tol) {
  if (!(horizontal_tol > 0.0)) {
    throw std::invalid_argument("horizontal tolerance must be positive");
  }
  const SegmentNorms norms = EvaluateSegments(s, path);
  if (norms.Defect() > horizontal_tol) return FunctionalValue::Infinite();
  return FunctionalValue::Finite(norms.Energy(1.0));
}

FunctionalValue LimitLength(const SubRiemannianStructure& s,
                            const DiscretePath& path, double horizontal_tol) {
  if (!(horizontal_tol > 0.0)) {
    throw std::invalid_argument("horizontal tolerance must be positive");
  }
  const SegmentNorms norms = EvaluateSegments(s, path);
  if (norms.Defect() > horizontal_tol) return FunctionalValue::Infinite();
  return FunctionalValue::Finite(norms.Length(1.0));
}

Eigen::VectorXd SemimetricRho(const DiscretePath& a, const DiscretePath& b,
                              int order) {
  if (order != 0 && order != 1) {
    throw std::invalid_argument("semimetric order must be 0 or 1");
  }
  if (a.segments() != b.segments() || a.dimension() != b.dimension()) {
    throw std::invalid_argument("semimetric needs paths on the same grid");
  }
  const int segments = a.segments();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(a.dimension());
  for (int i = 0; i < segments; ++i) {
    const SegmentSample sa = DiscreteVelocity(a, i);
    const SegmentSample sb = DiscreteVelocity(b, i);
    const Eigen::VectorXd diff = order == 0 ? Eigen::VectorXd(sa.midpoint - sb.midpoint)
                                            : Eigen::VectorXd(sa.velocity - sb.velocity);
    acc += diff.cwiseAbs2();
  }
  return (acc / segments).cwiseSqrt();
}

}  // namespace pgeo
