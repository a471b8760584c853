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

#include "pgeo/geometry.h"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace pgeo {
namespace {

std::string FormatPoint(const Point& p) {
  std::ostringstream out;
  out.precision(17);
  out << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i > 0) out << ", ";
    out << p[i];
  }
  out << ")";
  return out.str();
}

std::string DegenerateMessage(const Point& p, double condition) {
  std::ostringstream out;
  out << "degenerate frame at " << FormatPoint(p)
      << ": condition number of frame Gram matrix is " << condition;
  return out.str();
}

using VectorField = std::function<Eigen::VectorXd(const Point&)>;

Eigen::MatrixXd CentralJacobian(const VectorField& field, const Point& p,
                                double h) {
  const Eigen::Index n = p.size();
  Eigen::MatrixXd jac(n, n);
  Point shifted = p;
  for (Eigen::Index k = 0; k < n; ++k) {
    shifted[k] = p[k] + h;
    const Eigen::VectorXd plus = field(shifted);
    shifted[k] = p[k] - h;
    const Eigen::VectorXd minus = field(shifted);
    shifted[k] = p[k];
    jac.col(k) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

}  // namespace

DegenerateFrameError::DegenerateFrameError(const Point& point,
                                           double condition)
    : GeometryError(DegenerateMessage(point, condition)),
      point_(point),
      condition_(condition) {}

SubRiemannianStructure::SubRiemannianStructure(std::string name, int dimension,
                                               int rank, MetricField metric,
                                               FrameField frame)
    : SubRiemannianStructure(
          std::move(name), dimension, rank,
          [metric = std::move(metric), frame = std::move(frame)](
              const Point& p) { return LocalGeometry{metric(p), frame(p)}; }) {
}

SubRiemannianStructure::SubRiemannianStructure(std::string name, int dimension,
                                               int rank, LocalField field)
    : name_(std::move(name)),
      dimension_(dimension),
      rank_(rank),
      field_(std::move(field)) {
  if (dimension_ < 1 || rank_ < 1 || rank_ > dimension_) {
    throw std::invalid_argument("structure '" + name_ +
                                "' needs 1 <= rank <= dimension");
  }
}

SubRiemannianStructure SubRiemannianStructure::FromLocalField(std::string name,
                                                              int dimension,
                                                              int rank,
                                                              LocalField field) {
  return SubRiemannianStructure(std::move(name), dimension, rank,
                                std::move(field));
}

LocalGeometry SubRiemannianStructure::At(const Point& p) const {
  if (p.size() != dimension_) {
    throw std::invalid_argument("point has dimension " +
                                std::to_string(p.size()) + ", structure '" +
                                name_ + "' expects " +
                                std::to_string(dimension_));
  }
  LocalGeometry local = field_(p);
  if (local.metric.rows() != dimension_ || local.metric.cols() != dimension_ ||
      local.frame.rows() != dimension_ || local.frame.cols() != rank_) {
    throw GeometryError("structure '" + name_ +
                        "' returned fields of the wrong shape");
  }
  return local;
}

PenaltyParameter::PenaltyParameter(double q) : q_(q) {
  if (!std::isfinite(q) || q < 1.0) {
    throw std::invalid_argument("penalty parameter must be finite and >= 1");
  }
}

Projector::Projector(const SubRiemannianStructure& s, const Point& p)
    : Projector(s.At(p), p) {}

Projector::Projector(LocalGeometry local, const Point& p)
    : local_(std::move(local)) {
  const Eigen::MatrixXd& g = local_.metric;
  const Eigen::MatrixXd& f = local_.frame;
  if (Eigen::LLT<Eigen::MatrixXd>(g).info() != Eigen::Success) {
    throw GeometryError("metric is not positive definite at " +
                        FormatPoint(p));
  }
  const Eigen::MatrixXd gram = f.transpose() * g * f;
  const Eigen::VectorXd eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram,
                                                     Eigen::EigenvaluesOnly)
          .eigenvalues();
  const double lo = eig.minCoeff();
  const double hi = eig.maxCoeff();
  const double condition =
      lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxFrameCondition)) {
    throw DegenerateFrameError(p, condition);
  }
  frame_gram_.compute(gram);
}

HorizontalSplit Projector::Split(const Tangent& v) const {
  const Eigen::VectorXd rhs = local_.frame.transpose() * (local_.metric * v);
  Tangent horizontal = local_.frame * frame_gram_.solve(rhs);
  Tangent vertical = v - horizontal;
  return {std::move(horizontal), std::move(vertical)};
}

std::pair<double, double> Projector::SquaredNorms(const Tangent& v) const {
  const HorizontalSplit split = Split(v);
  const double h = split.horizontal.dot(local_.metric * split.horizontal);
  const double w = split.vertical.dot(local_.metric * split.vertical);
  return {h, w};
}

Eigen::MatrixXd Projector::PenalizedGram(double q) const {
  const Eigen::MatrixXd& g = local_.metric;
  const Eigen::MatrixXd gf = g * local_.frame;
  const Eigen::MatrixXd horizontal =
      gf * frame_gram_.solve(gf.transpose());
  Eigen::MatrixXd vertical = g - horizontal;
  Eigen::MatrixXd out = horizontal + q * vertical;
  return 0.5 * (out + out.transpose());
}

HorizontalSplit ProjectHorizontal(const SubRiemannianStructure& s,
                                  const Point& p, const Tangent& v) {
  return Projector(s, p).Split(v);
}

double PenalizedMetricEval(const SubRiemannianStructure& s,
                           const PenaltyParameter& q, const Point& p,
                           const Tangent& v, const Tangent& w) {
  const Projector proj(s, p);
  const HorizontalSplit sv = proj.Split(v);
  const HorizontalSplit sw = proj.Split(w);
  const Eigen::MatrixXd& g = proj.metric();
  return sv.horizontal.dot(g * sw.horizontal) +
         q.value() * sv.vertical.dot(g * sw.vertical);
}

BracketCertificate ValidateBracketGenerating(const SubRiemannianStructure& s,
                                             const Point& p, int max_depth) {
  if (max_depth < 1) {
    throw std::invalid_argument("max_depth must be >= 1");
  }
  const int n = s.dimension();
  const double h = 1e-5 * (1.0 + p.lpNorm<Eigen::Infinity>());

  std::vector<VectorField> generators;
  for (int j = 0; j < s.rank(); ++j) {
    generators.push_back(
        [&s, j](const Point& x) -> Eigen::VectorXd { return s.Frame(x).col(j); });
  }

  std::vector<Eigen::VectorXd> values;
  for (const VectorField& x : generators) values.push_back(x(p));

  auto span_rank = [&values, n]() {
    Eigen::MatrixXd m(n, static_cast<Eigen::Index>(values.size()));
    for (size_t i = 0; i < values.size(); ++i) m.col(i) = values[i];
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
    if (sv.size() == 0 || sv[0] <= 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv[i] > 1e-6 * sv[0]) ++r;
    }
    return r;
  };

  BracketCertificate cert;
  cert.generated_rank = span_rank();
  cert.depth_reached = 1;
  std::vector<VectorField> frontier = generators;
  for (int depth = 2; depth <= max_depth && cert.generated_rank < n; ++depth) {
    std::vector<VectorField> next;
    for (size_t a = 0; a < frontier.size(); ++a) {
      for (size_t j = 0; j < generators.size(); ++j) {
        // [X_a, X_j] with a >= j repeats an earlier bracket up to sign.
        if (depth == 2 && j <= a) continue;
        VectorField v = frontier[a];
        VectorField w = generators[j];
        next.push_back([v, w, h](const Point& x) -> Eigen::VectorXd {
          return CentralJacobian(w, x, h) * v(x) - CentralJacobian(v, x, h) * w(x);
        });
      }
    }
    for (const VectorField& f : next) values.push_back(f(p));
    frontier = std::move(next);
    cert.generated_rank = span_rank();
    cert.depth_reached = depth;
  }
  cert.verified = cert.generated_rank == n;
  if (!cert.verified) cert.depth_reached = max_depth;
  return cert;
}

}  // namespace pgeo
