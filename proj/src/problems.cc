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

#include "pgeo/problems.h"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pgeo/structures.h"

namespace pgeo {
namespace {

constexpr double kVerticalZ = 1.0 / (4.0 * std::numbers::pi);
constexpr double kDeflection = 1e-2;

std::optional<int> EuclideanDimension(const std::string& name) {
  constexpr std::string_view kPrefix = "euclidean-";
  if (name.rfind(kPrefix, 0) != 0) return std::nullopt;
  int n = 0;
  const char* first = name.data() + kPrefix.size();
  const char* last = name.data() + name.size();
  const auto [end, ec] = std::from_chars(first, last, n);
  if (ec != std::errc() || end != last || n < 1 || n > 64) {
    throw std::invalid_argument("euclidean dimension must be in 1..64: " + name);
  }
  return n;
}

Point Vec(std::initializer_list<double> values) {
  Point p(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) p[i++] = v;
  return p;
}

bool IsZero(const Point& p) { return (p.array() == 0.0).all(); }

// Fills uniqueness, reference and deflection for the problem's endpoints.
void Annotate(Problem& problem) {
  const Point& x = problem.start;
  const Point& y = problem.end;
  problem.unique_limit = false;
  problem.reference_distance.reset();
  problem.perturbation = 0.0;
  if (problem.name.rfind("euclidean-", 0) == 0) {
    problem.unique_limit = true;
    problem.reference_distance = (y - x).norm();
  } else if (problem.name == "heisenberg") {
    if (!IsZero(x)) return;
    if (y[2] == 0.0) {
      problem.unique_limit = true;
      problem.reference_distance = y.head(2).norm();
    } else if (y[0] == 0.0 && y[1] == 0.0) {
      problem.reference_distance = HeisenbergVerticalDistance(y[2]);
      problem.perturbation = kDeflection;
    }
  } else if (problem.name == "martinet") {
    if (IsZero(x) && y[1] == 0.0 && y[2] == 0.0) {
      problem.unique_limit = true;
      problem.reference_distance = std::abs(y[0]);
    } else {
      // The chord stays at y = 0, a critical point of the y -> -y symmetry.
      problem.perturbation = kDeflection;
    }
  } else if (problem.name == "drift-constant-1d" ||
             problem.name == "drift-linear-2d") {
    problem.unique_limit = true;
  } else if (problem.name == "heisenberg-drift") {
    problem.perturbation = kDeflection;
  }
}

Problem Build(const std::string& name) {
  if (const auto n = EuclideanDimension(name)) {
    return Problem{name, EuclideanStructure(*n), std::nullopt,
                   Point::Zero(*n), Point::Ones(*n)};
  }
  if (name == "heisenberg") {
    return Problem{name, HeisenbergStructure(), std::nullopt, Point::Zero(3),
                   Vec({0.0, 0.0, kVerticalZ})};
  }
  if (name == "martinet") {
    return Problem{name, MartinetStructure(), std::nullopt, Point::Zero(3),
                   Vec({1.0, 0.0, 0.05})};
  }
  if (name == "drift-constant-1d") {
    return Problem{name, EuclideanStructure(1), DriftField::Constant(Vec({1.0})),
                   Point::Zero(1), Point::Zero(1)};
  }
  if (name == "drift-linear-2d") {
    Eigen::MatrixXd a(2, 2);
    a << 0.0, 1.0, 0.0, 0.0;
    return Problem{name, EuclideanStructure(2), DriftField::Linear(a),
                   Point::Zero(2), Vec({1.0, 0.0})};
  }
  if (name == "heisenberg-drift") {
    return Problem{name, HeisenbergStructure(),
                   DriftField::Constant(Vec({1.0, 0.0, 0.0})), Point::Zero(3),
                   Vec({1.0, 0.0, kVerticalZ})};
  }
  throw std::invalid_argument("unknown problem '" + name + "'");
}

}  // namespace

double HeisenbergVerticalDistance(double z) {
  return 2.0 * std::sqrt(std::numbers::pi * std::abs(z));
}

std::vector<CatalogueEntry> ListProblems() {
  return {
      {"euclidean-n", 0, false, "R^n, Euclidean metric, D = TM",
       "0 -> (1, ..., 1)", true, "|y - x|"},
      {"heisenberg", 3, false,
       "R^3, Euclidean metric, D = span{dx - (y/2) dz, dy + (x/2) dz}",
       "(0,0,0) -> (0,0,1/(4 pi))", false,
       "vertical endpoints (0,0,z): 2 sqrt(pi z) (isoperimetric value, 1 for "
       "the default); chords (a,b,0): sqrt(a^2 + b^2), unique"},
      {"martinet", 3, false,
       "R^3, Euclidean metric, D = span{dx + y^2 dz, dy}; step 3 on y = 0",
       "(0,0,0) -> (1,0,0.05)", false,
       "x-axis chords (a,0,0): |a|, unique"},
      {"drift-constant-1d", 1, true, "R, D = TM, drift X = 1", "0 -> 0", true,
       "optimal control Y = -1, cost 1"},
      {"drift-linear-2d", 2, true,
       "R^2, D = TM, drift X = A p with A = [[0,1],[0,0]]", "(0,0) -> (1,0)",
       true, "controllability Gramian cost y^T W^-1 y"},
      {"heisenberg-drift", 3, true, "heisenberg with constant drift (1,0,0)",
       "(0,0,0) -> (1,0,1/(4 pi))", false, "none"},
  };
}

Problem MakeProblem(const std::string& name) {
  Problem p = Build(name);
  Annotate(p);
  return p;
}

Problem MakeProblem(const std::string& name, const Point& start,
                    const Point& end) {
  Problem p = Build(name);
  const int n = p.structure.dimension();
  if (start.size() != n || end.size() != n) {
    throw std::invalid_argument("endpoints of " + name + " must have " +
                                std::to_string(n) + " coordinates");
  }
  p.start = start;
  p.end = end;
  Annotate(p);
  return p;
}

}  // namespace pgeo
