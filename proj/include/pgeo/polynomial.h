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

#ifndef PGEO_POLYNOMIAL_H_
#define PGEO_POLYNOMIAL_H_

// Polynomials in the chart coordinates x1..xn and time t, used for inline
// frames, metrics and drifts in problem configurations. Accepted syntax:
//
//   -0.5*x2 + x1^2*x3 - 3 + 2*t
//
// i.e. sums of products of numbers, variables and variable^integer.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pgeo/drift.h"
#include "pgeo/geometry.h"

namespace pgeo {

class Polynomial {
 public:
  /// Throws std::invalid_argument with the offending position.
  static Polynomial Parse(std::string_view text, int num_vars);

  int num_vars() const { return num_vars_; }

  double Evaluate(double t, const Point& x) const;
  /// d/dx_{var} (0-based).
  double Derivative(int var, double t, const Point& x) const;

 private:
  struct Term {
    double coefficient;
    // Exponents of x1..xn, then t.
    std::vector<int> exponents;
  };

  double EvaluateTerm(const Term& term, double t, const Point& x,
                      int differentiate) const;

  int num_vars_ = 0;
  std::vector<Term> terms_;
};

/// Row-major table of polynomial entries.
class PolynomialMatrix {
 public:
  PolynomialMatrix(int rows, int cols, std::vector<Polynomial> entries);
  static PolynomialMatrix Parse(const std::vector<std::string>& entries,
                                int rows, int cols, int num_vars);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Eigen::MatrixXd Evaluate(double t, const Point& x) const;

 private:
  int rows_;
  int cols_;
  std::vector<Polynomial> entries_;
};

/// Drift with components `components` and analytic Jacobian.
DriftField PolynomialDrift(std::vector<Polynomial> components);

/// Structure with polynomial frame columns and metric (identity if the
/// metric is omitted). Time is fixed to 0.
SubRiemannianStructure PolynomialStructure(std::string name,
                                           PolynomialMatrix frame,
                                           std::optional<PolynomialMatrix> metric);

}  // namespace pgeo

#endif  // PGEO_POLYNOMIAL_H_
