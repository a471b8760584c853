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

#include "pgeo/polynomial.h"

#include <gtest/gtest.h>

#include "pgeo/structures.h"

namespace pgeo {
namespace {

Point P3(double x, double y, double z) { return Eigen::Vector3d(x, y, z); }

TEST(PolynomialTest, ParsesAndEvaluates) {
  const Point x = P3(2.0, -1.0, 0.5);
  EXPECT_DOUBLE_EQ(Polynomial::Parse("0", 3).Evaluate(0.0, x), 0.0);
  EXPECT_DOUBLE_EQ(Polynomial::Parse("-2.5", 3).Evaluate(0.0, x), -2.5);
  EXPECT_DOUBLE_EQ(Polynomial::Parse("x1", 3).Evaluate(0.0, x), 2.0);
  EXPECT_DOUBLE_EQ(Polynomial::Parse("x2^2", 3).Evaluate(0.0, x), 1.0);
  EXPECT_DOUBLE_EQ(Polynomial::Parse("-0.5*x2", 3).Evaluate(0.0, x), 0.5);
  EXPECT_DOUBLE_EQ(Polynomial::Parse("3*x1*x3 - x2 + 1e-1", 3).Evaluate(0.0, x),
                   3.0 + 1.0 + 0.1);
  EXPECT_DOUBLE_EQ(Polynomial::Parse("t*x1 + t^2", 3).Evaluate(0.5, x), 1.25);
  EXPECT_DOUBLE_EQ(Polynomial::Parse(" x1 ^ 3 ", 3).Evaluate(0.0, x), 8.0);
}

TEST(PolynomialTest, Derivatives) {
  const Polynomial p = Polynomial::Parse("x1^2*x2 - 4*x3 + t*x2", 3);
  const Point x = P3(1.5, 2.0, -1.0);
  EXPECT_DOUBLE_EQ(p.Derivative(0, 0.3, x), 2 * 1.5 * 2.0);
  EXPECT_DOUBLE_EQ(p.Derivative(1, 0.3, x), 1.5 * 1.5 + 0.3);
  EXPECT_DOUBLE_EQ(p.Derivative(2, 0.3, x), -4.0);
}

TEST(PolynomialTest, ErrorsNameThePosition) {
  auto message = [](const std::string& text) -> std::string {
    try {
      Polynomial::Parse(text, 2);
    } catch (const std::invalid_argument& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(message("x3"), "");
  EXPECT_NE(message("x1 +"), "");
  EXPECT_NE(message("2**x1"), "");
  EXPECT_NE(message("y"), "");
  EXPECT_NE(message("x1^-1"), "");
  EXPECT_NE(message(""), "");
  EXPECT_NE(message("x1 + q").find("position"), std::string::npos);
}

TEST(PolynomialStructureTest, ReproducesHeisenberg) {
  const PolynomialMatrix frame =
      PolynomialMatrix::Parse({"1", "0", "0", "1", "-0.5*x2", "0.5*x1"}, 3, 2, 3);
  const SubRiemannianStructure s = PolynomialStructure("poly", frame, std::nullopt);
  const auto h = HeisenbergStructure();
  for (const Point& p : {P3(0, 0, 0), P3(1.5, -0.3, 2.0)}) {
    EXPECT_LE((s.Frame(p) - h.Frame(p)).lpNorm<Eigen::Infinity>(), 1e-15);
    EXPECT_EQ(s.Metric(p), Eigen::MatrixXd::Identity(3, 3));
  }
  EXPECT_THROW(PolynomialMatrix::Parse({"1", "0"}, 3, 2, 3), std::invalid_argument);
}

TEST(PolynomialDriftTest, AnalyticJacobian) {
  const DriftField d = PolynomialDrift(
      {Polynomial::Parse("x2", 2), Polynomial::Parse("-x1 + t*x2^2", 2)});
  ASSERT_TRUE(d.has_analytic_jacobian());
  const Point p = Eigen::Vector2d(0.5, 2.0);
  EXPECT_EQ(d(0.5, p), Eigen::Vector2d(2.0, -0.5 + 2.0));
  Eigen::Matrix2d j;
  j << 0.0, 1.0, -1.0, 2.0;
  EXPECT_EQ(d.Jacobian(0.5, p), j);
}

}  // namespace
}  // namespace pgeo
