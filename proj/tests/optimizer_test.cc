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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "pgeo/structures.h"

namespace pgeo {
namespace {

using std::numbers::pi;

Point P3(double x, double y, double z) { return Eigen::Vector3d(x, y, z); }

const Point kOrigin = P3(0, 0, 0);
const Point kVertical = P3(0, 0, 1.0 / (4.0 * pi));

double RelativeGap(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
  return (got - want).lpNorm<Eigen::Infinity>() /
         std::max(1.0, want.lpNorm<Eigen::Infinity>());
}

// Horizontal lift of a circle through the origin whose inscribed polygon
// encloses area 1/(4 pi), so it ends at kVertical up to rounding. The last
// node is snapped onto it.
DiscretePath CircleArc(int segments) {
  const double r = std::sqrt(1.0 / (2.0 * pi * segments * std::sin(2 * pi / segments)));
  DiscretePath lift = oracle::HeisenbergLift(
      [r](double t) {
        return Eigen::Vector2d(r - r * std::cos(2 * pi * t), -r * std::sin(2 * pi * t));
      },
      segments);
  Eigen::MatrixXd nodes = lift.nodes();
  nodes.col(segments) = kVertical;
  return DiscretePath(nodes);
}

TEST(EnergyGradientTest, VanishesOnEuclideanLine) {
  const auto s = EuclideanStructure(3);
  const DiscretePath line = DiscretePath::Chord(kOrigin, P3(1, -2, 0.5), 40);
  for (double q : {1.0, 1e3}) {
    EXPECT_LE(EnergyGradient(s, PenaltyParameter(q), line).lpNorm<Eigen::Infinity>(),
              1e-10);
  }
}

TEST(EnergyGradientTest, MatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  for (const auto& s : {HeisenbergStructure(), MartinetStructure(), EuclideanStructure(3)}) {
    for (int trial = 0; trial < 20; ++trial) {
      const DiscretePath path = oracle::RandomPath(rng, 3, 20);
      for (double q : {1.0, 50.0}) {
        const Eigen::VectorXd g = EnergyGradient(s, PenaltyParameter(q), path);
        const Eigen::VectorXd fd = oracle::FiniteDifferenceGradient(s, q, path);
        EXPECT_LE(RelativeGap(g, fd), 1e-5) << s.name() << " trial " << trial;
      }
    }
  }
}

TEST(EnergyGradientTest, AffineInQWithDefectSlope) {
  const auto s = HeisenbergStructure();
  DiscretePath path = DiscretePath::Chord(kOrigin, P3(0, 0, 1), 10);
  path.SetInterior(4, P3(0.1, -0.05, 0.45));
  const Eigen::VectorXd g1 = EnergyGradient(s, PenaltyParameter(1), path);
  const Eigen::VectorXd g2 = EnergyGradient(s, PenaltyParameter(2), path);
  const Eigen::VectorXd g4 = EnergyGradient(s, PenaltyParameter(4), path);
  // Interpolating through q = 1 and q = 4 must reproduce q = 2.
  const Eigen::VectorXd predicted = g1 + (g4 - g1) / 3.0;
  EXPECT_LE((g2 - predicted).lpNorm<Eigen::Infinity>(), 1e-9);

  // Slope against finite differences of defect / 2.
  const Eigen::VectorXd slope = (g4 - g1) / 3.0;
  Eigen::VectorXd fd(slope.size());
  const double h = 1e-6;
  for (int i = 1; i < path.segments(); ++i) {
    for (int c = 0; c < 3; ++c) {
      DiscretePath plus = path, minus = path;
      Point p = path.node(i);
      p[c] += h;
      plus.SetInterior(i, p);
      p[c] -= 2 * h;
      minus.SetInterior(i, p);
      fd[(i - 1) * 3 + c] =
          (HorizontalityDefect(s, plus) - HorizontalityDefect(s, minus)) / (4 * h);
    }
  }
  EXPECT_LE(RelativeGap(slope, fd), 1e-5);
}

TEST(EnergyGradientTest, PropagatesDegenerateFrame) {
  SubRiemannianStructure s(
      "collapsing", 2, 2, [](const Point&) { return Eigen::Matrix2d::Identity().eval(); },
      [](const Point& p) {
        Eigen::Matrix2d f;
        f << 1.0, 1.0, 0.0, p[0];
        return Eigen::MatrixXd(f);
      });
  const DiscretePath path =
      DiscretePath::Chord(Eigen::Vector2d(0, -1), Eigen::Vector2d(0, 1), 2);
  EXPECT_THROW(EnergyGradient(s, PenaltyParameter(1), path), DegenerateFrameError);
}

TEST(MinimizeEnergyTest, EuclideanZigZagToLine) {
  const auto s = EuclideanStructure(3);
  DiscretePath zigzag = DiscretePath::Chord(kOrigin, P3(1, 1, 1), 20);
  for (int i = 1; i < 20; ++i) {
    zigzag.SetInterior(i, zigzag.node(i) + P3(i % 2 ? 0.3 : -0.3, 0.1, -0.2));
  }
  SolverConfig config;
  const SolveResult r = MinimizeEnergy(s, PenaltyParameter(1), zigzag, config);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.termination, Termination::kConverged);
  EXPECT_NEAR(r.energy, 1.5, 1e-8);
  const DiscretePath line = DiscretePath::Chord(kOrigin, P3(1, 1, 1), 20);
  EXPECT_LE((r.path.nodes() - line.nodes()).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(MinimizeEnergyTest, HeisenbergChordAtQOne) {
  const auto s = HeisenbergStructure();
  const DiscretePath start =
      PerturbPath(DiscretePath::Chord(kOrigin, P3(1, 0, 0), 50), 0.1);
  const SolveResult r = MinimizeEnergy(s, PenaltyParameter(1), start, SolverConfig{});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.energy, 0.5, 1e-6);
}

TEST(MinimizeEnergyTest, HeisenbergVerticalFromCircle) {
  const auto s = HeisenbergStructure();
  const DiscretePath start = CircleArc(200);
  const SolveResult r = MinimizeEnergy(s, PenaltyParameter(1e4), start, SolverConfig{});
  EXPECT_GE(r.energy, 0.45);
  EXPECT_LE(r.energy, 0.505);
  EXPECT_LE(r.energy, Energy(s, PenaltyParameter(1e4), start));
}

TEST(MinimizeEnergyTest, ReportedValuesMatchReevaluation) {
  const auto s = MartinetStructure();
  const DiscretePath start =
      PerturbPath(DiscretePath::Chord(kOrigin, P3(1, 0.2, 0.1), 40), 0.05);
  const SolveResult r = MinimizeEnergy(s, PenaltyParameter(10), start, SolverConfig{});
  const PenaltyParameter q(10);
  EXPECT_NEAR(r.energy, Energy(s, q, r.path), 1e-12);
  EXPECT_NEAR(r.length, Length(s, q, r.path), 1e-12);
  EXPECT_NEAR(r.defect, HorizontalityDefect(s, r.path), 1e-12);
  if (r.converged) {
    EXPECT_LE(r.gradient_norm, 1e-8 * (1.0 + r.energy));
  }
}

TEST(MinimizeEnergyTest, NonConvergenceIsAResult) {
  const auto s = HeisenbergStructure();
  const DiscretePath start = PerturbPath(DiscretePath::Chord(kOrigin, kVertical, 60), 0.01);
  SolverConfig config;
  config.max_iterations = 2;
  const SolveResult r = MinimizeEnergy(s, PenaltyParameter(100), start, config);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.termination, Termination::kMaxIterations);
  EXPECT_LE(r.iterations, 2);
  EXPECT_LE(r.energy, Energy(s, PenaltyParameter(100), start));
}

TEST(MinimizeEnergyTest, EnergyNonincreasingOverIterates) {
  const auto s = HeisenbergStructure();
  const DiscretePath start = PerturbPath(DiscretePath::Chord(kOrigin, kVertical, 60), 0.01);
  for (int memory : {0, 5}) {
    SolverConfig config;
    config.record_history = true;
    config.memory = memory;
    const SolveResult r = MinimizeEnergy(s, PenaltyParameter(100), start, config);
    ASSERT_GE(r.energy_history.size(), 2u);
    for (size_t i = 1; i < r.energy_history.size(); ++i) {
      EXPECT_LE(r.energy_history[i], r.energy_history[i - 1]);
    }
  }
}

TEST(MinimizeEnergyTest, MaskedCoordinatesStayPut) {
  const auto s = HeisenbergStructure();
  const DiscretePath start = PerturbPath(DiscretePath::Chord(kOrigin, P3(1, 0, 0.2), 30), 0.05);
  const CoordinateMask free = {true, true, false};
  const SolveResult r = MinimizeEnergy(s, PenaltyParameter(5), start, SolverConfig{}, free);
  EXPECT_EQ(r.path.nodes().row(2), start.nodes().row(2));
  EXPECT_THROW(MinimizeEnergy(s, PenaltyParameter(5), start, SolverConfig{}, {true, false}),
               std::invalid_argument);
}

TEST(SolverConfigTest, Validation) {
  auto message = [](SolverConfig c) -> std::string {
    try {
      c.Validate();
    } catch (const std::invalid_argument& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_EQ(message(SolverConfig{}), "");
  SolverConfig c;
  c.max_iterations = 0;
  EXPECT_NE(message(c).find("max_iterations"), std::string::npos);
  c = SolverConfig{};
  c.gradient_tolerance = -1;
  EXPECT_NE(message(c).find("gradient_tolerance"), std::string::npos);
  c = SolverConfig{};
  c.backtracking_ratio = 1.0;
  EXPECT_NE(message(c).find("backtracking_ratio"), std::string::npos);
  c = SolverConfig{};
  c.sufficient_decrease = 0.6;
  EXPECT_NE(message(c).find("sufficient_decrease"), std::string::npos);
  c = SolverConfig{};
  c.initial_step = 0;
  EXPECT_NE(message(c).find("initial_step"), std::string::npos);
  c = SolverConfig{};
  c.grid_size = 1;
  EXPECT_NE(message(c).find("grid_size"), std::string::npos);

  EXPECT_THROW((ContinuationSchedule{0.5, 10, 5}.Validate()), std::invalid_argument);
  EXPECT_THROW((ContinuationSchedule{1, 1, 5}.Validate()), std::invalid_argument);
  EXPECT_THROW((ContinuationSchedule{1, 10, 0}.Validate()), std::invalid_argument);
  EXPECT_THROW((ContinuationSchedule{1, 1e300, 3}.Validate()), std::invalid_argument);
  const std::vector<double> q = ContinuationSchedule{}.Values();
  ASSERT_EQ(q.size(), 5u);
  EXPECT_DOUBLE_EQ(q.front(), 1.0);
  EXPECT_DOUBLE_EQ(q.back(), 1e4);
}

TEST(ContinuationTest, EuclideanStaysOnLine) {
  const auto s = EuclideanStructure(3);
  SolverConfig config;
  config.grid_size = 30;
  const auto results = ContinuationSolve(s, kOrigin, P3(1, 2, 2), ContinuationSchedule{}, config);
  ASSERT_EQ(results.size(), 5u);
  for (const SolveResult& r : results) {
    EXPECT_NEAR(r.energy, 4.5, 1e-10);
    EXPECT_LE((r.path.nodes() - results[0].path.nodes()).lpNorm<Eigen::Infinity>(), 1e-10);
  }
}

TEST(ContinuationTest, HeisenbergChordIsOptimalForEveryQ) {
  const auto s = HeisenbergStructure();
  SolverConfig config;
  config.grid_size = 50;
  const auto results =
      ContinuationSolve(s, kOrigin, P3(1, 0, 0), ContinuationSchedule{}, config);
  for (const SolveResult& r : results) {
    EXPECT_NEAR(r.energy, 0.5, 1e-10);
    EXPECT_LE(r.defect, 1e-10);
    EXPECT_EQ(r.path.start(), kOrigin);
    EXPECT_EQ(r.path.end(), P3(1, 0, 0));
  }
}

TEST(ContinuationTest, HeisenbergVerticalChain) {
  const auto s = HeisenbergStructure();
  SolverConfig config;
  config.grid_size = 100;
  ContinuationOptions options;
  options.perturbation = 1e-2;
  const auto results =
      ContinuationSolve(s, kOrigin, kVertical, ContinuationSchedule{}, config, options);
  ASSERT_EQ(results.size(), 5u);
  const DiscretePath competitor = CircleArc(100);
  const double bound = LimitEnergy(s, competitor, 1e-6).value();
  for (size_t j = 0; j < results.size(); ++j) {
    const SolveResult& r = results[j];
    EXPECT_TRUE(r.path.start() == kOrigin && r.path.end() == kVertical);
    EXPECT_LE(r.energy, bound + 1e-12);
    if (j > 0) {
      EXPECT_GT(r.energy, results[j - 1].energy);
      EXPECT_LT(r.defect, results[j - 1].defect);
    }
  }
  EXPECT_LE(results.back().defect, 1e-3);
}

TEST(ReparametrizeTest, Examples) {
  const auto h = HeisenbergStructure();
  const DiscretePath line = DiscretePath::Chord(kOrigin, P3(1, 2, 0), 25);
  const DiscretePath same = ConstantSpeedReparametrize(h, PenaltyParameter(3), line);
  EXPECT_LE((same.nodes() - line.nodes()).lpNorm<Eigen::Infinity>(), 1e-12);

  Eigen::MatrixXd nodes(1, 3);
  nodes << 0.0, 0.9, 1.0;
  const DiscretePath uneven(nodes);
  const DiscretePath fixed =
      ConstantSpeedReparametrize(EuclideanStructure(1), PenaltyParameter(1), uneven);
  EXPECT_NEAR(fixed.node(1)[0], 0.5, 1e-12);
  EXPECT_EQ(fixed.node(2)[0], 1.0);

  const DiscretePath still = DiscretePath::Chord(P3(1, 1, 1), P3(1, 1, 1), 4);
  EXPECT_THROW(ConstantSpeedReparametrize(h, PenaltyParameter(1), still),
               std::invalid_argument);
}

TEST(ReparametrizeTest, MinimizerBecomesConstantSpeed) {
  const auto s = HeisenbergStructure();
  const DiscretePath start = CircleArc(200);
  const PenaltyParameter q(100);
  const SolveResult r = MinimizeEnergy(s, q, start, SolverConfig{});
  const DiscretePath out = ConstantSpeedReparametrize(s, q, r.path);
  const double cv = EvaluateSegments(s, out).SpeedVariation(q.value());
  EXPECT_LE(cv, 0.01);
  EXPECT_LE(cv, EvaluateSegments(s, r.path).SpeedVariation(q.value()) + 1e-12);
  EXPECT_NEAR(Length(s, q, out), r.length, 1e-6 * r.length);
}

}  // namespace
}  // namespace pgeo
