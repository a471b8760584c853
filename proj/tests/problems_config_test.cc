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

#include <cmath>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "oracles.h"
#include "pgeo/config.h"
#include "pgeo/problems.h"

namespace pgeo {
namespace {

using std::numbers::pi;

Point P3(double x, double y, double z) { return Eigen::Vector3d(x, y, z); }

TEST(CatalogueTest, SixEntries) {
  const auto entries = ListProblems();
  ASSERT_EQ(entries.size(), 6u);
  const std::vector<std::string> names = {"euclidean-n",      "heisenberg",
                                          "martinet",         "drift-constant-1d",
                                          "drift-linear-2d",  "heisenberg-drift"};
  for (size_t i = 0; i < names.size(); ++i) EXPECT_EQ(entries[i].name, names[i]);
  EXPECT_TRUE(entries[0].unique_limit);
  EXPECT_EQ(entries[0].dimension, 0);
  EXPECT_NE(entries[1].reference.find("2 sqrt(pi z)"), std::string::npos)
      << entries[1].reference;
  EXPECT_TRUE(entries[5].has_drift);
  EXPECT_FALSE(entries[1].has_drift);
}

TEST(CatalogueTest, HeisenbergMetadata) {
  const Problem vertical = MakeProblem("heisenberg");
  EXPECT_EQ(vertical.end, P3(0, 0, 1 / (4 * pi)));
  ASSERT_TRUE(vertical.reference_distance.has_value());
  EXPECT_NEAR(*vertical.reference_distance, 1.0, 1e-15);
  EXPECT_FALSE(vertical.unique_limit);
  EXPECT_GT(vertical.perturbation, 0.0);
  EXPECT_NEAR(HeisenbergVerticalDistance(0.3), oracle::IsoperimetricLength(0.3), 1e-15);

  const Problem chord = MakeProblem("heisenberg", P3(0, 0, 0), P3(1, 0, 0));
  EXPECT_TRUE(chord.unique_limit);
  EXPECT_NEAR(*chord.reference_distance, 1.0, 1e-15);
  EXPECT_EQ(chord.perturbation, 0.0);

  const Problem other = MakeProblem("heisenberg", P3(0.2, 0, 0), P3(1, 1, 1));
  EXPECT_FALSE(other.reference_distance.has_value());
}

TEST(CatalogueTest, EuclideanFamily) {
  const Problem e = MakeProblem("euclidean-3");
  EXPECT_EQ(e.structure.dimension(), 3);
  EXPECT_EQ(e.structure.rank(), 3);
  EXPECT_TRUE(e.unique_limit);
  EXPECT_NEAR(*e.reference_distance, std::sqrt(3.0), 1e-15);
  EXPECT_THROW(MakeProblem("euclidean-0"), std::invalid_argument);
  EXPECT_THROW(MakeProblem("euclidean-x"), std::invalid_argument);
  EXPECT_THROW(MakeProblem("sphere"), std::invalid_argument);
}

TEST(CatalogueTest, DriftProblems) {
  const Problem c = MakeProblem("drift-constant-1d");
  ASSERT_TRUE(c.drift.has_value());
  EXPECT_EQ((*c.drift)(0.3, c.start)[0], 1.0);
  const Problem l = MakeProblem("drift-linear-2d");
  EXPECT_EQ(l.drift->Jacobian(0.0, l.start), (Eigen::Matrix2d() << 0, 1, 0, 0).finished());
  EXPECT_EQ(l.end, Eigen::Vector2d(1, 0));
  const Problem h = MakeProblem("heisenberg-drift");
  EXPECT_EQ(h.structure.dimension(), 3);
  EXPECT_EQ((*h.drift)(0.0, h.start), P3(1, 0, 0));
}

constexpr char kFull[] = R"(problem = heisenberg
start = 0, 0, 0
end = 1 0 0
grid_size = 64
reference_distance = 1.0
unique = true
perturbation = 0
cauchy_threshold = 1e-7

[schedule]
q_start = 2
ratio = 5
steps = 3

[solver]
max_iterations = 300
gradient_tolerance = 1e-9
memory = 4
preconditioner = frozen-metric
)";

TEST(ConfigTest, ParsesAllSections) {
  const ProblemSpec spec = ParseProblemSpec(kFull);
  EXPECT_EQ(spec.problem, "heisenberg");
  EXPECT_EQ(*spec.start, P3(0, 0, 0));
  EXPECT_EQ(*spec.end, P3(1, 0, 0));
  EXPECT_EQ(spec.solver.grid_size, 64);
  EXPECT_EQ(spec.schedule.q_start, 2.0);
  EXPECT_EQ(spec.schedule.ratio, 5.0);
  EXPECT_EQ(spec.schedule.steps, 3);
  EXPECT_EQ(spec.solver.max_iterations, 300);
  EXPECT_EQ(spec.solver.gradient_tolerance, 1e-9);
  EXPECT_EQ(spec.solver.memory, 4);
  EXPECT_EQ(spec.solver.preconditioner, Preconditioner::kFrozenMetric);
  EXPECT_EQ(spec.cauchy_threshold, 1e-7);
  EXPECT_TRUE(*spec.unique);
  EXPECT_FALSE(spec.drift.has_value());
  EXPECT_EQ(spec.LineOf("end"), 3);
  EXPECT_EQ(spec.LineOf("schedule.ratio"), 12);

  const Problem p = Instantiate(spec);
  EXPECT_EQ(p.end, P3(1, 0, 0));
  EXPECT_TRUE(p.unique_limit);
}

ConfigError ErrorOf(const std::string& text) {
  try {
    Instantiate(ParseProblemSpec(text));
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ConfigError("none");
}

TEST(ConfigTest, ErrorsNameLineAndKey) {
  const ConfigError endpoints = ErrorOf("problem = heisenberg\nstart = 0, 0\n");
  EXPECT_EQ(endpoints.key(), "start");
  EXPECT_EQ(endpoints.line(), 2);
  EXPECT_NE(std::string(endpoints.what()).find("line 2"), std::string::npos);
  EXPECT_NE(std::string(endpoints.what()).find("'start'"), std::string::npos);

  EXPECT_EQ(ErrorOf("problem = heisenberg\nbogus = 1\n").key(), "bogus");
  EXPECT_EQ(ErrorOf("problem = heisenberg\n[solver]\nmemory = many\n").key(),
            "solver.memory");
  EXPECT_EQ(ErrorOf("problem = heisenberg\n[schedule]\nratio = 1\n").line(), 2);
  EXPECT_EQ(ErrorOf("problem = nowhere\n").key(), "problem");
  EXPECT_EQ(ErrorOf("start = 0\n").key(), "problem");
  EXPECT_EQ(ErrorOf("problem = heisenberg\n[extras]\nx = 1\n").line(), 2);
  EXPECT_EQ(ErrorOf("problem = heisenberg\nend = 0, 0, nan\n").key(), "end");
  EXPECT_EQ(ErrorOf("problem = heisenberg\n[drift]\npreset = wind\n").key(),
            "drift.preset");
  EXPECT_EQ(ErrorOf("problem = heisenberg\n[solver]\npreconditioner = none\n").key(),
            "solver.preconditioner");
  EXPECT_NO_THROW(ParseProblemSpec("problem = heisenberg\n[solver]\nmemory = 3\n"));
}

TEST(ConfigTest, InlineDefinition) {
  const ProblemSpec spec = ParseProblemSpec(R"(problem = inline
start = 0, 0, 0
end = 1, 0, 0.1
[inline]
dimension = 3
rank = 2
frame = 1, 0; 0, 1; -0.5*x2, 0.5*x1
metric = identity
)");
  const Problem p = Instantiate(spec);
  EXPECT_EQ(p.structure.dimension(), 3);
  EXPECT_EQ(p.structure.rank(), 2);
  EXPECT_FALSE(p.unique_limit);
  EXPECT_EQ(p.end, P3(1, 0, 0.1));

  const ConfigError bad = ErrorOf(R"(problem = inline
start = 0, 0, 0
end = 1, 0, 0.1
[inline]
dimension = 3
rank = 2
frame = 1, 0; 0, 1
)");
  EXPECT_EQ(bad.key(), "inline.frame");
  EXPECT_EQ(bad.line(), 7);
}

TEST(ConfigTest, DriftResolution) {
  const ProblemSpec zero = ParseProblemSpec("problem = euclidean-3\n[drift]\npreset = zero\n");
  const Problem e = Instantiate(zero);
  EXPECT_EQ(ResolveDrift(zero, e)(0.5, P3(1, 2, 3)), P3(0, 0, 0));

  const ProblemSpec inline_drift =
      ParseProblemSpec("problem = euclidean-2\n[drift]\nfield = x2, -x1\n");
  EXPECT_EQ(inline_drift.drift->preset, "inline");
  const Problem e2 = Instantiate(inline_drift);
  EXPECT_EQ(ResolveDrift(inline_drift, e2)(0.0, Eigen::Vector2d(1, 2)),
            Eigen::Vector2d(2, -1));

  const ProblemSpec wrong =
      ParseProblemSpec("problem = euclidean-2\n[drift]\nfield = x2\n");
  EXPECT_THROW(ResolveDrift(wrong, Instantiate(wrong)), ConfigError);

  const ProblemSpec none = ParseProblemSpec("problem = heisenberg\n");
  EXPECT_THROW(ResolveDrift(none, Instantiate(none)), ConfigError);

  const ProblemSpec preset = ParseProblemSpec("problem = drift-linear-2d\n");
  EXPECT_TRUE(ResolveDrift(preset, Instantiate(preset)).has_analytic_jacobian());
}

}  // namespace
}  // namespace pgeo
