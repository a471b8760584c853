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

#ifndef PGEO_PROBLEMS_H_
#define PGEO_PROBLEMS_H_

// Built-in benchmark problems with default endpoints and the metadata the
// diagnostics need: whether the limit geodesic is unique and, where known,
// the sub-Riemannian distance between the endpoints.

#include <optional>
#include <string>
#include <vector>

#include "pgeo/drift.h"
#include "pgeo/geometry.h"

namespace pgeo {

struct Problem {
  std::string name;
  SubRiemannianStructure structure;
  std::optional<DriftField> drift;
  Point start;
  Point end;
  bool unique_limit = false;
  std::optional<double> reference_distance;
  /// Default deflection of the start paths.
  double perturbation = 0.0;
};

struct CatalogueEntry {
  /// "euclidean-n" stands for the family euclidean-1, euclidean-2, ...
  std::string name;
  /// 0 for the Euclidean family.
  int dimension;
  bool has_drift;
  std::string description;
  std::string default_endpoints;
  bool unique_limit;
  std::string reference;
};

std::vector<CatalogueEntry> ListProblems();

/// Problem with its default endpoints. Throws std::invalid_argument for an
/// unknown name.
Problem MakeProblem(const std::string& name);

/// Same structure with other endpoints; uniqueness and reference are
/// recomputed for the endpoints (unknown cases become non-unique without
/// reference).
Problem MakeProblem(const std::string& name, const Point& start,
                    const Point& end);

/// 2 sqrt(pi |z|), the length of the circle lift enclosing area |z|.
double HeisenbergVerticalDistance(double z);

}  // namespace pgeo

#endif  // PGEO_PROBLEMS_H_
