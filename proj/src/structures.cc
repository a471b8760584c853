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

#include "pgeo/structures.h"

#include <string>

namespace pgeo {

SubRiemannianStructure EuclideanStructure(int n) {
  return SubRiemannianStructure(
      "euclidean-" + std::to_string(n), n, n,
      [n](const Point&) { return Eigen::MatrixXd::Identity(n, n); },
      [n](const Point&) { return Eigen::MatrixXd::Identity(n, n); });
}

SubRiemannianStructure HeisenbergStructure() {
  return SubRiemannianStructure(
      "heisenberg", 3, 2,
      [](const Point&) { return Eigen::MatrixXd::Identity(3, 3); },
      [](const Point& p) {
        Eigen::MatrixXd f(3, 2);
        f << 1.0, 0.0,
             0.0, 1.0,
             -0.5 * p[1], 0.5 * p[0];
        return f;
      });
}

SubRiemannianStructure MartinetStructure() {
  return SubRiemannianStructure(
      "martinet", 3, 2,
      [](const Point&) { return Eigen::MatrixXd::Identity(3, 3); },
      [](const Point& p) {
        Eigen::MatrixXd f(3, 2);
        f << 1.0, 0.0,
             0.0, 1.0,
             p[1] * p[1], 0.0;
        return f;
      });
}

}  // namespace pgeo
