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

#ifndef PGEO_STRUCTURES_H_
#define PGEO_STRUCTURES_H_

#include "pgeo/geometry.h"

namespace pgeo {

/// R^n with the Euclidean metric and D = TM.
SubRiemannianStructure EuclideanStructure(int n);

/// R^3, Euclidean metric, D spanned by X1 = dx - (y/2) dz, X2 = dy + (x/2) dz.
SubRiemannianStructure HeisenbergStructure();

/// R^3, Euclidean metric, D spanned by X1 = dx + y^2 dz, X2 = dy.
/// Step 2 off the plane y = 0, step 3 on it.
SubRiemannianStructure MartinetStructure();

}  // namespace pgeo

#endif  // PGEO_STRUCTURES_H_
