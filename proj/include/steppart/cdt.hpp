// Copyright 2026 The steppart Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <utility>
#include <vector>

#include "steppart/geom.hpp"

namespace steppart::cdt {

/// Constrained Delaunay triangulation of a point set with constraint
/// segments, keeping only triangles inside the constraints by even-odd
/// parity. Coordinates are snapped to a 2^26 lattice over the bounding box
/// and all predicates are evaluated exactly in integer arithmetic, so the
/// result is deterministic and independent of evaluation order.
///
/// Triangles reference input point indices (coincident inputs are merged to
/// the first occurrence) and are counter-clockwise. Throws steppart::Error
/// (stage "tessellate") when constraint segments cross each other.
std::vector<std::array<int, 3>> triangulate(const std::vector<Vec2>& points,
                                            const std::vector<std::pair<int, int>>& constraints);

}  // namespace steppart::cdt
