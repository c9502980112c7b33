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
#include <string>
#include <vector>

#include "steppart/brep.hpp"

namespace steppart {

struct TessellationSpec {
  std::string name = "t0";
  double chordTol = 0.005;    // fraction of the model bbox diagonal
  double angleTolDeg = 20.0;  // normal deviation per element, degrees

  static TessellationSpec t0() { return {"t0", 0.005, 20.0}; }
  static TessellationSpec t1() { return {"t1", 0.002, 12.0}; }
  static TessellationSpec t2() { return {"t2", 0.02, 35.0}; }
  static TessellationSpec byName(const std::string& name);
};

struct FaceMesh {
  int sourceFace = -1;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;  // wound to match the outward face normal
};

struct SkippedFace {
  int face = -1;
  std::string reason;
};

struct TessellationResult {
  std::vector<FaceMesh> meshes;  // ascending source face id; skipped faces absent
  std::vector<SkippedFace> skipped;
};

/// 3D polylines for topological edges, sampled once per (solid, spec) from
/// the curve geometry alone so that both incident faces see bit-identical
/// boundary points.
class EdgePolylineCache {
 public:
  EdgePolylineCache(const BRepSolid& solid, const TessellationSpec& spec);

  const std::vector<Vec3>& points(int edgeId) const { return points_[edgeId]; }
  const std::vector<double>& params(int edgeId) const { return params_[edgeId]; }

 private:
  std::vector<std::vector<Vec3>> points_;
  std::vector<std::vector<double>> params_;
};

/// Triangulate one trimmed face. Throws steppart::Error (stage "tessellate")
/// when the face cannot be meshed (inversion failure, self-intersecting
/// loops, unsupported trimming topology); tessellateSolid turns those into
/// skip-report entries.
FaceMesh tessellateFace(const BRepSolid& solid, const Face& face, const TessellationSpec& spec,
                        const EdgePolylineCache& cache);

TessellationResult tessellateSolid(const BRepSolid& solid, const TessellationSpec& spec);

}  // namespace steppart
