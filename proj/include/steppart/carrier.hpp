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

#include <json.hpp>

#include "steppart/brep.hpp"
#include "steppart/partition.hpp"
#include "steppart/tessellate.hpp"

namespace steppart {

struct PartTotal {
  int label = 0;
  int triangles = 0;
  double area = 0.0;
  PrimitiveType primitive = PrimitiveType::Other;

  bool operator==(const PartTotal&) const = default;
};

struct CarrierMeta {
  double thetaDeg = 8.0;
  int tauMin = 0;  // 0 until stabilize() runs
  TessellationSpec tess;
  int numParts = 0;
  std::vector<int> skippedFaces;
  std::vector<int> flaggedIsolates;  // labels kept below tau_min (no labeled neighbor)
  std::vector<PartTotal> parts;
  std::string version;
  nlohmann::json runConfig = nlohmann::json::object();

  bool operator==(const CarrierMeta& o) const;
};

/// Labeled tessellated carrier: welded triangle geometry with per-triangle
/// part label, source B-Rep face id, and primitive label. Triangles are kept
/// in canonical order (part label, then source face, then creation order) so
/// serialization is reproducible.
struct Carrier {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> partLabel;
  std::vector<int> sourceFace;
  std::vector<PrimitiveType> primitive;
  CarrierMeta meta;

  std::size_t numTriangles() const { return triangles.size(); }
  Aabb bounds() const;

  bool operator==(const Carrier& o) const;
};

/// Project the face-level partition onto the face meshes: every triangle
/// carries its source face's part label and primitive type. Vertices shared
/// between faces (bit-identical positions from the shared edge polylines)
/// are welded. Throws on a source face id missing from the partition.
Carrier projectLabels(const std::vector<FaceMesh>& meshes, const Partition& partition);

/// Absorb label components smaller than tauMin triangles into the adjacent
/// part with the greatest shared boundary length (ties to the smaller part
/// id), iterating to a fixpoint; components with no labeled neighbor are
/// kept and flagged. Labels are re-compacted to 1..k'. Geometry untouched.
Carrier stabilize(const Carrier& carrier, int tauMin);

void writeCarrier(const Carrier& carrier, const std::string& objPath,
                  const std::string& jsonPath);
Carrier readCarrier(const std::string& objPath, const std::string& jsonPath);

/// Per-triangle welded-edge adjacency: key -> indices of incident triangles.
/// Shared by stabilization and the evaluator's boundary machinery.
struct CarrierEdge {
  int v0 = 0, v1 = 0;  // v0 < v1
  std::vector<int> tris;
};
std::vector<CarrierEdge> carrierEdges(const Carrier& carrier);

}  // namespace steppart
