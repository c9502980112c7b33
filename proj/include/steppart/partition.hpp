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

#include <string>
#include <vector>

#include "steppart/brep.hpp"

namespace steppart {

struct AdjacencyEdge {
  int faceA = -1;
  int faceB = -1;
  int topoEdge = -1;
  double phiDeg = 0.0;        // dihedral angle in degrees, [0, 180]
  bool samePrimitive = false;
  bool inversionFailed = false;
  double phiSpreadDeg = 0.0;  // diagnostic: max deviation at the 25%/75% samples
};

struct AdjacencyGraph {
  int numFaces = 0;
  std::vector<AdjacencyEdge> edges;
  bool orientationSuspect = false;  // >50% of edges near anti-parallel normals
};

struct PartInfo {
  int faceCount = 0;
  PrimitiveType type = PrimitiveType::Other;
};

struct Partition {
  std::vector<int> assignment;  // face-id -> part-id, 1-based contiguous
  std::vector<PartInfo> parts;  // index part-id - 1

  int numParts() const { return static_cast<int>(parts.size()); }
};

struct DihedralResult {
  double phiDeg = 180.0;
  bool failed = false;   // point inversion failed on either face
  double spreadDeg = 0.0;
};

/// Dihedral angle between the two faces incident to an edge, evaluated at the
/// edge's mid-parameter with outward (same-sense adjusted) normals.
/// Inversion failure reports the non-mergeable sentinel 180.
DihedralResult dihedralAngle(const BRepSolid& solid, const TopoEdge& edge,
                             bool withSpread = false);

/// Face adjacency graph: one edge per 2-incidence topological edge between
/// distinct faces, annotated with the dihedral and the type-equality flag.
AdjacencyGraph buildAdjacency(const BRepSolid& solid, bool withSpread = false);

/// Connected components under (same primitive) AND (phi <= thetaDeg),
/// breadth-first. Part ids are assigned in ascending order of each
/// component's smallest face id.
Partition extractParts(const AdjacencyGraph& graph, double thetaDeg,
                       const std::vector<PrimitiveType>& faceTypes);

/// Convenience overload taking types from the solid.
Partition extractParts(const BRepSolid& solid, const AdjacencyGraph& graph, double thetaDeg);

/// One line per graph edge: edge_id,face_a,face_b,type_a,type_b,phi_deg
std::string adjacencyCsv(const BRepSolid& solid, const AdjacencyGraph& graph);

}  // namespace steppart
