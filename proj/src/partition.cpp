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

#include "steppart/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>

namespace steppart {

namespace {

// Outward normal of a face at a 3D point on its surface; nullopt when the
// point cannot be inverted onto the surface.
std::optional<Vec3> outwardNormalAt(const BRepSolid& solid, const Face& face, const Vec3& p) {
  const SurfaceGeom& surf = solid.surfaceOf(face);
  if (surf.type == PrimitiveType::Other) return std::nullopt;
  const auto uv = invertPoint(surf, p);
  if (!uv) return std::nullopt;
  const SurfacePoint sp = evalSurface(surf, uv->x, uv->y);
  if (distance(sp.point, p) > solid.tolOnSurface) return std::nullopt;
  return face.sameSense ? sp.normal : -sp.normal;
}

std::optional<double> phiAt(const BRepSolid& solid, const TopoEdge& edge, double t) {
  const Vec3 p = evalCurve(edge.curve, t);
  const Face& fa = solid.faces[edge.incidences[0].face];
  const Face& fb = solid.faces[edge.incidences[1].face];
  const auto na = outwardNormalAt(solid, fa, p);
  const auto nb = outwardNormalAt(solid, fb, p);
  if (!na || !nb) return std::nullopt;
  // arccos(clamp(na.nb, -1, 1)) evaluated in the atan2 form, which stays
  // well conditioned at tangent (phi ~ 0) and anti-parallel joins.
  return deg(std::atan2(norm(cross(*na, *nb)), dot(*na, *nb)));
}

}  // namespace

DihedralResult dihedralAngle(const BRepSolid& solid, const TopoEdge& edge, bool withSpread) {
  DihedralResult out;
  if (edge.incidences.size() != 2) {
    out.failed = true;
    return out;
  }
  const auto phiMid = phiAt(solid, edge, edge.midParam());
  if (!phiMid) {
    out.failed = true;
    return out;
  }
  out.phiDeg = *phiMid;
  if (withSpread) {
    const double span = edge.t1 - edge.t0;
    const auto p25 = phiAt(solid, edge, edge.t0 + 0.25 * span);
    const auto p75 = phiAt(solid, edge, edge.t0 + 0.75 * span);
    double spread = 0.0;
    if (p25) spread = std::max(spread, std::abs(*p25 - out.phiDeg));
    if (p75) spread = std::max(spread, std::abs(*p75 - out.phiDeg));
    out.spreadDeg = spread;
  }
  return out;
}

AdjacencyGraph buildAdjacency(const BRepSolid& solid, bool withSpread) {
  AdjacencyGraph graph;
  graph.numFaces = static_cast<int>(solid.faces.size());
  int nearAntiParallel = 0;
  int evaluated = 0;
  for (const auto& edge : solid.edges) {
    if (edge.incidences.size() != 2) continue;
    const int fa = edge.incidences[0].face;
    const int fb = edge.incidences[1].face;
    if (fa == fb) continue;  // seam edge within one face carries no adjacency
    AdjacencyEdge ae;
    ae.faceA = std::min(fa, fb);
    ae.faceB = std::max(fa, fb);
    ae.topoEdge = edge.id;
    ae.samePrimitive = solid.faces[fa].type == solid.faces[fb].type;
    const DihedralResult d = dihedralAngle(solid, edge, withSpread);
    ae.inversionFailed = d.failed;
    ae.phiDeg = d.failed ? 180.0 : d.phiDeg;
    ae.phiSpreadDeg = d.spreadDeg;
    if (!d.failed) {
      ++evaluated;
      if (ae.phiDeg > 179.0) ++nearAntiParallel;
    }
    graph.edges.push_back(ae);
  }
  graph.orientationSuspect = evaluated > 0 && nearAntiParallel * 2 > evaluated;
  return graph;
}

Partition extractParts(const AdjacencyGraph& graph, double thetaDeg,
                       const std::vector<PrimitiveType>& faceTypes) {
  const int n = graph.numFaces;
  std::vector<std::vector<int>> neighbors(n);
  for (const auto& e : graph.edges) {
    if (!e.samePrimitive || e.phiDeg > thetaDeg) continue;
    neighbors[e.faceA].push_back(e.faceB);
    neighbors[e.faceB].push_back(e.faceA);
  }

  Partition part;
  part.assignment.assign(n, 0);
  // BFS from ascending face ids gives part ids ordered by smallest member.
  for (int seed = 0; seed < n; ++seed) {
    if (part.assignment[seed] != 0) continue;
    const int partId = static_cast<int>(part.parts.size()) + 1;
    PartInfo info;
    info.type = seed < static_cast<int>(faceTypes.size()) ? faceTypes[seed]
                                                          : PrimitiveType::Other;
    std::deque<int> queue{seed};
    part.assignment[seed] = partId;
    while (!queue.empty()) {
      const int f = queue.front();
      queue.pop_front();
      ++info.faceCount;
      for (int nb : neighbors[f]) {
        if (part.assignment[nb] == 0) {
          part.assignment[nb] = partId;
          queue.push_back(nb);
        }
      }
    }
    part.parts.push_back(info);
  }
  return part;
}

Partition extractParts(const BRepSolid& solid, const AdjacencyGraph& graph, double thetaDeg) {
  std::vector<PrimitiveType> types;
  types.reserve(solid.faces.size());
  for (const auto& f : solid.faces) types.push_back(f.type);
  return extractParts(graph, thetaDeg, types);
}

std::string adjacencyCsv(const BRepSolid& solid, const AdjacencyGraph& graph) {
  std::string out = "edge_id,face_a,face_b,type_a,type_b,phi_deg\n";
  char buf[160];
  for (const auto& e : graph.edges) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%s,%s,%.9g\n", e.topoEdge, e.faceA, e.faceB,
                  primitiveName(solid.faces[e.faceA].type),
                  primitiveName(solid.faces[e.faceB].type), e.phiDeg);
    out += buf;
  }
  return out;
}

}  // namespace steppart
