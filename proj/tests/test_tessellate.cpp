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

#include <doctest.h>

#include <cstring>
#include <map>

#include "steppart/stepgen.hpp"
#include "steppart/tessellate.hpp"
#include "test_support.hpp"

using namespace steppart;
using namespace steppart::testing;

namespace {

double meshArea(const FaceMesh& m) {
  double a = 0.0;
  for (const auto& t : m.triangles)
    a += triangleArea(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
  return a;
}

const FaceMesh& meshOfFace(const TessellationResult& r, int face) {
  for (const auto& m : r.meshes)
    if (m.sourceFace == face) return m;
  REQUIRE(false);
  return r.meshes.front();
}

}  // namespace

TEST_CASE("planar square face: two triangles, exact area") {
  const BRepSolid solid = makeSquareFace(3.0);
  const TessellationResult r = tessellateSolid(solid, TessellationSpec::t0());
  REQUIRE(r.meshes.size() == 1);
  CHECK(r.skipped.empty());
  CHECK(r.meshes[0].triangles.size() == 2);
  CHECK(meshArea(r.meshes[0]) == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("cube tessellates to 12 triangles at any spec") {
  const BRepSolid solid = buildFixture("cube.step");
  for (const auto& spec :
       {TessellationSpec::t0(), TessellationSpec::t1(), TessellationSpec::t2()}) {
    const TessellationResult r = tessellateSolid(solid, spec);
    REQUIRE(r.meshes.size() == 6);
    std::size_t total = 0;
    for (const auto& m : r.meshes) total += m.triangles.size();
    CHECK(total == 12);
  }
}

TEST_CASE("meshes arrive in ascending source-face order with correct ids") {
  const BRepSolid solid = buildFixture("split_cylinder.step");
  const TessellationResult r = tessellateSolid(solid, TessellationSpec::t0());
  REQUIRE(r.meshes.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(r.meshes[i].sourceFace == i);
}

TEST_CASE("cylinder lateral area within 1 percent at t0") {
  const BRepSolid solid = buildBRep(parseStep(genCylinder(1.0, 2.0)));
  const TessellationResult r = tessellateSolid(solid, TessellationSpec::t0());
  REQUIRE(r.skipped.empty());
  const FaceMesh& lateral = meshOfFace(r, 0);
  const double expected = kTwoPi * 1.0 * 2.0;
  CHECK(std::abs(meshArea(lateral) - expected) / expected < 0.01);
}

TEST_CASE("sphere octant: all vertices on the sphere") {
  const BRepSolid solid = makeSphereOctant();
  for (const auto& spec :
       {TessellationSpec::t0(), TessellationSpec::t1(), TessellationSpec::t2()}) {
    const TessellationResult r = tessellateSolid(solid, spec);
    REQUIRE(r.meshes.size() == 1);
    const double bound = spec.chordTol * solid.diag;
    for (const Vec3& v : r.meshes[0].vertices)
      CHECK(std::abs(norm(v) - 1.0) <= bound);
    // Octant area: 4*pi/8, chord-tol approximation from below.
    CHECK(meshArea(r.meshes[0]) == doctest::Approx(kPi / 2.0).epsilon(0.05));
  }
}

TEST_CASE("full torus face (no loops) is seam-cut and welded") {
  const BRepSolid solid = makeFullTorus(2.0, 0.5);
  const TessellationResult r = tessellateSolid(solid, TessellationSpec::t0());
  REQUIRE(r.meshes.size() == 1);
  const FaceMesh& m = r.meshes[0];
  const SurfaceGeom& s = solid.surfaces[0];
  for (const Vec3& v : m.vertices) CHECK(distToSurface(s, v) <= 1e-9);
  const double expected = kTwoPi * 2.0 * kTwoPi * 0.5;  // 4 pi^2 R r
  CHECK(meshArea(m) == doctest::Approx(expected).epsilon(0.02));
  // Every edge of the closed torus mesh should be shared by exactly two
  // triangles once seam copies are welded by position.
  std::map<std::pair<int, int>, int> edgeUse;
  std::map<std::array<std::int64_t, 3>, int> weld;
  std::vector<int> remap(m.vertices.size());
  auto key = [](const Vec3& v) {
    std::array<std::int64_t, 3> k;
    std::memcpy(k.data(), &v.x, 24);
    return k;
  };
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    auto [it, fresh] = weld.emplace(key(m.vertices[i]), int(i));
    remap[i] = it->second;
    (void)fresh;
  }
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) {
      int a = remap[t[k]], b = remap[t[(k + 1) % 3]];
      if (a > b) std::swap(a, b);
      ++edgeUse[{a, b}];
    }
  for (const auto& [e, count] : edgeUse) CHECK(count == 2);
}

TEST_CASE("vertices stay within chord tolerance on every fixture and spec") {
  for (const char* name : {"cube.step", "split_cylinder.step", "filleted_block.step"}) {
    const BRepSolid solid = buildFixture(name);
    for (const auto& spec :
         {TessellationSpec::t0(), TessellationSpec::t1(), TessellationSpec::t2()}) {
      const TessellationResult r = tessellateSolid(solid, spec);
      CHECK(r.skipped.empty());
      const double bound = spec.chordTol * solid.diag;
      for (const auto& m : r.meshes) {
        const SurfaceGeom& s = solid.surfaceOf(solid.faces[m.sourceFace]);
        for (const Vec3& v : m.vertices) CHECK(distToSurface(s, v) <= bound);
      }
    }
  }
}

TEST_CASE("empty solid tessellates to an empty list") {
  BRepSolid solid;
  solid.diag = 1.0;
  const TessellationResult r = tessellateSolid(solid, TessellationSpec::t0());
  CHECK(r.meshes.empty());
  CHECK(r.skipped.empty());
}

TEST_CASE("self-intersecting trimming loop is skipped and reported") {
  SurfaceGeom plane;
  plane.type = PrimitiveType::Plane;
  SingleFaceBuilder b(plane);
  // Bowtie: (0,0)->(1,1)->(1,0)->(0,1)->closing edge crosses the first.
  const Vec3 p00{0, 0, 0}, p11{1, 1, 0}, p10{1, 0, 0}, p01{0, 1, 0};
  b.addLoopEdge(lineCurve(p00, normalize(p11 - p00)), 0, norm(p11 - p00));
  b.addLoopEdge(lineCurve(p11, normalize(p10 - p11)), 0, 1);
  b.addLoopEdge(lineCurve(p10, normalize(p01 - p10)), 0, norm(p01 - p10));
  b.addLoopEdge(lineCurve(p01, normalize(p00 - p01)), 0, 1);
  const BRepSolid solid = b.finish();
  const TessellationResult r = tessellateSolid(solid, TessellationSpec::t0());
  CHECK(r.meshes.empty());
  REQUIRE(r.skipped.size() == 1);
  CHECK(r.skipped[0].face == 0);
  CHECK(r.skipped[0].reason.find("cross") != std::string::npos);
}

TEST_CASE("determinism: identical inputs give bit-identical meshes") {
  const BRepSolid solid = buildFixture("split_cylinder.step");
  const TessellationResult a = tessellateSolid(solid, TessellationSpec::t0());
  const TessellationResult b = tessellateSolid(solid, TessellationSpec::t0());
  REQUIRE(a.meshes.size() == b.meshes.size());
  for (std::size_t i = 0; i < a.meshes.size(); ++i) {
    CHECK(a.meshes[i].vertices == b.meshes[i].vertices);
    CHECK(a.meshes[i].triangles == b.meshes[i].triangles);
  }
}

TEST_CASE("halving the chord tolerance never reduces curved-face triangles") {
  const BRepSolid solid = buildBRep(parseStep(genCylinder(1.0, 2.0)));
  TessellationSpec spec = TessellationSpec::t0();
  std::size_t prev = 0;
  for (int i = 0; i < 4; ++i) {
    const TessellationResult r = tessellateSolid(solid, spec);
    const std::size_t count = meshOfFace(r, 0).triangles.size();
    CHECK(count >= prev);
    prev = count;
    spec.chordTol *= 0.5;
    spec.name = "custom";
  }
}

TEST_CASE("triangle winding follows the outward face normal") {
  const BRepSolid solid = buildFixture("cube.step");
  const TessellationResult r = tessellateSolid(solid, TessellationSpec::t0());
  for (const auto& m : r.meshes) {
    const Face& f = solid.faces[m.sourceFace];
    const SurfaceGeom& s = solid.surfaceOf(f);
    const Vec3 outward = f.sameSense ? s.frame.z : -s.frame.z;
    for (const auto& t : m.triangles) {
      const Vec3 n = triangleNormal(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
      CHECK(dot(n, outward) > 0.99);
    }
  }
}

TEST_CASE("shared boundary points are bit-identical across incident faces") {
  const BRepSolid solid = buildFixture("split_cylinder.step");
  const TessellationResult r = tessellateSolid(solid, TessellationSpec::t0());
  // Collect all vertex positions per face; every cached edge polyline point
  // must appear exactly in both incident faces' vertex sets.
  const EdgePolylineCache cache(solid, TessellationSpec::t0());
  for (const auto& e : solid.edges) {
    if (e.incidences.size() != 2) continue;
    for (const auto& inc : e.incidences) {
      const FaceMesh& m = meshOfFace(r, inc.face);
      for (const Vec3& p : cache.points(e.id)) {
        bool found = false;
        for (const Vec3& v : m.vertices) found = found || v == p;
        CHECK(found);
      }
    }
  }
}
