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

#include <random>

#include "steppart/partition.hpp"
#include "test_support.hpp"

using namespace steppart;
using namespace steppart::testing;

TEST_CASE("cube dihedrals are all 90 degrees") {
  const BRepSolid solid = buildFixture("cube.step");
  for (const auto& e : solid.edges) {
    const DihedralResult d = dihedralAngle(solid, e);
    CHECK_FALSE(d.failed);
    CHECK(std::abs(d.phiDeg - 90.0) < 1e-6);
  }
}

TEST_CASE("split cylinder: seam dihedral 0, cap dihedral 90") {
  const BRepSolid solid = buildFixture("split_cylinder.step");
  const AdjacencyGraph g = buildAdjacency(solid);
  REQUIRE(g.edges.size() == 6);
  int seams = 0, caps = 0;
  for (const auto& e : g.edges) {
    const bool bothCylinder = solid.faces[e.faceA].type == PrimitiveType::Cylinder &&
                              solid.faces[e.faceB].type == PrimitiveType::Cylinder;
    if (bothCylinder) {
      ++seams;
      CHECK(e.samePrimitive);
      CHECK(std::abs(e.phiDeg) < 1e-6);
    } else {
      ++caps;
      CHECK_FALSE(e.samePrimitive);
      CHECK(std::abs(e.phiDeg - 90.0) < 1e-6);
    }
  }
  CHECK(seams == 2);
  CHECK(caps == 4);
}

TEST_CASE("filleted block: tangent joins have phi 0 across type boundaries") {
  const BRepSolid solid = buildFixture("filleted_block.step");
  const AdjacencyGraph g = buildAdjacency(solid);
  REQUIRE(g.edges.size() == 2);
  for (const auto& e : g.edges) {
    CHECK_FALSE(e.samePrimitive);
    CHECK(std::abs(e.phiDeg) < 1e-6);
  }
}

TEST_CASE("single-face model yields no adjacency edges") {
  // Only the top strip of the filleted block, as an open shell.
  std::string text = readFixture("filleted_block.step");
  const std::string shell = "OPEN_SHELL('',(#89,#98,#109))";
  text.replace(text.find(shell), shell.size(), "OPEN_SHELL('',(#89))");
  const BRepSolid solid = buildBRep(parseStep(text));
  CHECK(solid.faces.size() == 1);
  CHECK(buildAdjacency(solid).edges.empty());
}

TEST_CASE("fixture partitions at theta 8") {
  SUBCASE("cube: six parts") {
    const BRepSolid solid = buildFixture("cube.step");
    const Partition p = extractParts(solid, buildAdjacency(solid), 8.0);
    CHECK(p.numParts() == 6);
  }
  SUBCASE("split cylinder: three parts, laterals merged") {
    const BRepSolid solid = buildFixture("split_cylinder.step");
    const Partition p = extractParts(solid, buildAdjacency(solid), 8.0);
    REQUIRE(p.numParts() == 3);
    CHECK(p.assignment[0] == p.assignment[1]);
    CHECK(p.parts[p.assignment[0] - 1].faceCount == 2);
    CHECK(p.parts[p.assignment[0] - 1].type == PrimitiveType::Cylinder);
  }
  SUBCASE("filleted block: type inequality blocks merging at any theta") {
    const BRepSolid solid = buildFixture("filleted_block.step");
    const AdjacencyGraph g = buildAdjacency(solid);
    CHECK(extractParts(solid, g, 8.0).numParts() == 3);
    CHECK(extractParts(solid, g, 90.0).numParts() == 3);
  }
}

TEST_CASE("part ids are ordered by smallest face id") {
  const BRepSolid solid = buildFixture("split_cylinder.step");
  const Partition p = extractParts(solid, buildAdjacency(solid), 8.0);
  // Faces 0,1 are the lateral halves, then top cap, then bottom cap.
  CHECK(p.assignment == std::vector<int>{1, 1, 2, 3});
}

TEST_CASE("theta monotonicity and brute-force closure on random graphs") {
  std::mt19937_64 eng(2026);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PrimitiveType> types;
    const AdjacencyGraph g = randomGraph(eng, 10, types);
    const double t1 = double(eng() % 1800) / 10.0;
    const double t2 = t1 + double(eng() % 300) / 10.0;
    const Partition p1 = extractParts(g, t1, types);
    const Partition p2 = extractParts(g, t2, types);
    CHECK(refines(p1.assignment, p2.assignment));
    CHECK(samePartition(p1.assignment, bruteForceParts(g, types, t1)));
    CHECK(samePartition(p2.assignment, bruteForceParts(g, types, t2)));
  }
}

TEST_CASE("stability regime: fixture partitions identical for theta 4..12") {
  for (const char* name : {"cube.step", "split_cylinder.step", "filleted_block.step"}) {
    const BRepSolid solid = buildFixture(name);
    const AdjacencyGraph g = buildAdjacency(solid);
    // Precondition of the regime: no same-primitive dihedral inside (4, 12].
    for (const auto& e : g.edges)
      if (e.samePrimitive) CHECK((e.phiDeg <= 4.0 || e.phiDeg > 12.0));
    const Partition ref = extractParts(solid, g, 4.0);
    for (double theta : {6.0, 8.0, 10.0, 12.0})
      CHECK(samePartition(ref.assignment, extractParts(solid, g, theta).assignment));
  }
}

TEST_CASE("rigid motion leaves dihedrals unchanged within 1e-9 degrees") {
  std::mt19937_64 eng(99);
  auto uniform = [&] { return (eng() >> 11) * 0x1.0p-53; };
  for (const char* name : {"cube.step", "split_cylinder.step", "filleted_block.step"}) {
    const BRepSolid solid = buildFixture(name);
    TestMotion motion;
    motion.axis = normalize(Vec3{uniform() - 0.5, uniform() - 0.5, uniform() + 0.1});
    motion.angle = uniform() * kTwoPi;
    motion.t = {10 * uniform(), -5 * uniform(), 3 * uniform()};
    const BRepSolid moved = transformSolid(solid, motion);
    for (std::size_t i = 0; i < solid.edges.size(); ++i) {
      if (solid.edges[i].incidences.size() != 2) continue;  // open boundary
      const DihedralResult a = dihedralAngle(solid, solid.edges[i]);
      const DihedralResult b = dihedralAngle(moved, moved.edges[i]);
      REQUIRE_FALSE(a.failed);
      REQUIRE_FALSE(b.failed);
      CHECK(std::abs(a.phiDeg - b.phiDeg) < 1e-9);
    }
    const Partition pa = extractParts(solid, buildAdjacency(solid), 8.0);
    const Partition pb = extractParts(moved, buildAdjacency(moved), 8.0);
    CHECK(pa.assignment == pb.assignment);
  }
}

TEST_CASE("flipping same-sense on both faces of an edge preserves phi") {
  BRepSolid solid = buildFixture("cube.step");
  const TopoEdge& edge = solid.edges[0];
  const double before = dihedralAngle(solid, edge).phiDeg;
  for (const auto& inc : edge.incidences)
    solid.faces[inc.face].sameSense = !solid.faces[inc.face].sameSense;
  const double after = dihedralAngle(solid, edge).phiDeg;
  CHECK(before == doctest::Approx(after).epsilon(1e-12));
}

TEST_CASE("well-formed fixtures are not orientation suspect") {
  for (const char* name : {"cube.step", "split_cylinder.step", "filleted_block.step"})
    CHECK_FALSE(buildAdjacency(buildFixture(name)).orientationSuspect);
}

TEST_CASE("diagnostic spread and csv dump") {
  const BRepSolid solid = buildFixture("split_cylinder.step");
  const AdjacencyGraph g = buildAdjacency(solid, true);
  for (const auto& e : g.edges) CHECK(e.phiSpreadDeg < 1e-6);  // analytic fixtures are uniform
  const std::string csv = adjacencyCsv(solid, g);
  CHECK(csv.rfind("edge_id,face_a,face_b,type_a,type_b,phi_deg\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(g.edges.size()));
}
