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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "steppart/carrier.hpp"
#include "steppart/error.hpp"
#include "test_support.hpp"

using namespace steppart;
using namespace steppart::testing;

namespace {

Carrier fixtureCarrier(const std::string& name, double theta = 8.0) {
  const BRepSolid solid = buildFixture(name);
  const Partition part = extractParts(solid, buildAdjacency(solid), theta);
  const TessellationResult tess = tessellateSolid(solid, TessellationSpec::t0());
  Carrier c = projectLabels(tess.meshes, part);
  c.meta.thetaDeg = theta;
  c.meta.tess = TessellationSpec::t0();
  return c;
}

// A flat strip of 2n triangles over an (n+1) x 2 vertex grid, labeled by
// the caller per quad column.
Carrier stripCarrier(const std::vector<int>& columnLabels) {
  Carrier c;
  const int cols = static_cast<int>(columnLabels.size());
  for (int i = 0; i <= cols; ++i) {
    c.vertices.push_back({double(i), 0, 0});
    c.vertices.push_back({double(i), 1, 0});
  }
  for (int i = 0; i < cols; ++i) {
    const int a = 2 * i, b = 2 * i + 1, d = 2 * i + 2, e = 2 * i + 3;
    c.triangles.push_back({a, d, b});
    c.triangles.push_back({b, d, e});
    for (int k = 0; k < 2; ++k) {
      c.partLabel.push_back(columnLabels[i]);
      c.sourceFace.push_back(i);
      c.primitive.push_back(PrimitiveType::Plane);
    }
  }
  return c;
}

std::multiset<std::array<double, 9>> geometryBag(const Carrier& c) {
  std::multiset<std::array<double, 9>> bag;
  for (const auto& t : c.triangles) {
    std::array<double, 9> tri;
    for (int k = 0; k < 3; ++k) {
      tri[3 * k] = c.vertices[t[k]].x;
      tri[3 * k + 1] = c.vertices[t[k]].y;
      tri[3 * k + 2] = c.vertices[t[k]].z;
    }
    bag.insert(tri);
  }
  return bag;
}

}  // namespace

TEST_CASE("cube projection: one distinct label per face") {
  const Carrier c = fixtureCarrier("cube.step");
  CHECK(c.numTriangles() == 12);
  std::map<int, std::set<int>> facesPerLabel;
  for (std::size_t t = 0; t < c.numTriangles(); ++t)
    facesPerLabel[c.partLabel[t]].insert(c.sourceFace[t]);
  CHECK(facesPerLabel.size() == 6);
  for (const auto& [label, faces] : facesPerLabel) CHECK(faces.size() == 1);
}

TEST_CASE("split cylinder projection: lateral faces share a label") {
  const Carrier c = fixtureCarrier("split_cylinder.step");
  std::set<int> lateralLabels;
  for (std::size_t t = 0; t < c.numTriangles(); ++t)
    if (c.sourceFace[t] <= 1) lateralLabels.insert(c.partLabel[t]);
  CHECK(lateralLabels.size() == 1);
  CHECK(c.meta.numParts == 3);
  for (std::size_t t = 0; t < c.numTriangles(); ++t)
    CHECK(c.primitive[t] ==
          (c.sourceFace[t] <= 1 ? PrimitiveType::Cylinder : PrimitiveType::Plane));
}

TEST_CASE("empty mesh list gives an empty carrier") {
  Partition p;
  const Carrier c = projectLabels({}, p);
  CHECK(c.numTriangles() == 0);
  CHECK(c.vertices.empty());
}

TEST_CASE("unknown source face id is an error") {
  FaceMesh m;
  m.sourceFace = 7;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.triangles = {{0, 1, 2}};
  Partition p;
  p.assignment = {1};  // only face 0
  p.parts.push_back({1, PrimitiveType::Plane});
  CHECK_THROWS_WITH_AS(projectLabels({m}, p), doctest::Contains("unknown-face-id"), Error);
}

TEST_CASE("stabilize: tau 0 is the identity") {
  const Carrier c = fixtureCarrier("split_cylinder.step");
  CHECK(stabilize(c, 0) == stabilize(stabilize(c, 0), 0));
  const Carrier s = stabilize(c, 0);
  CHECK(s.numTriangles() == c.numTriangles());
  CHECK(s.meta.numParts == c.meta.numParts);
  CHECK(s.partLabel == c.partLabel);
}

TEST_CASE("stabilize: carriers with all parts above tau are unchanged") {
  const Carrier c = stabilize(fixtureCarrier("split_cylinder.step"), 0);
  const Carrier s = stabilize(c, 2);  // every part has >= 2 triangles
  CHECK(s.partLabel == c.partLabel);
  CHECK(s.meta.numParts == c.meta.numParts);
}

TEST_CASE("stabilize: sliver absorbed into its only established neighbor") {
  // Columns: 25 of part 1, then a 10-triangle sliver of part 2 bordered
  // only by part 1.
  std::vector<int> labels;
  for (int i = 0; i < 25; ++i) labels.push_back(1);
  for (int i = 0; i < 5; ++i) labels.push_back(2);
  const Carrier c = stripCarrier(labels);
  const Carrier s = stabilize(c, 20);
  CHECK(s.meta.numParts == 1);
  for (int l : s.partLabel) CHECK(l == 1);
  CHECK(s.numTriangles() == c.numTriangles());
  CHECK(geometryBag(s) == geometryBag(c));
}

TEST_CASE("stabilize: boundary-length tie breaks to the smaller part id") {
  // 25 | 5 | 25 with equal-length borders on both sides of the sliver.
  std::vector<int> labels;
  for (int i = 0; i < 25; ++i) labels.push_back(3);
  for (int i = 0; i < 5; ++i) labels.push_back(2);
  for (int i = 0; i < 25; ++i) labels.push_back(1);
  const Carrier s = stabilize(stripCarrier(labels), 20);
  CHECK(s.meta.numParts == 2);
  // The sliver (old label 2) joins old label 1 (smaller id), which is
  // compacted to 1; old label 3 becomes 2.
  int absorbedInto = 0;
  for (std::size_t t = 0; t < s.numTriangles(); ++t)
    if (s.sourceFace[t] >= 25 && s.sourceFace[t] < 30) absorbedInto = s.partLabel[t];
  int rightLabel = 0;
  for (std::size_t t = 0; t < s.numTriangles(); ++t)
    if (s.sourceFace[t] >= 30) rightLabel = s.partLabel[t];
  CHECK(absorbedInto == rightLabel);
}

TEST_CASE("stabilize: small parts with no established neighbor are kept and flagged") {
  const Carrier c = fixtureCarrier("cube.step");  // six 2-triangle parts
  const Carrier s = stabilize(c, 20);
  CHECK(s.meta.numParts == 6);
  CHECK(s.meta.flaggedIsolates.size() == 6);
  CHECK(s.partLabel == c.partLabel);
}

TEST_CASE("stabilize: idempotent on fixtures and never relabels large components") {
  for (const char* name : {"cube.step", "split_cylinder.step", "filleted_block.step"}) {
    const Carrier c = fixtureCarrier(name);
    const Carrier once = stabilize(c, 20);
    const Carrier twice = stabilize(once, 20);
    CHECK(once == twice);
    CHECK(once.numTriangles() == c.numTriangles());
    CHECK(geometryBag(once) == geometryBag(c));
  }
  // Large components keep their identity through stabilization.
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(1);
  for (int i = 0; i < 30; ++i) labels.push_back(2);
  const Carrier s = stabilize(stripCarrier(labels), 20);
  CHECK(s.meta.numParts == 2);
}

TEST_CASE("carrier write/read round trip") {
  const std::string dir = std::filesystem::temp_directory_path().string();
  const std::string obj = dir + "/steppart_test_rt.obj";
  const std::string json = dir + "/steppart_test_rt.labels.json";

  Carrier c = stabilize(fixtureCarrier("split_cylinder.step"), 20);
  c.meta.version = "steppart test";
  c.meta.runConfig = {{"theta_deg", 8.0}};
  writeCarrier(c, obj, json);
  const Carrier back = readCarrier(obj, json);
  CHECK(back == c);
  CHECK(back.meta.thetaDeg == 8.0);
  CHECK(back.meta.tauMin == 20);

  // Label-grouped OBJ: one g line per part, in ascending label order.
  std::ifstream in(obj);
  std::string line;
  std::vector<std::string> groups;
  while (std::getline(in, line))
    if (line.rfind("g ", 0) == 0) groups.push_back(line);
  CHECK(groups.size() == static_cast<std::size_t>(c.meta.numParts));
}

TEST_CASE("truncated sidecar is a schema error") {
  const std::string dir = std::filesystem::temp_directory_path().string();
  const std::string obj = dir + "/steppart_test_tr.obj";
  const std::string json = dir + "/steppart_test_tr.labels.json";
  const Carrier c = fixtureCarrier("cube.step");
  writeCarrier(c, obj, json);
  // Truncate the sidecar mid-document.
  std::string content;
  {
    std::ifstream in(json);
    std::getline(in, content);
  }
  {
    std::ofstream out(json, std::ios::binary);
    out << content.substr(0, content.size() / 2);
  }
  CHECK_THROWS_AS(readCarrier(obj, json), Error);
}
