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

#include <algorithm>
#include <random>

#include "steppart/error.hpp"
#include "steppart/evaluate.hpp"
#include "test_support.hpp"

using namespace steppart;
using namespace steppart::testing;

namespace {

Carrier twoPartSquare() {
  // Two unit squares side by side, labels 1 and 2, equal area.
  Carrier c;
  c.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 1, 0}, {1, 1, 0}, {2, 1, 0}};
  c.triangles = {{0, 1, 4}, {0, 4, 3}, {1, 2, 5}, {1, 5, 4}};
  c.partLabel = {1, 1, 2, 2};
  c.sourceFace = {0, 0, 1, 1};
  c.primitive.assign(4, PrimitiveType::Plane);
  c.meta.numParts = 2;
  return c;
}

Carrier singleTriangle() {
  Carrier c;
  c.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  c.triangles = {{0, 1, 2}};
  c.partLabel = {4};
  c.sourceFace = {0};
  c.primitive = {PrimitiveType::Plane};
  c.meta.numParts = 1;
  return c;
}

// Exhaustive maximum over label bijections (reference for the Hungarian).
std::int64_t bruteForceObjective(const std::vector<std::vector<std::int64_t>>& w) {
  const int rows = static_cast<int>(w.size());
  const int cols = rows ? static_cast<int>(w[0].size()) : 0;
  const int n = std::max(rows, cols);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::int64_t best = 0;
  do {
    std::int64_t total = 0;
    for (int i = 0; i < rows; ++i)
      if (perm[i] < cols) total += w[i][perm[i]];
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("sampling a single-triangle carrier") {
  const SampledLabels s = samplePoints(singleTriangle(), 500, 9);
  CHECK(s.size() == 500);
  for (int l : s.labels) CHECK(l == 4);
  for (const Vec3& p : s.points) {
    CHECK(p.x >= 0.0);
    CHECK(p.y >= 0.0);
    CHECK(p.x + p.y <= 1.0 + 1e-12);
    CHECK(p.z == 0.0);
  }
}

TEST_CASE("sampling is area weighted: two equal parts within 3 sigma of binomial") {
  const SampledLabels s = samplePoints(twoPartSquare(), 10000, 123);
  const long count1 = std::count(s.labels.begin(), s.labels.end(), 1);
  // binomial(10^4, 1/2): mean 5000, sigma 50.
  CHECK(count1 > 5000 - 150);
  CHECK(count1 < 5000 + 150);
}

TEST_CASE("sampling determinism and seed sensitivity") {
  const Carrier c = twoPartSquare();
  const SampledLabels a = samplePoints(c, 1000, 7);
  const SampledLabels b = samplePoints(c, 1000, 7);
  CHECK(a.points == b.points);
  CHECK(a.labels == b.labels);
  const SampledLabels d = samplePoints(c, 1000, 8);
  CHECK(a.points != d.points);
}

TEST_CASE("empty carrier cannot be sampled") {
  Carrier c;
  CHECK_THROWS_AS(samplePoints(c, 10, 0), Error);
}

TEST_CASE("transfer: identical target returns identical labels") {
  const Carrier c = twoPartSquare();
  const SampledLabels s = samplePoints(c, 2000, 5);
  const SampledLabels t = transferLabels(s, c);
  // Points keep the label of their nearest vertex; on the shared boundary
  // column the vertex label is part 1 (lowest incident triangle), so only
  // compare away from the boundary.
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s.points[i].x - 1.0) < 0.5) continue;
    CHECK(t.labels[i] == s.labels[i]);
  }
}

TEST_CASE("transfer: single-label target labels everything") {
  const SampledLabels s = samplePoints(twoPartSquare(), 100, 3);
  const SampledLabels t = transferLabels(s, singleTriangle());
  for (int l : t.labels) CHECK(l == 4);
}

TEST_CASE("transfer equals a brute-force nearest-neighbor scan") {
  std::mt19937_64 eng(31);
  auto uniform = [&] { return (eng() >> 11) * 0x1.0p-53; };
  Carrier target;
  for (int i = 0; i < 60; ++i) {
    target.vertices.push_back({uniform(), uniform(), uniform()});
  }
  for (int i = 0; i + 2 < 60; i += 3) {
    target.triangles.push_back({i, i + 1, i + 2});
    target.partLabel.push_back(i % 7);
    target.sourceFace.push_back(0);
    target.primitive.push_back(PrimitiveType::Other);
  }
  const std::vector<int> vLabels = vertexLabels(target);
  SampledLabels pts;
  for (int i = 0; i < 300; ++i) {
    pts.points.push_back({uniform() * 1.4 - 0.2, uniform() * 1.4 - 0.2, uniform() * 1.4 - 0.2});
    pts.labels.push_back(0);
  }
  const SampledLabels got = transferLabels(pts, target);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    int best = -1;
    double bestD2 = std::numeric_limits<double>::max();
    for (std::size_t v = 0; v < target.vertices.size(); ++v) {
      const double d2 = norm2(target.vertices[v] - pts.points[i]);
      if (d2 < bestD2) {
        bestD2 = d2;
        best = static_cast<int>(v);
      }
    }
    CHECK(got.labels[i] == vLabels[best]);
  }
}

TEST_CASE("alignment recovers a label permutation exactly") {
  const Carrier c = twoPartSquare();
  const SampledLabels ref = samplePoints(c, 4000, 17);
  SampledLabels cand = ref;
  for (int& l : cand.labels) l = (l == 1) ? 9 : 4;  // permute label names
  const auto matching = alignLabels(ref, cand);
  REQUIRE(matching.size() == 2);
  CHECK(matching[0] == std::pair<int, int>{1, 9});
  CHECK(matching[1] == std::pair<int, int>{2, 4});
  const AgreementReport rep = agreement(ref, cand, {}, {});
  CHECK(rep.accuracy == 1.0);
  CHECK(rep.meanIoU == 1.0);
  CHECK(rep.boundaryAccuracy == 1.0);
}

TEST_CASE("three reference labels vs two candidate labels leaves one unmatched") {
  SampledLabels ref, cand;
  for (int i = 0; i < 90; ++i) {
    ref.points.push_back({double(i), 0, 0});
    cand.points.push_back({double(i), 0, 0});
    ref.labels.push_back(i / 30);      // 0, 1, 2
    cand.labels.push_back(i < 30 ? 0 : 1);
  }
  const AgreementReport rep = agreement(ref, cand, {}, {});
  CHECK(rep.matched.size() == 2);
  CHECK(rep.unmatchedRef.size() == 1);
  CHECK(rep.unmatchedCand.empty());
  CHECK(rep.perLabelIoU.at(rep.unmatchedRef[0]) == 0.0);
}

TEST_CASE("hungarian objective equals brute force on 500 random matrices") {
  std::mt19937_64 eng(404);
  for (int trial = 0; trial < 500; ++trial) {
    const int rows = 1 + int(eng() % 6);
    const int cols = 1 + int(eng() % 6);
    std::vector<std::vector<std::int64_t>> w(rows, std::vector<std::int64_t>(cols));
    for (auto& row : w)
      for (auto& x : row) x = eng() % 1000;
    CHECK(hungarianObjective(w) == bruteForceObjective(w));
  }
}

TEST_CASE("agreement identities") {
  const Carrier c = twoPartSquare();
  const SampledLabels ref = samplePoints(c, 5000, 2);
  SUBCASE("ref vs itself is perfect") {
    const SampledLabels b = sampleBoundaryPoints(c, 100, 0.01);
    const AgreementReport rep = agreement(ref, ref, b, b);
    CHECK(rep.accuracy == 1.0);
    CHECK(rep.meanIoU == 1.0);
    CHECK(rep.boundaryAccuracy == 1.0);
  }
  SUBCASE("constant candidate on two equal parts: accuracy 1/2, mIoU 1/4") {
    SampledLabels ref2, cand;
    for (int i = 0; i < 1000; ++i) {
      ref2.points.push_back({double(i), 0, 0});
      cand.points.push_back({double(i), 0, 0});
      ref2.labels.push_back(i < 500 ? 1 : 2);
      cand.labels.push_back(1);
    }
    const AgreementReport rep = agreement(ref2, cand, {}, {});
    CHECK(rep.accuracy == 0.5);
    CHECK(std::abs(rep.meanIoU - 0.25) < 1e-12);
  }
}

TEST_CASE("metrics stay in range on random labelings; mIoU 1 iff identical") {
  std::mt19937_64 eng(5150);
  for (int trial = 0; trial < 40; ++trial) {
    SampledLabels ref, cand;
    const int n = 50 + int(eng() % 200);
    for (int i = 0; i < n; ++i) {
      ref.points.push_back({double(i), 0, 0});
      cand.points.push_back({double(i), 0, 0});
      ref.labels.push_back(int(eng() % 5));
      cand.labels.push_back(int(eng() % 5));
    }
    const AgreementReport rep = agreement(ref, cand, {}, {});
    CHECK(rep.accuracy >= 0.0);
    CHECK(rep.accuracy <= 1.0);
    CHECK(rep.meanIoU >= 0.0);
    CHECK(rep.meanIoU <= 1.0);
    if (rep.meanIoU == 1.0) {
      // Mapping the candidate labels must reproduce ref exactly.
      CHECK(rep.accuracy == 1.0);
    }
  }
}

TEST_CASE("accuracy is symmetric for equal-cardinality bijective matchings") {
  std::mt19937_64 eng(88);
  for (int trial = 0; trial < 20; ++trial) {
    SampledLabels a, b;
    const int n = 200;
    for (int i = 0; i < n; ++i) {
      a.points.push_back({double(i), 0, 0});
      b.points.push_back({double(i), 0, 0});
      a.labels.push_back(int(eng() % 4));
      b.labels.push_back(int(eng() % 4));
    }
    // Force equal label sets on both sides.
    for (int l = 0; l < 4; ++l) {
      a.labels[l] = l;
      b.labels[l] = l;
    }
    const AgreementReport ab = agreement(a, b, {}, {});
    const AgreementReport ba = agreement(b, a, {}, {});
    if (ab.matched.size() == 4 && ba.matched.size() == 4) CHECK(ab.accuracy == ba.accuracy);
  }
}

TEST_CASE("boundary samples live in the band and carry both side labels") {
  const Carrier c = twoPartSquare();
  const double diag = c.bounds().diagonal();
  const SampledLabels b = sampleBoundaryPoints(c, 50, 0.01);
  REQUIRE(b.size() > 0);
  int ones = 0, twos = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    // Boundary is the segment x = 1.
    CHECK(std::abs(b.points[i].x - 1.0) <= 0.01 * diag + 1e-12);
    if (b.labels[i] == 1) ++ones;
    if (b.labels[i] == 2) ++twos;
  }
  CHECK(ones == twos);
}

TEST_CASE("self consistency on the cube is exact for every spec pair") {
  const BRepSolid solid = buildFixture("cube.step");
  for (const auto& alt : {TessellationSpec::t1(), TessellationSpec::t2()}) {
    const AgreementReport rep =
        selfConsistency(solid, TessellationSpec::t0(), alt, 8.0, 20, 20000, 5, 0.01);
    CHECK(rep.accuracy == 1.0);
    CHECK(rep.meanIoU == 1.0);
    CHECK(rep.boundaryAccuracy == 1.0);
  }
}

TEST_CASE("self consistency with identical specs is exactly 1") {
  const BRepSolid solid = buildFixture("split_cylinder.step");
  const AgreementReport rep =
      selfConsistency(solid, TessellationSpec::t0(), TessellationSpec::t0(), 8.0, 20, 20000, 5,
                      0.01);
  CHECK(rep.accuracy == 1.0);
  CHECK(rep.meanIoU == 1.0);
  CHECK(rep.boundaryAccuracy == 1.0);
}

TEST_CASE("split cylinder self consistency across t0/t2") {
  const BRepSolid solid = buildFixture("split_cylinder.step");
  SUBCASE("default post-processing (tau 20) absorbs the caps on both sides") {
    const AgreementReport rep =
        selfConsistency(solid, TessellationSpec::t0(), TessellationSpec::t2(), 8.0, 20, 20000, 5,
                        0.01);
    CHECK(rep.meanIoU >= 0.95);
  }
  SUBCASE("structure-preserving run (tau 0) stays above 0.95") {
    const AgreementReport rep =
        selfConsistency(solid, TessellationSpec::t0(), TessellationSpec::t2(), 8.0, 0, 20000, 5,
                        0.01);
    CHECK(rep.meanIoU >= 0.95);
    CHECK(rep.accuracy >= 0.95);
    // Frozen on the first verified run; the pipeline is deterministic.
    CHECK(rep.meanIoU == doctest::Approx(0.98038484569866291).epsilon(1e-12));
    CHECK(rep.accuracy == doctest::Approx(0.99480000000000002).epsilon(1e-12));
  }
}
