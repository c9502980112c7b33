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

#include "steppart/brep.hpp"
#include "steppart/error.hpp"
#include "test_support.hpp"

using namespace steppart;
using namespace steppart::testing;

TEST_CASE("cube builds as six planes with two-incidence edges") {
  const BRepSolid solid = buildFixture("cube.step");
  REQUIRE(solid.faces.size() == 6);
  for (const auto& f : solid.faces) CHECK(f.type == PrimitiveType::Plane);
  REQUIRE(solid.edges.size() == 12);
  for (const auto& e : solid.edges) CHECK(e.incidences.size() == 2);
  CHECK(solid.diag == doctest::Approx(10.0 * std::sqrt(3.0)));
}

TEST_CASE("split cylinder builds as two cylinder faces and two planes") {
  const BRepSolid solid = buildFixture("split_cylinder.step");
  REQUIRE(solid.faces.size() == 4);
  int cylinders = 0, planes = 0;
  for (const auto& f : solid.faces) {
    if (f.type == PrimitiveType::Cylinder) ++cylinders;
    if (f.type == PrimitiveType::Plane) ++planes;
  }
  CHECK(cylinders == 2);
  CHECK(planes == 2);
  // Both lateral halves share the one cylindrical surface instance.
  CHECK(solid.faces[0].surface == solid.faces[1].surface);
}

TEST_CASE("no shell-bearing entity is an error") {
  const std::string text =
      "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\n"
      "#1=CARTESIAN_POINT('',(0.,0.,0.));\n"
      "ENDSEC;\nEND-ISO-10303-21;\n";
  CHECK_THROWS_WITH_AS(buildBRep(parseStep(text)), doctest::Contains("no-shell-found"), Error);
}

TEST_CASE("surface evaluation closed forms") {
  SUBCASE("plane") {
    SurfaceGeom s;
    s.type = PrimitiveType::Plane;
    const SurfacePoint p = evalSurface(s, 1.0, 2.0);
    CHECK(p.point == Vec3{1, 2, 0});
    CHECK(p.normal == Vec3{0, 0, 1});
  }
  SUBCASE("cylinder radius 2") {
    SurfaceGeom s;
    s.type = PrimitiveType::Cylinder;
    s.radius = 2.0;
    const SurfacePoint p = evalSurface(s, 0.0, 5.0);
    CHECK(distance(p.point, {2, 0, 5}) < 1e-15);
    CHECK(distance(p.normal, {1, 0, 0}) < 1e-15);
  }
  SUBCASE("unit sphere: |point| = 1 and normal = point") {
    SurfaceGeom s;
    s.type = PrimitiveType::Sphere;
    s.radius = 1.0;
    std::mt19937_64 eng(7);
    for (int i = 0; i < 32; ++i) {
      const double u = kTwoPi * (eng() >> 11) * 0x1.0p-53;
      const double v = kPi * ((eng() >> 11) * 0x1.0p-53 - 0.5);
      const SurfacePoint p = evalSurface(s, u, v);
      CHECK(norm(p.point) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(distance(p.normal, p.point) < 1e-12);
    }
  }
  SUBCASE("cone apex is flagged singular, with a finite limit normal") {
    SurfaceGeom s;
    s.type = PrimitiveType::Cone;
    s.radius = 1.0;
    s.semiAngle = kPi / 6.0;
    const double vApex = -1.0 / std::sin(s.semiAngle);
    const SurfacePoint apex = evalSurface(s, 0.7, vApex);
    CHECK(apex.singular);
    CHECK(norm(apex.normal) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(evalSurface(s, 0.7, 0.0).singular);
  }

  SUBCASE("sphere pole is flagged singular") {
    SurfaceGeom s;
    s.type = PrimitiveType::Sphere;
    s.radius = 1.0;
    CHECK(evalSurface(s, 0.3, kPi / 2.0).singular);
    CHECK_FALSE(evalSurface(s, 0.3, 0.0).singular);
  }
}

TEST_CASE("point inversion closed forms") {
  SUBCASE("plane") {
    SurfaceGeom s;
    s.type = PrimitiveType::Plane;
    const auto uv = invertPoint(s, {3, 4, 0});
    REQUIRE(uv.has_value());
    CHECK(uv->x == 3.0);
    CHECK(uv->y == 4.0);
  }
  SUBCASE("cylinder radius 2") {
    SurfaceGeom s;
    s.type = PrimitiveType::Cylinder;
    s.radius = 2.0;
    const auto uv = invertPoint(s, {0, 2, 5});
    REQUIRE(uv.has_value());
    CHECK(uv->x == doctest::Approx(kPi / 2.0).epsilon(1e-14));
    CHECK(uv->y == 5.0);
  }
  SUBCASE("torus") {
    SurfaceGeom s;
    s.type = PrimitiveType::Torus;
    s.radius = 3.0;
    s.minorRadius = 1.0;
    const SurfacePoint p = evalSurface(s, 1.0, 2.0);
    const auto uv = invertPoint(s, p.point);
    REQUIRE(uv.has_value());
    CHECK(uv->x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(uv->y == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("bspline patch inversion round trip on 100 random points") {
  const SurfaceGeom s = bsplinePatch();
  std::mt19937_64 eng(42);
  auto uniform = [&] { return (eng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < 100; ++i) {
    const double u = 0.02 + 0.96 * uniform();
    const double v = 0.02 + 0.96 * uniform();
    const Vec3 p = evalSurface(s, u, v).point;
    const auto uv = invertPoint(s, p);
    REQUIRE(uv.has_value());
    CHECK(std::abs(uv->x - u) < 1e-6);
    CHECK(std::abs(uv->y - v) < 1e-6);
  }
}

TEST_CASE("edge evaluation") {
  SUBCASE("line") {
    TopoEdge e;
    e.curve.kind = CurveGeom::Kind::Line;
    e.curve.lineOrigin = {0, 0, 0};
    e.curve.lineDir = {1, 0, 0};
    e.t0 = 0;
    e.t1 = 5;
    CHECK(evalEdge(e, 2.0) == Vec3{2, 0, 0});
    CHECK_THROWS_AS(evalEdge(e, 7.0), Error);
  }
  SUBCASE("unit circle at t = pi") {
    TopoEdge e;
    e.curve.kind = CurveGeom::Kind::Circle;
    e.curve.radius = 1.0;
    e.t0 = 0;
    e.t1 = kTwoPi;
    const Vec3 p = evalEdge(e, kPi);
    CHECK(distance(p, {-1, 0, 0}) < 1e-15);
  }
}

TEST_CASE("edge endpoints and midpoints are consistent on fixtures") {
  for (const char* name : {"cube.step", "split_cylinder.step", "filleted_block.step"}) {
    const BRepSolid solid = buildFixture(name);
    CHECK(solid.warnings.empty());
    for (const auto& e : solid.edges) {
      CHECK(distance(evalCurve(e.curve, e.t0), e.start) <= solid.tolVertex);
      CHECK(distance(evalCurve(e.curve, e.t1), e.end) <= solid.tolVertex);
      if (e.incidences.size() != 2) continue;
      // Mid-parameter point lies on both incident surfaces.
      const Vec3 mid = evalCurve(e.curve, e.midParam());
      for (const auto& inc : e.incidences) {
        const SurfaceGeom& s = solid.surfaceOf(solid.faces[inc.face]);
        const auto uv = invertPoint(s, mid);
        REQUIRE(uv.has_value());
        CHECK(distance(evalSurface(s, uv->x, uv->y).point, mid) <= solid.tolOnSurface);
      }
    }
  }
}

TEST_CASE("classification is total and keyword-driven") {
  auto classify = [](const std::string& keyword) {
    EntityRecord e;
    e.id = 1;
    SimpleRecord r;
    r.keyword = keyword;
    e.records.push_back(r);
    return classifySurface(e);
  };
  CHECK(classify("PLANE") == PrimitiveType::Plane);
  CHECK(classify("CYLINDRICAL_SURFACE") == PrimitiveType::Cylinder);
  CHECK(classify("CONICAL_SURFACE") == PrimitiveType::Cone);
  CHECK(classify("SPHERICAL_SURFACE") == PrimitiveType::Sphere);
  CHECK(classify("TOROIDAL_SURFACE") == PrimitiveType::Torus);
  CHECK(classify("SURFACE_OF_LINEAR_EXTRUSION") == PrimitiveType::ExtrusionSurface);
  CHECK(classify("SURFACE_OF_REVOLUTION") == PrimitiveType::RevolutionSurface);
  CHECK(classify("B_SPLINE_SURFACE_WITH_KNOTS") == PrimitiveType::BSpline);
  CHECK(classify("OFFSET_SURFACE") == PrimitiveType::Other);
  CHECK(classify("WEIRD_THING") == PrimitiveType::Other);
}

TEST_CASE("degenerate surface parameters are build errors") {
  std::string text = readFixture("split_cylinder.step");
  const std::string bad = "CYLINDRICAL_SURFACE('lateral',#31,-5.)";
  const std::string good = "CYLINDRICAL_SURFACE('lateral',#31,5.)";
  text.replace(text.find(good), good.size(), bad);
  CHECK_THROWS_WITH_AS(buildBRep(parseStep(text)), doctest::Contains("degenerate"), Error);
}
