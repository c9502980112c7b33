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

#include "steppart/error.hpp"
#include "steppart/step21.hpp"
#include "test_support.hpp"

using namespace steppart;
using steppart::testing::readFixture;

namespace {

const char* kMinimal =
    "ISO-10303-21;\n"
    "HEADER;\n"
    "FILE_DESCRIPTION((''),'2;1');\n"
    "FILE_NAME('','',(),(),'','','');\n"
    "FILE_SCHEMA(('X'));\n"
    "ENDSEC;\n"
    "DATA;\n"
    "ENDSEC;\n"
    "END-ISO-10303-21;\n";

}  // namespace

TEST_CASE("minimal file parses to an empty graph") {
  const StepEntityGraph g = parseStep(kMinimal);
  CHECK(g.entities.empty());
  CHECK(g.header.schema() == "X");
  CHECK(entityStats(g).empty());
}

TEST_CASE("single entity") {
  const std::string text =
      "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\n"
      "#1=CARTESIAN_POINT('',(0.,0.,0.));\n"
      "ENDSEC;\nEND-ISO-10303-21;\n";
  const StepEntityGraph g = parseStep(text);
  REQUIRE(g.entities.size() == 1);
  const EntityRecord& e = g.at(1);
  CHECK(e.keyword() == "CARTESIAN_POINT");
  CHECK(e.args().size() == 2);
  CHECK(e.args()[1].isList());
  CHECK(e.args()[1].list[0].real == 0.0);
}

TEST_CASE("cube fixture matches its manifest") {
  const StepEntityGraph g = parseStep(readFixture("cube.step"));
  const auto stats = entityStats(g);
  CHECK(stats.at("ADVANCED_FACE") == 6);
  CHECK(stats.at("PLANE") == 6);
  CHECK(stats.at("EDGE_CURVE") == 12);
  CHECK(stats.at("VERTEX_POINT") == 8);
  CHECK(stats.at("CARTESIAN_POINT") == 8);
  CHECK(stats.at("DIRECTION") == 6);
  CHECK(stats.at("VECTOR") == 3);
  CHECK(stats.at("LINE") == 12);
  CHECK(stats.at("ORIENTED_EDGE") == 24);
  CHECK(stats.at("EDGE_LOOP") == 6);
  CHECK(stats.at("FACE_OUTER_BOUND") == 6);
  CHECK(stats.at("AXIS2_PLACEMENT_3D") == 6);
  CHECK(stats.at("CLOSED_SHELL") == 1);
  CHECK(stats.at("MANIFOLD_SOLID_BREP") == 1);
}

TEST_CASE("unsupported keywords are retained, not fatal") {
  const std::string text =
      "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\n"
      "#1=COLOUR_RGB('',1.,0.,0.);\n"
      "ENDSEC;\nEND-ISO-10303-21;\n";
  const StepEntityGraph g = parseStep(text);
  CHECK(entityStats(g).at("COLOUR_RGB") == 1);
}

TEST_CASE("round trip: parse, serialize, parse is the identity") {
  for (const char* name : {"cube.step", "split_cylinder.step", "filleted_block.step"}) {
    const StepEntityGraph a = parseStep(readFixture(name));
    const StepEntityGraph b = parseStep(serializeStep(a));
    CHECK(a == b);
  }
}

TEST_CASE("parse is deterministic") {
  const std::string text = readFixture("split_cylinder.step");
  CHECK(parseStep(text) == parseStep(text));
}

TEST_CASE("complex multi-keyword instances keep every constituent") {
  const std::string text =
      "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\n"
      "#1=CARTESIAN_POINT('',(0.,0.,0.));\n"
      "#2=CARTESIAN_POINT('',(1.,0.,0.));\n"
      "#3=(BOUNDED_CURVE()B_SPLINE_CURVE(1,(#1,#2),.UNSPECIFIED.,.F.,.F.)"
      "B_SPLINE_CURVE_WITH_KNOTS((2,2),(0.,1.),.UNSPECIFIED.)CURVE()"
      "GEOMETRIC_REPRESENTATION_ITEM()RATIONAL_B_SPLINE_CURVE((1.,1.))"
      "REPRESENTATION_ITEM(''));\n"
      "ENDSEC;\nEND-ISO-10303-21;\n";
  const StepEntityGraph g = parseStep(text);
  const EntityRecord& e = g.at(3);
  CHECK(e.complex);
  CHECK(e.records.size() == 7);
  CHECK(e.is("B_SPLINE_CURVE_WITH_KNOTS"));
  const auto* rational = e.find("RATIONAL_B_SPLINE_CURVE");
  REQUIRE(rational != nullptr);
  CHECK((*rational)[0].list.size() == 2);
  // Lossless through a round trip.
  CHECK(parseStep(serializeStep(g)) == g);
  const auto stats = entityStats(g);
  CHECK(stats.at("B_SPLINE_CURVE") == 1);
  CHECK(stats.at("RATIONAL_B_SPLINE_CURVE") == 1);
}

TEST_CASE("string escapes") {
  const std::string text =
      "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\n"
      "#1=WIDGET('it''s \\X2\\00E9\\X0\\ here');\n"
      "ENDSEC;\nEND-ISO-10303-21;\n";
  const StepEntityGraph g = parseStep(text);
  CHECK(g.at(1).args()[0].text == "it's \\X2\\00E9\\X0\\ here");
  CHECK(parseStep(serializeStep(g)) == g);
}

TEST_CASE("number forms") {
  const std::string text =
      "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\n"
      "#1=W(1.E1,-2,0.5,3.25E-2,7);\n"
      "ENDSEC;\nEND-ISO-10303-21;\n";
  const StepEntityGraph g = parseStep(text);
  const auto& args = g.at(1).args();
  CHECK(args[0].kind == PValue::Kind::Real);
  CHECK(args[0].real == 10.0);
  CHECK(args[1].kind == PValue::Kind::Integer);
  CHECK(args[1].integer == -2);
  CHECK(args[2].real == 0.5);
  CHECK(args[3].real == 0.0325);
  CHECK(args[4].kind == PValue::Kind::Integer);
  CHECK(parseStep(serializeStep(g)) == g);
}

TEST_CASE("error: missing DATA section") {
  CHECK_THROWS_WITH_AS(parseStep("ISO-10303-21;\nHEADER;\nENDSEC;\n"),
                       doctest::Contains("missing DATA"), Error);
}

TEST_CASE("error: does not begin with ISO-10303-21") {
  CHECK_THROWS_AS(parseStep("HELLO;\nDATA;\nENDSEC;\n"), Error);
}

TEST_CASE("error: dangling reference") {
  const std::string text =
      "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\n"
      "#1=VERTEX_POINT('',#99);\n"
      "ENDSEC;\nEND-ISO-10303-21;\n";
  CHECK_THROWS_WITH_AS(parseStep(text), doctest::Contains("#99"), Error);
}

TEST_CASE("error: malformed syntax is position annotated") {
  const std::string text =
      "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\n"
      "#1=CARTESIAN_POINT('',(0.,0.,0.);\n"  // missing ')'
      "ENDSEC;\nEND-ISO-10303-21;\n";
  try {
    parseStep(text);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.stage() == "parse");
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("error: duplicate instance ids") {
  const std::string text =
      "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\n"
      "#1=A();\n#1=B();\n"
      "ENDSEC;\nEND-ISO-10303-21;\n";
  CHECK_THROWS_AS(parseStep(text), Error);
}
