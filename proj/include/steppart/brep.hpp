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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "steppart/geom.hpp"
#include "steppart/step21.hpp"

namespace steppart {

enum class PrimitiveType {
  Plane,
  Cylinder,
  Cone,
  Sphere,
  Torus,
  ExtrusionSurface,
  RevolutionSurface,
  BSpline,
  Other,
};

const char* primitiveName(PrimitiveType t);

/// Right-handed placement frame (origin, x, y, z) with unit axes.
struct Frame {
  Vec3 origin{0, 0, 0};
  Vec3 x{1, 0, 0};
  Vec3 y{0, 1, 0};
  Vec3 z{0, 0, 1};

  Vec3 toWorld(const Vec3& local) const {
    return origin + x * local.x + y * local.y + z * local.z;
  }
  Vec3 toLocal(const Vec3& p) const {
    const Vec3 q = p - origin;
    return {dot(q, x), dot(q, y), dot(q, z)};
  }
  Vec3 dirToWorld(const Vec3& d) const { return x * d.x + y * d.y + z * d.z; }
};

struct BSplineCurveData {
  int degree = 0;
  std::vector<double> knots;       // full knot vector (multiplicities expanded)
  std::vector<Vec3> control;
  std::vector<double> weights;     // empty = polynomial
  double tMin() const { return knots[degree]; }
  double tMax() const { return knots[knots.size() - 1 - degree]; }
};

struct CurveGeom {
  enum class Kind { Line, Circle, Ellipse, BSpline };

  Kind kind = Kind::Line;
  Frame frame;             // circle/ellipse placement
  Vec3 lineOrigin{0, 0, 0};
  Vec3 lineDir{1, 0, 0};   // includes the VECTOR magnitude
  double radius = 0.0;     // circle
  double semiMajor = 0.0;  // ellipse
  double semiMinor = 0.0;  // ellipse
  BSplineCurveData bspline;
};

Vec3 evalCurve(const CurveGeom& c, double t);
Vec3 evalCurveTangent(const CurveGeom& c, double t);

struct BSplineSurfaceData {
  int degreeU = 0, degreeV = 0;
  int numU = 0, numV = 0;          // control net dimensions
  std::vector<double> knotsU, knotsV;
  std::vector<Vec3> control;       // row-major: control[iu * numV + iv]
  std::vector<double> weights;     // empty = polynomial
  double uMin() const { return knotsU[degreeU]; }
  double uMax() const { return knotsU[knotsU.size() - 1 - degreeU]; }
  double vMin() const { return knotsV[degreeV]; }
  double vMax() const { return knotsV[knotsV.size() - 1 - degreeV]; }
};

struct SurfaceGeom {
  PrimitiveType type = PrimitiveType::Other;
  std::int64_t stepId = 0;
  Frame frame;
  double radius = 0.0;      // cylinder/sphere/cone reference radius, torus major radius
  double minorRadius = 0.0; // torus
  double semiAngle = 0.0;   // cone, radians, in (0, pi/2)
  BSplineSurfaceData bspline;
  CurveGeom sweptCurve;     // extrusion / revolution profile
  Vec3 extrusionDir{0, 0, 1};
  // Seed bounds for iterative inversion on surfaces with an unbounded or
  // curve-valued parameter; set during build from the model extent.
  double seedULo = 0.0, seedUHi = 1.0;
  double seedVLo = 0.0, seedVHi = 1.0;
};

struct SurfacePoint {
  Vec3 point;
  Vec3 normal;            // unit, natural orientation of the parameterization
  bool singular = false;  // pole/apex: normal from the limit formula
};

/// Evaluate point and natural unit normal. Periodic directions accept any
/// parameter value (wrapped internally).
SurfacePoint evalSurface(const SurfaceGeom& s, double u, double v);

/// Point plus first partials, for projection iterations.
void evalSurfaceDerivs(const SurfaceGeom& s, double u, double v, Vec3& p, Vec3& su, Vec3& sv);

/// Recover (u, v) for a point on (or near) the surface. Closed form for the
/// five analytic primitives; seeded damped Gauss-Newton otherwise.
/// Returns nullopt when the iteration does not converge.
std::optional<Vec2> invertPoint(const SurfaceGeom& s, const Vec3& p);

/// Parameter period per direction (0 = not periodic).
void surfacePeriods(const SurfaceGeom& s, double& uPeriod, double& vPeriod);

/// Natural parameter box (periodic direction: one period; unbounded
/// direction: the seed bounds).
void surfaceDomain(const SurfaceGeom& s, double& uLo, double& uHi, double& vLo, double& vHi);

struct OrientedEdgeRef {
  int edge = -1;
  bool orientation = true;  // traversal follows the edge's logical direction
};

struct Loop {
  bool outer = false;
  std::vector<OrientedEdgeRef> edges;
};

struct FaceIncidence {
  int face = -1;
  bool orientation = true;
};

struct TopoEdge {
  int id = -1;
  std::int64_t stepId = 0;
  CurveGeom curve;
  double t0 = 0.0, t1 = 0.0;  // natural parameter range, t0 <= t1
  Vec3 start, end;            // positions at t0 and t1
  bool senseAgrees = true;    // logical edge direction follows increasing parameter
  bool closed = false;        // start and end vertex coincide
  std::vector<FaceIncidence> incidences;

  double midParam() const { return 0.5 * (t0 + t1); }
};

struct Face {
  int id = -1;
  std::int64_t stepId = 0;
  int surface = -1;
  bool sameSense = true;
  PrimitiveType type = PrimitiveType::Other;
  std::vector<Loop> loops;
};

struct BRepSolid {
  std::vector<Face> faces;
  std::vector<TopoEdge> edges;
  std::vector<SurfaceGeom> surfaces;
  std::vector<std::vector<int>> shells;
  Aabb bbox;
  double diag = 1.0;
  double tolVertex = 1e-6;
  double tolOnSurface = 1e-5;
  std::vector<std::string> warnings;

  const SurfaceGeom& surfaceOf(const Face& f) const { return surfaces[f.surface]; }

  /// Outward normal at (u, v) on a face: natural normal flipped by same-sense.
  Vec3 faceNormal(const Face& f, double u, double v) const {
    const Vec3 n = evalSurface(surfaces[f.surface], u, v).normal;
    return f.sameSense ? n : -n;
  }
};

/// Primitive class from the surface entity keyword alone.
PrimitiveType classifySurface(const EntityRecord& ent);

/// Reconstruct the typed B-Rep from a parsed entity graph. Throws
/// steppart::Error (stage "build") when no shell-bearing entity exists, a
/// geometry reference cannot be resolved, or surface parameters are
/// degenerate.
BRepSolid buildBRep(const StepEntityGraph& graph);

/// Evaluate a topological edge at curve parameter t (must lie in [t0, t1]
/// up to a small slack).
Vec3 evalEdge(const TopoEdge& e, double t);

}  // namespace steppart
