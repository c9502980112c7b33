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

#include "steppart/brep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "steppart/error.hpp"

namespace steppart {

const char* primitiveName(PrimitiveType t) {
  switch (t) {
    case PrimitiveType::Plane: return "plane";
    case PrimitiveType::Cylinder: return "cylinder";
    case PrimitiveType::Cone: return "cone";
    case PrimitiveType::Sphere: return "sphere";
    case PrimitiveType::Torus: return "torus";
    case PrimitiveType::ExtrusionSurface: return "extrusion";
    case PrimitiveType::RevolutionSurface: return "revolution";
    case PrimitiveType::BSpline: return "bspline";
    case PrimitiveType::Other: return "other";
  }
  return "other";
}

PrimitiveType classifySurface(const EntityRecord& ent) {
  if (ent.is("PLANE")) return PrimitiveType::Plane;
  if (ent.is("CYLINDRICAL_SURFACE")) return PrimitiveType::Cylinder;
  if (ent.is("CONICAL_SURFACE")) return PrimitiveType::Cone;
  if (ent.is("SPHERICAL_SURFACE")) return PrimitiveType::Sphere;
  if (ent.is("TOROIDAL_SURFACE")) return PrimitiveType::Torus;
  if (ent.is("SURFACE_OF_LINEAR_EXTRUSION")) return PrimitiveType::ExtrusionSurface;
  if (ent.is("SURFACE_OF_REVOLUTION")) return PrimitiveType::RevolutionSurface;
  if (ent.is("B_SPLINE_SURFACE_WITH_KNOTS") || ent.is("B_SPLINE_SURFACE"))
    return PrimitiveType::BSpline;
  return PrimitiveType::Other;
}

// ---------------------------------------------------------------------------
// B-spline basis
// ---------------------------------------------------------------------------

namespace {

int findSpan(int numCtrl, int degree, double t, const std::vector<double>& knots) {
  const int n = numCtrl - 1;
  if (t >= knots[n + 1]) return n;
  if (t <= knots[degree]) return degree;
  int lo = degree, hi = n + 1;
  int mid = (lo + hi) / 2;
  while (t < knots[mid] || t >= knots[mid + 1]) {
    if (t < knots[mid])
      hi = mid;
    else
      lo = mid;
    mid = (lo + hi) / 2;
  }
  return mid;
}

// Nonzero basis functions N[0..degree] at t, plus first derivatives.
void basisFunsDeriv(int span, double t, int degree, const std::vector<double>& knots,
                    std::vector<double>& val, std::vector<double>& der) {
  const int p = degree;
  std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
  std::vector<double> left(p + 1, 0.0), right(p + 1, 0.0);
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = t - knots[span + 1 - j];
    right[j] = knots[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  val.assign(p + 1, 0.0);
  der.assign(p + 1, 0.0);
  for (int j = 0; j <= p; ++j) val[j] = ndu[j][p];
  // First derivative from the (p-1)-degree functions.
  for (int r = 0; r <= p; ++r) {
    double d = 0.0;
    if (p > 0) {
      if (r >= 1) {
        const double denom = ndu[p][r - 1];
        if (denom != 0.0) d += ndu[r - 1][p - 1] / denom;
      }
      if (r <= p - 1) {
        const double denom = ndu[p][r];
        if (denom != 0.0) d -= ndu[r][p - 1] / denom;
      }
      d *= p;
    }
    der[r] = d;
  }
}

void evalBSplineCurve(const BSplineCurveData& c, double t, Vec3* point, Vec3* tangent) {
  const int numCtrl = static_cast<int>(c.control.size());
  const double tc = std::clamp(t, c.tMin(), c.tMax());
  const int span = findSpan(numCtrl, c.degree, tc, c.knots);
  std::vector<double> val, der;
  basisFunsDeriv(span, tc, c.degree, c.knots, val, der);

  const bool rational = !c.weights.empty();
  Vec3 a{0, 0, 0}, da{0, 0, 0};
  double w = 0.0, dw = 0.0;
  for (int j = 0; j <= c.degree; ++j) {
    const int idx = span - c.degree + j;
    const double wj = rational ? c.weights[idx] : 1.0;
    a += c.control[idx] * (val[j] * wj);
    da += c.control[idx] * (der[j] * wj);
    w += val[j] * wj;
    dw += der[j] * wj;
  }
  const Vec3 p = a * (1.0 / w);
  if (point) *point = p;
  if (tangent) *tangent = (da - p * dw) * (1.0 / w);
}

void evalBSplineSurface(const BSplineSurfaceData& s, double u, double v, Vec3& p, Vec3& su,
                        Vec3& sv) {
  const double uc = std::clamp(u, s.uMin(), s.uMax());
  const double vc = std::clamp(v, s.vMin(), s.vMax());
  const int spanU = findSpan(s.numU, s.degreeU, uc, s.knotsU);
  const int spanV = findSpan(s.numV, s.degreeV, vc, s.knotsV);
  std::vector<double> nu, dnu, nv, dnv;
  basisFunsDeriv(spanU, uc, s.degreeU, s.knotsU, nu, dnu);
  basisFunsDeriv(spanV, vc, s.degreeV, s.knotsV, nv, dnv);

  const bool rational = !s.weights.empty();
  Vec3 a{0, 0, 0}, au{0, 0, 0}, av{0, 0, 0};
  double w = 0.0, wu = 0.0, wv = 0.0;
  for (int i = 0; i <= s.degreeU; ++i) {
    const int iu = spanU - s.degreeU + i;
    for (int j = 0; j <= s.degreeV; ++j) {
      const int iv = spanV - s.degreeV + j;
      const int idx = iu * s.numV + iv;
      const double wij = rational ? s.weights[idx] : 1.0;
      const double b = nu[i] * nv[j] * wij;
      const double bu = dnu[i] * nv[j] * wij;
      const double bv = nu[i] * dnv[j] * wij;
      a += s.control[idx] * b;
      au += s.control[idx] * bu;
      av += s.control[idx] * bv;
      w += b;
      wu += bu;
      wv += bv;
    }
  }
  p = a * (1.0 / w);
  su = (au - p * wu) * (1.0 / w);
  sv = (av - p * wv) * (1.0 / w);
}

Vec3 rotateAbout(const Vec3& p, const Vec3& origin, const Vec3& axis, double angle) {
  const Vec3 q = p - origin;
  const double c = std::cos(angle), s = std::sin(angle);
  return origin + q * c + cross(axis, q) * s + axis * (dot(axis, q) * (1.0 - c));
}

}  // namespace

// ---------------------------------------------------------------------------
// Curve evaluation
// ---------------------------------------------------------------------------

Vec3 evalCurve(const CurveGeom& c, double t) {
  switch (c.kind) {
    case CurveGeom::Kind::Line:
      return c.lineOrigin + c.lineDir * t;
    case CurveGeom::Kind::Circle:
      return c.frame.toWorld({c.radius * std::cos(t), c.radius * std::sin(t), 0.0});
    case CurveGeom::Kind::Ellipse:
      return c.frame.toWorld({c.semiMajor * std::cos(t), c.semiMinor * std::sin(t), 0.0});
    case CurveGeom::Kind::BSpline: {
      Vec3 p;
      evalBSplineCurve(c.bspline, t, &p, nullptr);
      return p;
    }
  }
  return {};
}

Vec3 evalCurveTangent(const CurveGeom& c, double t) {
  switch (c.kind) {
    case CurveGeom::Kind::Line:
      return c.lineDir;
    case CurveGeom::Kind::Circle:
      return c.frame.dirToWorld({-c.radius * std::sin(t), c.radius * std::cos(t), 0.0});
    case CurveGeom::Kind::Ellipse:
      return c.frame.dirToWorld({-c.semiMajor * std::sin(t), c.semiMinor * std::cos(t), 0.0});
    case CurveGeom::Kind::BSpline: {
      Vec3 d;
      evalBSplineCurve(c.bspline, t, nullptr, &d);
      return d;
    }
  }
  return {};
}

Vec3 evalEdge(const TopoEdge& e, double t) {
  const double slack = 1e-9 * (std::abs(e.t1 - e.t0) + 1.0);
  if (t < e.t0 - slack || t > e.t1 + slack)
    throw Error("build", "edge parameter out of range");
  return evalCurve(e.curve, t);
}

// ---------------------------------------------------------------------------
// Surface evaluation
// ---------------------------------------------------------------------------

void evalSurfaceDerivs(const SurfaceGeom& s, double u, double v, Vec3& p, Vec3& su, Vec3& sv) {
  const Frame& fr = s.frame;
  switch (s.type) {
    case PrimitiveType::Plane:
      p = fr.toWorld({u, v, 0.0});
      su = fr.x;
      sv = fr.y;
      return;
    case PrimitiveType::Cylinder: {
      const double cu = std::cos(u), snu = std::sin(u);
      p = fr.toWorld({s.radius * cu, s.radius * snu, v});
      su = fr.dirToWorld({-s.radius * snu, s.radius * cu, 0.0});
      sv = fr.z;
      return;
    }
    case PrimitiveType::Cone: {
      const double cu = std::cos(u), snu = std::sin(u);
      const double r = s.radius + v * std::sin(s.semiAngle);
      p = fr.toWorld({r * cu, r * snu, v * std::cos(s.semiAngle)});
      su = fr.dirToWorld({-r * snu, r * cu, 0.0});
      sv = fr.dirToWorld({std::sin(s.semiAngle) * cu, std::sin(s.semiAngle) * snu,
                          std::cos(s.semiAngle)});
      return;
    }
    case PrimitiveType::Sphere: {
      const double cu = std::cos(u), snu = std::sin(u);
      const double cv = std::cos(v), snv = std::sin(v);
      p = fr.toWorld({s.radius * cv * cu, s.radius * cv * snu, s.radius * snv});
      su = fr.dirToWorld({-s.radius * cv * snu, s.radius * cv * cu, 0.0});
      sv = fr.dirToWorld({-s.radius * snv * cu, -s.radius * snv * snu, s.radius * cv});
      return;
    }
    case PrimitiveType::Torus: {
      const double cu = std::cos(u), snu = std::sin(u);
      const double cv = std::cos(v), snv = std::sin(v);
      const double r = s.radius + s.minorRadius * cv;
      p = fr.toWorld({r * cu, r * snu, s.minorRadius * snv});
      su = fr.dirToWorld({-r * snu, r * cu, 0.0});
      sv = fr.dirToWorld({-s.minorRadius * snv * cu, -s.minorRadius * snv * snu,
                          s.minorRadius * cv});
      return;
    }
    case PrimitiveType::ExtrusionSurface: {
      p = evalCurve(s.sweptCurve, u) + s.extrusionDir * v;
      su = evalCurveTangent(s.sweptCurve, u);
      sv = s.extrusionDir;
      return;
    }
    case PrimitiveType::RevolutionSurface: {
      // u is the rotation angle, v the profile-curve parameter.
      const Vec3 c = evalCurve(s.sweptCurve, v);
      p = rotateAbout(c, s.frame.origin, s.frame.z, u);
      su = cross(s.frame.z, p - s.frame.origin);
      const Vec3 ct = evalCurveTangent(s.sweptCurve, v);
      const double cs = std::cos(u), sn = std::sin(u);
      sv = ct * cs + cross(s.frame.z, ct) * sn + s.frame.z * (dot(s.frame.z, ct) * (1.0 - cs));
      return;
    }
    case PrimitiveType::BSpline:
      evalBSplineSurface(s.bspline, u, v, p, su, sv);
      return;
    case PrimitiveType::Other:
      throw Error("build", "cannot evaluate unsupported surface type");
  }
}

SurfacePoint evalSurface(const SurfaceGeom& s, double u, double v) {
  SurfacePoint out;
  const Frame& fr = s.frame;
  switch (s.type) {
    case PrimitiveType::Plane:
      out.point = fr.toWorld({u, v, 0.0});
      out.normal = fr.z;
      return out;
    case PrimitiveType::Cylinder: {
      const double cu = std::cos(u), snu = std::sin(u);
      out.point = fr.toWorld({s.radius * cu, s.radius * snu, v});
      out.normal = fr.dirToWorld({cu, snu, 0.0});
      return out;
    }
    case PrimitiveType::Cone: {
      const double cu = std::cos(u), snu = std::sin(u);
      const double sa = std::sin(s.semiAngle), ca = std::cos(s.semiAngle);
      const double r = s.radius + v * sa;
      out.point = fr.toWorld({r * cu, r * snu, v * ca});
      // Limit formula; also valid at the apex where the jacobian degenerates.
      out.normal = fr.dirToWorld({ca * cu, ca * snu, -sa});
      out.singular = std::abs(r) < 1e-12 * (std::abs(s.radius) + std::abs(v) + 1.0);
      return out;
    }
    case PrimitiveType::Sphere: {
      const double cu = std::cos(u), snu = std::sin(u);
      const double cv = std::cos(v), snv = std::sin(v);
      out.point = fr.toWorld({s.radius * cv * cu, s.radius * cv * snu, s.radius * snv});
      out.normal = fr.dirToWorld({cv * cu, cv * snu, snv});
      out.singular = std::abs(cv) < 1e-12;
      return out;
    }
    case PrimitiveType::Torus: {
      const double cu = std::cos(u), snu = std::sin(u);
      const double cv = std::cos(v), snv = std::sin(v);
      const double r = s.radius + s.minorRadius * cv;
      out.point = fr.toWorld({r * cu, r * snu, s.minorRadius * snv});
      out.normal = fr.dirToWorld({cv * cu, cv * snu, snv});
      return out;
    }
    default: {
      Vec3 p, su, sv;
      evalSurfaceDerivs(s, u, v, p, su, sv);
      out.point = p;
      const Vec3 n = cross(su, sv);
      const double len = norm(n);
      if (len < 1e-14) {
        // Degenerate jacobian: approximate the limit by a small offset.
        Vec3 p2, su2, sv2;
        evalSurfaceDerivs(s, u + 1e-7, v + 1e-7, p2, su2, sv2);
        out.normal = normalize(cross(su2, sv2));
        out.singular = true;
      } else {
        out.normal = n * (1.0 / len);
      }
      return out;
    }
  }
}

void surfacePeriods(const SurfaceGeom& s, double& uPeriod, double& vPeriod) {
  uPeriod = 0.0;
  vPeriod = 0.0;
  switch (s.type) {
    case PrimitiveType::Cylinder:
    case PrimitiveType::Cone:
    case PrimitiveType::Sphere:
    case PrimitiveType::RevolutionSurface:
      uPeriod = kTwoPi;
      return;
    case PrimitiveType::Torus:
      uPeriod = kTwoPi;
      vPeriod = kTwoPi;
      return;
    case PrimitiveType::ExtrusionSurface:
      if (s.sweptCurve.kind == CurveGeom::Kind::Circle ||
          s.sweptCurve.kind == CurveGeom::Kind::Ellipse)
        uPeriod = kTwoPi;
      return;
    default:
      return;
  }
}

namespace {

void curveSeedRange(const CurveGeom& c, double lo, double hi, double& outLo, double& outHi) {
  switch (c.kind) {
    case CurveGeom::Kind::Line:
      outLo = lo;
      outHi = hi;
      return;
    case CurveGeom::Kind::Circle:
    case CurveGeom::Kind::Ellipse:
      outLo = 0.0;
      outHi = kTwoPi;
      return;
    case CurveGeom::Kind::BSpline:
      outLo = c.bspline.tMin();
      outHi = c.bspline.tMax();
      return;
  }
}

}  // namespace

void surfaceDomain(const SurfaceGeom& s, double& uLo, double& uHi, double& vLo, double& vHi) {
  switch (s.type) {
    case PrimitiveType::Plane:
      uLo = s.seedULo;
      uHi = s.seedUHi;
      vLo = s.seedVLo;
      vHi = s.seedVHi;
      return;
    case PrimitiveType::Cylinder:
    case PrimitiveType::Cone:
      uLo = 0.0;
      uHi = kTwoPi;
      vLo = s.seedVLo;
      vHi = s.seedVHi;
      return;
    case PrimitiveType::Sphere:
      uLo = 0.0;
      uHi = kTwoPi;
      vLo = -kPi / 2.0;
      vHi = kPi / 2.0;
      return;
    case PrimitiveType::Torus:
      uLo = 0.0;
      uHi = kTwoPi;
      vLo = 0.0;
      vHi = kTwoPi;
      return;
    case PrimitiveType::ExtrusionSurface:
      curveSeedRange(s.sweptCurve, s.seedULo, s.seedUHi, uLo, uHi);
      vLo = s.seedVLo;
      vHi = s.seedVHi;
      return;
    case PrimitiveType::RevolutionSurface:
      uLo = 0.0;
      uHi = kTwoPi;
      curveSeedRange(s.sweptCurve, s.seedVLo, s.seedVHi, vLo, vHi);
      return;
    case PrimitiveType::BSpline:
      uLo = s.bspline.uMin();
      uHi = s.bspline.uMax();
      vLo = s.bspline.vMin();
      vHi = s.bspline.vMax();
      return;
    case PrimitiveType::Other:
      uLo = vLo = 0.0;
      uHi = vHi = 1.0;
      return;
  }
}

// ---------------------------------------------------------------------------
// Point inversion
// ---------------------------------------------------------------------------

namespace {

constexpr int kInvertSeedGrid = 16;
constexpr int kInvertMaxIter = 50;
constexpr double kInvertStepTol = 1e-10;

std::optional<Vec2> invertIterative(const SurfaceGeom& s, const Vec3& p) {
  double uLo, uHi, vLo, vHi;
  surfaceDomain(s, uLo, uHi, vLo, vHi);
  double uP, vP;
  surfacePeriods(s, uP, vP);

  double bestU = uLo, bestV = vLo;
  double bestD = std::numeric_limits<double>::max();
  for (int i = 0; i < kInvertSeedGrid; ++i) {
    const double u = uLo + (uHi - uLo) * (i + 0.5) / kInvertSeedGrid;
    for (int j = 0; j < kInvertSeedGrid; ++j) {
      const double v = vLo + (vHi - vLo) * (j + 0.5) / kInvertSeedGrid;
      Vec3 q, su, sv;
      evalSurfaceDerivs(s, u, v, q, su, sv);
      const double d = norm2(q - p);
      if (d < bestD) {
        bestD = d;
        bestU = u;
        bestV = v;
      }
    }
  }

  double u = bestU, v = bestV;
  double res = bestD;
  for (int iter = 0; iter < kInvertMaxIter; ++iter) {
    Vec3 q, su, sv;
    evalSurfaceDerivs(s, u, v, q, su, sv);
    const Vec3 r = p - q;
    const double a = dot(su, su), b = dot(su, sv), c = dot(sv, sv);
    const double det = a * c - b * b;
    if (std::abs(det) < 1e-30) return std::nullopt;
    const double g1 = dot(su, r), g2 = dot(sv, r);
    double du = (c * g1 - b * g2) / det;
    double dv = (a * g2 - b * g1) / det;

    // Damp until the residual decreases.
    double scale = 1.0;
    double nu = u, nv = v, nres = res;
    for (int halving = 0; halving < 20; ++halving) {
      nu = u + du * scale;
      nv = v + dv * scale;
      if (uP == 0.0) nu = std::clamp(nu, uLo, uHi);
      if (vP == 0.0) nv = std::clamp(nv, vLo, vHi);
      Vec3 q2, t1, t2;
      evalSurfaceDerivs(s, nu, nv, q2, t1, t2);
      nres = norm2(q2 - p);
      if (nres <= res) break;
      scale *= 0.5;
    }
    const double step = std::hypot(nu - u, nv - v);
    u = nu;
    v = nv;
    res = nres;
    if (step < kInvertStepTol) {
      if (uP != 0.0) u = wrapAngle(u);
      if (vP != 0.0) v = wrapAngle(v);
      return Vec2{u, v};
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Vec2> invertPoint(const SurfaceGeom& s, const Vec3& p) {
  const Frame& fr = s.frame;
  switch (s.type) {
    case PrimitiveType::Plane: {
      const Vec3 l = fr.toLocal(p);
      return Vec2{l.x, l.y};
    }
    case PrimitiveType::Cylinder: {
      const Vec3 l = fr.toLocal(p);
      return Vec2{wrapAngle(std::atan2(l.y, l.x)), l.z};
    }
    case PrimitiveType::Cone: {
      const Vec3 l = fr.toLocal(p);
      const double v = l.z / std::cos(s.semiAngle);
      const double r = s.radius + v * std::sin(s.semiAngle);
      const double u = r >= 0.0 ? std::atan2(l.y, l.x) : std::atan2(-l.y, -l.x);
      return Vec2{wrapAngle(u), v};
    }
    case PrimitiveType::Sphere: {
      const Vec3 l = fr.toLocal(p);
      const double v = std::asin(std::clamp(l.z / s.radius, -1.0, 1.0));
      const double rho = std::hypot(l.x, l.y);
      const double u = rho > 1e-14 * s.radius ? wrapAngle(std::atan2(l.y, l.x)) : 0.0;
      return Vec2{u, v};
    }
    case PrimitiveType::Torus: {
      const Vec3 l = fr.toLocal(p);
      const double u = wrapAngle(std::atan2(l.y, l.x));
      const double rho = std::hypot(l.x, l.y);
      const double v = wrapAngle(std::atan2(l.z, rho - s.radius));
      return Vec2{u, v};
    }
    default:
      return invertIterative(s, p);
  }
}

// ---------------------------------------------------------------------------
// Build
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void buildFail(const std::string& msg) { throw Error("build", msg); }

class Builder {
 public:
  explicit Builder(const StepEntityGraph& graph) : g_(graph) {}

  BRepSolid run() {
    collectShells();
    if (shellIds_.empty()) buildFail("no-shell-found: no MANIFOLD_SOLID_BREP or SHELL_BASED_SURFACE_MODEL");
    for (std::int64_t shellId : shellIds_) buildShell(shellId);
    computeExtent();
    validateEdges();
    return std::move(solid_);
  }

 private:
  const EntityRecord& ent(std::int64_t id) {
    const EntityRecord* e = g_.get(id);
    if (!e) buildFail("unresolvable geometry reference #" + std::to_string(id));
    return *e;
  }

  static std::int64_t refArg(const std::vector<PValue>& args, std::size_t i) {
    if (i >= args.size() || !args[i].isRef()) buildFail("expected entity reference argument");
    return args[i].integer;
  }

  static double realArg(const std::vector<PValue>& args, std::size_t i) {
    if (i >= args.size() || !args[i].isNumber()) buildFail("expected numeric argument");
    return args[i].asReal();
  }

  static bool boolArg(const std::vector<PValue>& args, std::size_t i) {
    if (i >= args.size() || args[i].kind != PValue::Kind::Enum) buildFail("expected logical argument");
    return args[i].text == "T" || args[i].text == "TRUE";
  }

  static const std::vector<PValue>& listArg(const std::vector<PValue>& args, std::size_t i) {
    if (i >= args.size() || !args[i].isList()) buildFail("expected list argument");
    return args[i].list;
  }

  Vec3 cartesianPoint(std::int64_t id) {
    const auto* args = ent(id).find("CARTESIAN_POINT");
    if (!args) buildFail("#" + std::to_string(id) + " is not a CARTESIAN_POINT");
    const auto& coords = listArg(*args, 1);
    Vec3 p;
    if (coords.size() > 0) p.x = coords[0].asReal();
    if (coords.size() > 1) p.y = coords[1].asReal();
    if (coords.size() > 2) p.z = coords[2].asReal();
    return p;
  }

  Vec3 direction(std::int64_t id) {
    const auto* args = ent(id).find("DIRECTION");
    if (!args) buildFail("#" + std::to_string(id) + " is not a DIRECTION");
    const auto& ratios = listArg(*args, 1);
    Vec3 d;
    if (ratios.size() > 0) d.x = ratios[0].asReal();
    if (ratios.size() > 1) d.y = ratios[1].asReal();
    if (ratios.size() > 2) d.z = ratios[2].asReal();
    const double n = norm(d);
    if (n < 1e-300) buildFail("zero-length DIRECTION #" + std::to_string(id));
    return d * (1.0 / n);
  }

  Vec3 vectorValue(std::int64_t id) {
    const auto* args = ent(id).find("VECTOR");
    if (!args) buildFail("#" + std::to_string(id) + " is not a VECTOR");
    return direction(refArg(*args, 1)) * realArg(*args, 2);
  }

  Frame axis2Placement(std::int64_t id) {
    const auto* args = ent(id).find("AXIS2_PLACEMENT_3D");
    if (!args) buildFail("#" + std::to_string(id) + " is not an AXIS2_PLACEMENT_3D");
    Frame f;
    f.origin = cartesianPoint(refArg(*args, 1));
    f.z = (args->size() > 2 && (*args)[2].isRef()) ? direction((*args)[2].integer) : Vec3{0, 0, 1};
    Vec3 ref{1, 0, 0};
    if (args->size() > 3 && (*args)[3].isRef()) {
      ref = direction((*args)[3].integer);
    } else if (std::abs(dot(ref, f.z)) > 0.9) {
      ref = Vec3{0, 1, 0};
    }
    Vec3 x = ref - f.z * dot(ref, f.z);
    const double n = norm(x);
    if (n < 1e-9) buildFail("AXIS2_PLACEMENT_3D #" + std::to_string(id) + " axes are parallel");
    f.x = x * (1.0 / n);
    f.y = cross(f.z, f.x);
    return f;
  }

  void axis1Placement(std::int64_t id, Vec3& origin, Vec3& dir) {
    const auto* args = ent(id).find("AXIS1_PLACEMENT");
    if (!args) buildFail("#" + std::to_string(id) + " is not an AXIS1_PLACEMENT");
    origin = cartesianPoint(refArg(*args, 1));
    dir = (args->size() > 2 && (*args)[2].isRef()) ? direction((*args)[2].integer) : Vec3{0, 0, 1};
  }

  static std::vector<double> expandKnots(const std::vector<PValue>& mults,
                                         const std::vector<PValue>& knots) {
    std::vector<double> out;
    if (mults.size() != knots.size()) buildFail("knot/multiplicity length mismatch");
    for (std::size_t i = 0; i < knots.size(); ++i) {
      const auto m = mults[i].integer;
      for (std::int64_t k = 0; k < m; ++k) out.push_back(knots[i].asReal());
    }
    return out;
  }

  BSplineCurveData bsplineCurve(const EntityRecord& e) {
    BSplineCurveData c;
    const std::vector<PValue>* core = e.find("B_SPLINE_CURVE_WITH_KNOTS");
    if (!e.complex && core) {
      // name, degree, control, form, closed, self_intersect, mults, knots, spec
      c.degree = static_cast<int>((*core)[1].integer);
      for (const auto& r : listArg(*core, 2)) c.control.push_back(cartesianPoint(r.integer));
      c.knots = expandKnots(listArg(*core, 6), listArg(*core, 7));
    } else {
      const std::vector<PValue>* base = e.find("B_SPLINE_CURVE");
      if (!base || !core) buildFail("unsupported curve entity #" + std::to_string(e.id));
      c.degree = static_cast<int>((*base)[0].integer);
      for (const auto& r : listArg(*base, 1)) c.control.push_back(cartesianPoint(r.integer));
      c.knots = expandKnots(listArg(*core, 0), listArg(*core, 1));
      if (const auto* rat = e.find("RATIONAL_B_SPLINE_CURVE"))
        for (const auto& w : listArg(*rat, 0)) c.weights.push_back(w.asReal());
    }
    if (c.knots.size() != c.control.size() + c.degree + 1)
      buildFail("inconsistent B-spline curve knot count in #" + std::to_string(e.id));
    return c;
  }

  CurveGeom curveOf(std::int64_t id) {
    const EntityRecord& e = ent(id);
    CurveGeom c;
    if (const auto* args = e.find("LINE")) {
      c.kind = CurveGeom::Kind::Line;
      c.lineOrigin = cartesianPoint(refArg(*args, 1));
      c.lineDir = vectorValue(refArg(*args, 2));
      if (norm(c.lineDir) < 1e-300) buildFail("zero-length LINE direction");
      return c;
    }
    if (const auto* args = e.find("CIRCLE")) {
      c.kind = CurveGeom::Kind::Circle;
      c.frame = placementOf(refArg(*args, 1));
      c.radius = realArg(*args, 2);
      if (c.radius <= 0.0) buildFail("CIRCLE radius <= 0 in #" + std::to_string(id));
      return c;
    }
    if (const auto* args = e.find("ELLIPSE")) {
      c.kind = CurveGeom::Kind::Ellipse;
      c.frame = placementOf(refArg(*args, 1));
      c.semiMajor = realArg(*args, 2);
      c.semiMinor = realArg(*args, 3);
      if (c.semiMajor <= 0.0 || c.semiMinor <= 0.0)
        buildFail("ELLIPSE axis <= 0 in #" + std::to_string(id));
      return c;
    }
    if (e.is("B_SPLINE_CURVE_WITH_KNOTS") || e.is("B_SPLINE_CURVE")) {
      c.kind = CurveGeom::Kind::BSpline;
      c.bspline = bsplineCurve(e);
      return c;
    }
    buildFail("unsupported edge curve entity #" + std::to_string(id) + " (" + e.keyword() + ")");
  }

  // Placement that may arrive as AXIS2_PLACEMENT_3D directly.
  Frame placementOf(std::int64_t id) { return axis2Placement(id); }

  int surfaceIndexOf(std::int64_t id) {
    if (auto it = surfaceIndex_.find(id); it != surfaceIndex_.end()) return it->second;
    const EntityRecord& e = ent(id);
    SurfaceGeom s;
    s.stepId = id;
    s.type = classifySurface(e);
    switch (s.type) {
      case PrimitiveType::Plane:
        s.frame = axis2Placement(refArg(*e.find("PLANE"), 1));
        break;
      case PrimitiveType::Cylinder: {
        const auto& args = *e.find("CYLINDRICAL_SURFACE");
        s.frame = axis2Placement(refArg(args, 1));
        s.radius = realArg(args, 2);
        if (s.radius <= 0.0) buildFail("degenerate surface parameters: cylinder radius <= 0");
        break;
      }
      case PrimitiveType::Cone: {
        const auto& args = *e.find("CONICAL_SURFACE");
        s.frame = axis2Placement(refArg(args, 1));
        s.radius = realArg(args, 2);
        s.semiAngle = realArg(args, 3);
        if (s.radius < 0.0 || s.semiAngle <= 0.0 || s.semiAngle >= kPi / 2.0)
          buildFail("degenerate surface parameters: cone");
        break;
      }
      case PrimitiveType::Sphere: {
        const auto& args = *e.find("SPHERICAL_SURFACE");
        s.frame = axis2Placement(refArg(args, 1));
        s.radius = realArg(args, 2);
        if (s.radius <= 0.0) buildFail("degenerate surface parameters: sphere radius <= 0");
        break;
      }
      case PrimitiveType::Torus: {
        const auto& args = *e.find("TOROIDAL_SURFACE");
        s.frame = axis2Placement(refArg(args, 1));
        s.radius = realArg(args, 2);
        s.minorRadius = realArg(args, 3);
        if (s.radius <= 0.0 || s.minorRadius <= 0.0)
          buildFail("degenerate surface parameters: torus");
        break;
      }
      case PrimitiveType::ExtrusionSurface: {
        const auto& args = *e.find("SURFACE_OF_LINEAR_EXTRUSION");
        s.sweptCurve = curveOf(refArg(args, 1));
        s.extrusionDir = vectorValue(refArg(args, 2));
        if (norm(s.extrusionDir) < 1e-300) buildFail("degenerate extrusion direction");
        break;
      }
      case PrimitiveType::RevolutionSurface: {
        const auto& args = *e.find("SURFACE_OF_REVOLUTION");
        s.sweptCurve = curveOf(refArg(args, 1));
        Vec3 origin, dir;
        axis1Placement(refArg(args, 2), origin, dir);
        s.frame.origin = origin;
        s.frame.z = dir;
        break;
      }
      case PrimitiveType::BSpline:
        s.bspline = bsplineSurface(e);
        break;
      case PrimitiveType::Other:
        // Retained opaque; faces on it are skipped downstream.
        break;
    }
    const int idx = static_cast<int>(solid_.surfaces.size());
    solid_.surfaces.push_back(std::move(s));
    surfaceIndex_.emplace(id, idx);
    return idx;
  }

  BSplineSurfaceData bsplineSurface(const EntityRecord& e) {
    BSplineSurfaceData s;
    const std::vector<PValue>* core = e.find("B_SPLINE_SURFACE_WITH_KNOTS");
    const std::vector<PValue>* grid = nullptr;
    if (!e.complex && core) {
      // name, du, dv, grid, form, uclosed, vclosed, selfint, umults, vmults, uknots, vknots, spec
      s.degreeU = static_cast<int>((*core)[1].integer);
      s.degreeV = static_cast<int>((*core)[2].integer);
      grid = &listArg(*core, 3);
      s.knotsU = expandKnots(listArg(*core, 8), listArg(*core, 10));
      s.knotsV = expandKnots(listArg(*core, 9), listArg(*core, 11));
    } else {
      const std::vector<PValue>* base = e.find("B_SPLINE_SURFACE");
      if (!base || !core) buildFail("unsupported B-spline surface form #" + std::to_string(e.id));
      s.degreeU = static_cast<int>((*base)[0].integer);
      s.degreeV = static_cast<int>((*base)[1].integer);
      grid = &listArg(*base, 2);
      s.knotsU = expandKnots(listArg(*core, 0), listArg(*core, 2));
      s.knotsV = expandKnots(listArg(*core, 1), listArg(*core, 3));
      if (const auto* rat = e.find("RATIONAL_B_SPLINE_SURFACE")) {
        for (const auto& row : listArg(*rat, 0))
          for (const auto& w : row.list) s.weights.push_back(w.asReal());
      }
    }
    s.numU = static_cast<int>(grid->size());
    if (s.numU == 0) buildFail("empty B-spline control grid");
    s.numV = static_cast<int>((*grid)[0].list.size());
    for (const auto& row : *grid) {
      if (static_cast<int>(row.list.size()) != s.numV) buildFail("ragged B-spline control grid");
      for (const auto& r : row.list) s.control.push_back(cartesianPoint(r.integer));
    }
    if (static_cast<int>(s.knotsU.size()) != s.numU + s.degreeU + 1 ||
        static_cast<int>(s.knotsV.size()) != s.numV + s.degreeV + 1)
      buildFail("inconsistent B-spline surface knot count in #" + std::to_string(e.id));
    return s;
  }

  // Parameter of a point on a curve, used to derive edge ranges.
  double curveParamOf(const CurveGeom& c, const Vec3& p) {
    switch (c.kind) {
      case CurveGeom::Kind::Line:
        return dot(p - c.lineOrigin, c.lineDir) / dot(c.lineDir, c.lineDir);
      case CurveGeom::Kind::Circle: {
        const Vec3 l = c.frame.toLocal(p);
        return wrapAngle(std::atan2(l.y, l.x));
      }
      case CurveGeom::Kind::Ellipse: {
        const Vec3 l = c.frame.toLocal(p);
        return wrapAngle(std::atan2(l.y / c.semiMinor, l.x / c.semiMajor));
      }
      case CurveGeom::Kind::BSpline: {
        const double lo = c.bspline.tMin(), hi = c.bspline.tMax();
        const int kSamples = 256;
        double bestT = lo;
        double bestD = std::numeric_limits<double>::max();
        for (int i = 0; i <= kSamples; ++i) {
          const double t = lo + (hi - lo) * i / kSamples;
          const double d = norm2(evalCurve(c, t) - p);
          if (d < bestD) {
            bestD = d;
            bestT = t;
          }
        }
        double t = bestT;
        for (int iter = 0; iter < 30; ++iter) {
          const Vec3 q = evalCurve(c, t);
          const Vec3 dq = evalCurveTangent(c, t);
          const double denom = dot(dq, dq);
          if (denom < 1e-30) break;
          const double step = dot(p - q, dq) / denom;
          t = std::clamp(t + step, lo, hi);
          if (std::abs(step) < 1e-12 * (hi - lo + 1.0)) break;
        }
        return t;
      }
    }
    return 0.0;
  }

  int edgeIndexOf(std::int64_t id) {
    if (auto it = edgeIndex_.find(id); it != edgeIndex_.end()) return it->second;
    const EntityRecord& e = ent(id);
    const auto* args = e.find("EDGE_CURVE");
    if (!args) buildFail("#" + std::to_string(id) + " is not an EDGE_CURVE");

    const std::int64_t v1Id = refArg(*args, 1);
    const std::int64_t v2Id = refArg(*args, 2);
    const Vec3 p1 = vertexPoint(v1Id);
    const Vec3 p2 = vertexPoint(v2Id);

    TopoEdge edge;
    edge.id = static_cast<int>(solid_.edges.size());
    edge.stepId = id;
    edge.curve = curveOf(refArg(*args, 3));
    edge.senseAgrees = boolArg(*args, 4);
    edge.closed = (v1Id == v2Id);

    const Vec3& logicalStart = edge.senseAgrees ? p1 : p2;
    const Vec3& logicalEnd = edge.senseAgrees ? p2 : p1;
    const double ta = curveParamOf(edge.curve, logicalStart);
    const double tb = curveParamOf(edge.curve, logicalEnd);
    switch (edge.curve.kind) {
      case CurveGeom::Kind::Line:
        edge.t0 = ta;
        edge.t1 = tb;
        if (edge.t1 < edge.t0) {
          std::swap(edge.t0, edge.t1);
          solid_.warnings.push_back("edge #" + std::to_string(id) +
                                    ": line parameter range reversed");
        }
        break;
      case CurveGeom::Kind::Circle:
      case CurveGeom::Kind::Ellipse: {
        edge.t0 = ta;
        double span = wrapAngle(tb - ta);
        if (edge.closed || span < 1e-12) span = kTwoPi;
        edge.t1 = ta + span;
        break;
      }
      case CurveGeom::Kind::BSpline:
        if (edge.closed) {
          edge.t0 = edge.curve.bspline.tMin();
          edge.t1 = edge.curve.bspline.tMax();
        } else {
          edge.t0 = std::min(ta, tb);
          edge.t1 = std::max(ta, tb);
        }
        break;
    }
    // Endpoint positions come from the shared VERTEX_POINT entities, so
    // every edge meeting at a vertex agrees on its coordinates bit-for-bit.
    edge.start = logicalStart;
    edge.end = logicalEnd;

    const int idx = edge.id;
    solid_.edges.push_back(std::move(edge));
    edgeIndex_.emplace(id, idx);
    return idx;
  }

  Vec3 vertexPoint(std::int64_t id) {
    const auto* args = ent(id).find("VERTEX_POINT");
    if (!args) buildFail("#" + std::to_string(id) + " is not a VERTEX_POINT");
    return cartesianPoint(refArg(*args, 1));
  }

  void collectShells() {
    for (const auto& [id, e] : g_.entities) {
      if (const auto* args = e.find("MANIFOLD_SOLID_BREP")) {
        shellIds_.push_back(refArg(*args, 1));
      } else if (const auto* smArgs = e.find("SHELL_BASED_SURFACE_MODEL")) {
        for (const auto& s : listArg(*smArgs, 1)) shellIds_.push_back(s.integer);
      }
    }
  }

  void buildShell(std::int64_t shellId) {
    const EntityRecord& shell = ent(shellId);
    const std::vector<PValue>* args = shell.find("CLOSED_SHELL");
    if (!args) args = shell.find("OPEN_SHELL");
    if (!args) buildFail("#" + std::to_string(shellId) + " is not a shell");
    std::vector<int> faceIds;
    for (const auto& f : listArg(*args, 1)) faceIds.push_back(buildFace(f.integer));
    solid_.shells.push_back(std::move(faceIds));
  }

  int buildFace(std::int64_t faceId) {
    const EntityRecord& e = ent(faceId);
    const std::vector<PValue>* args = e.find("ADVANCED_FACE");
    if (!args) args = e.find("FACE_SURFACE");
    if (!args) buildFail("#" + std::to_string(faceId) + " is not a face");

    Face face;
    face.id = static_cast<int>(solid_.faces.size());
    face.stepId = faceId;
    face.surface = surfaceIndexOf(refArg(*args, 2));
    face.sameSense = boolArg(*args, 3);
    face.type = solid_.surfaces[face.surface].type;

    for (const auto& boundRef : listArg(*args, 1)) {
      const EntityRecord& bound = ent(boundRef.integer);
      const std::vector<PValue>* bArgs = bound.find("FACE_OUTER_BOUND");
      const bool outer = bArgs != nullptr;
      if (!bArgs) bArgs = bound.find("FACE_BOUND");
      if (!bArgs) buildFail("#" + std::to_string(boundRef.integer) + " is not a face bound");
      const bool boundOrient = boolArg(*bArgs, 2);

      const EntityRecord& loopEnt = ent(refArg(*bArgs, 1));
      if (loopEnt.is("VERTEX_LOOP")) continue;  // degenerate apex/pole loop, bounds no area
      const auto* loopArgs = loopEnt.find("EDGE_LOOP");
      if (!loopArgs) buildFail("#" + std::to_string(loopEnt.id) + " is not an EDGE_LOOP");

      Loop loop;
      loop.outer = outer;
      for (const auto& oeRef : listArg(*loopArgs, 1)) {
        const auto* oeArgs = ent(oeRef.integer).find("ORIENTED_EDGE");
        if (!oeArgs) buildFail("#" + std::to_string(oeRef.integer) + " is not an ORIENTED_EDGE");
        OrientedEdgeRef ref;
        ref.edge = edgeIndexOf(refArg(*oeArgs, 3));
        ref.orientation = boolArg(*oeArgs, 4);
        loop.edges.push_back(ref);
      }
      if (!boundOrient) {
        std::reverse(loop.edges.begin(), loop.edges.end());
        for (auto& r : loop.edges) r.orientation = !r.orientation;
      }
      face.loops.push_back(std::move(loop));
    }

    for (const auto& loop : face.loops)
      for (const auto& r : loop.edges) {
        auto& inc = solid_.edges[r.edge].incidences;
        inc.push_back({face.id, r.orientation});
      }

    solid_.faces.push_back(std::move(face));
    return solid_.faces.back().id;
  }

  void computeExtent() {
    Aabb box;
    for (const auto& e : solid_.edges) {
      box.expand(e.start);
      box.expand(e.end);
      // Sample a few interior curve points so arcs contribute their bulge.
      for (int i = 1; i < 4; ++i)
        box.expand(evalCurve(e.curve, e.t0 + (e.t1 - e.t0) * i / 4.0));
    }
    for (const auto& s : solid_.surfaces) {
      for (const auto& c : s.bspline.control) box.expand(c);
      // Intrinsically bounded surfaces carry extent even when untrimmed
      // (a closed sphere or torus face has no edges at all).
      double reach = 0.0;
      if (s.type == PrimitiveType::Sphere) reach = s.radius;
      if (s.type == PrimitiveType::Torus) reach = s.radius + s.minorRadius;
      if (reach > 0.0)
        for (int corner = 0; corner < 8; ++corner)
          box.expand(s.frame.toWorld({corner & 1 ? reach : -reach,
                                      corner & 2 ? reach : -reach,
                                      corner & 4 ? reach : -reach}));
    }
    if (!box.valid()) box.expand({0, 0, 0});
    solid_.bbox = box;
    solid_.diag = std::max(box.diagonal(), 1e-12);
    solid_.tolVertex = 1e-6 * solid_.diag;
    solid_.tolOnSurface = 1e-5 * solid_.diag;

    for (auto& s : solid_.surfaces) {
      const double d = solid_.diag;
      switch (s.type) {
        case PrimitiveType::Plane:
          s.seedULo = -2.0 * d;
          s.seedUHi = 2.0 * d;
          s.seedVLo = -2.0 * d;
          s.seedVHi = 2.0 * d;
          break;
        case PrimitiveType::Cylinder:
        case PrimitiveType::Cone: {
          // v spans along the axis; center the band on the model.
          const double c = dot(box.lo + (box.hi - box.lo) * 0.5 - s.frame.origin, s.frame.z);
          s.seedVLo = c - 2.0 * d;
          s.seedVHi = c + 2.0 * d;
          break;
        }
        case PrimitiveType::ExtrusionSurface: {
          const double m = norm(s.extrusionDir);
          s.seedULo = -2.0 * d;
          s.seedUHi = 2.0 * d;
          s.seedVLo = -2.0 * d / m;
          s.seedVHi = 2.0 * d / m;
          break;
        }
        default:
          break;
      }
    }
  }

  void validateEdges() {
    for (const auto& e : solid_.edges) {
      if (e.incidences.size() > 2)
        solid_.warnings.push_back("edge #" + std::to_string(e.stepId) +
                                  ": non-manifold (incidences > 2), no adjacency");
      const double d0 = distance(evalCurve(e.curve, e.t0), e.start);
      const double d1 = distance(evalCurve(e.curve, e.t1), e.end);
      if (d0 > solid_.tolVertex || d1 > solid_.tolVertex)
        solid_.warnings.push_back("edge #" + std::to_string(e.stepId) +
                                  ": endpoint/vertex mismatch beyond tolerance");
    }
  }

  const StepEntityGraph& g_;
  BRepSolid solid_;
  std::vector<std::int64_t> shellIds_;
  std::unordered_map<std::int64_t, int> surfaceIndex_;
  std::unordered_map<std::int64_t, int> edgeIndex_;
};

}  // namespace

BRepSolid buildBRep(const StepEntityGraph& graph) { return Builder(graph).run(); }

}  // namespace steppart
