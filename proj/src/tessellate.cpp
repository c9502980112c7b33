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

#include "steppart/tessellate.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "steppart/cdt.hpp"
#include "steppart/error.hpp"

namespace steppart {

TessellationSpec TessellationSpec::byName(const std::string& name) {
  if (name == "t0") return t0();
  if (name == "t1") return t1();
  if (name == "t2") return t2();
  throw Error("io", "unknown tessellation spec '" + name + "' (expected t0|t1|t2)");
}

namespace {

[[noreturn]] void skip(const std::string& reason) { throw Error("tessellate", reason); }

// Largest parameter step keeping both the sagitta of an arc of radius r and
// the tangent turn within tolerance.
double arcStep(double r, double chordAbs, double angleRad) {
  if (r <= 0.0) return angleRad;
  const double sag = 2.0 * std::acos(std::max(-1.0, 1.0 - std::min(1.0, chordAbs / r)));
  return std::max(1e-4, std::min(sag, angleRad));
}

void sampleAdaptive(const CurveGeom& c, double ta, double tb, double chordAbs, double angleRad,
                    int depth, std::vector<double>& params) {
  const Vec3 pa = evalCurve(c, ta);
  const Vec3 pb = evalCurve(c, tb);
  const double tm = 0.5 * (ta + tb);
  const Vec3 pm = evalCurve(c, tm);
  bool split = depth < 1;  // always subdivide once so closed spans get probed
  if (!split && depth < 16) {
    const Vec3 chord = pb - pa;
    const double len2 = norm2(chord);
    double dev;
    if (len2 < 1e-300) {
      dev = distance(pm, pa);
    } else {
      const double t = std::clamp(dot(pm - pa, chord) / len2, 0.0, 1.0);
      dev = distance(pm, pa + chord * t);
    }
    split = dev > chordAbs ||
            angleBetween(evalCurveTangent(c, ta), evalCurveTangent(c, tb)) > angleRad;
  }
  if (split && depth < 16) {
    sampleAdaptive(c, ta, tm, chordAbs, angleRad, depth + 1, params);
    sampleAdaptive(c, tm, tb, chordAbs, angleRad, depth + 1, params);
  } else {
    params.push_back(tb);
  }
}

std::vector<double> curveParams(const CurveGeom& c, double t0, double t1, double chordAbs,
                                double angleRad) {
  std::vector<double> params{t0};
  switch (c.kind) {
    case CurveGeom::Kind::Line:
      params.push_back(t1);
      break;
    case CurveGeom::Kind::Circle: {
      const double step = arcStep(c.radius, chordAbs, angleRad);
      const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / step)));
      for (int i = 1; i <= n; ++i) params.push_back(t0 + (t1 - t0) * i / n);
      break;
    }
    case CurveGeom::Kind::Ellipse:
    case CurveGeom::Kind::BSpline:
      sampleAdaptive(c, t0, t1, chordAbs, angleRad, 0, params);
      break;
  }
  return params;
}

}  // namespace

EdgePolylineCache::EdgePolylineCache(const BRepSolid& solid, const TessellationSpec& spec) {
  const double chordAbs = spec.chordTol * solid.diag;
  const double angleRad = rad(spec.angleTolDeg);
  points_.resize(solid.edges.size());
  params_.resize(solid.edges.size());
  for (const auto& e : solid.edges) {
    auto params = curveParams(e.curve, e.t0, e.t1, chordAbs, angleRad);
    auto& pts = points_[e.id];
    pts.reserve(params.size());
    for (double t : params) pts.push_back(evalCurve(e.curve, t));
    // Snap the ends to the stored vertex positions: edges meeting at a
    // vertex then share its coordinates bit-for-bit.
    pts.front() = e.start;
    pts.back() = e.end;
    params_[e.id] = std::move(params);
  }
}

// ---------------------------------------------------------------------------
// Face tessellation
// ---------------------------------------------------------------------------

namespace {

struct BoundaryPoint {
  Vec2 uv;
  Vec3 pos;
};

using Chain = std::vector<BoundaryPoint>;

struct LoopUV {
  Chain pts;       // closed: last point omitted (implicit wrap to first)
  int windU = 0;   // net winding around the u period
  int windV = 0;
};

double unwrapNear(double value, double prev, double period) {
  if (period == 0.0) return value;
  return value + period * std::round((prev - value) / period);
}

class FaceTessellator {
 public:
  FaceTessellator(const BRepSolid& solid, const Face& face, const TessellationSpec& spec,
                  const EdgePolylineCache& cache)
      : solid_(solid),
        face_(face),
        spec_(spec),
        cache_(cache),
        surf_(solid.surfaceOf(face)),
        chordAbs_(spec.chordTol * solid.diag),
        angleRad_(rad(spec.angleTolDeg)) {
    surfacePeriods(surf_, uPeriod_, vPeriod_);
  }

  FaceMesh run() {
    if (surf_.type == PrimitiveType::Other) skip("unsupported surface type");

    std::vector<LoopUV> loops;
    for (const auto& loop : face_.loops) {
      LoopUV lv = mapLoop(loop);
      if (lv.pts.size() >= 2) loops.push_back(std::move(lv));
    }

    std::vector<Chain> chains;  // closed boundary chains in a consistent branch
    if (loops.empty()) {
      synthesizeClosedSurface(chains);
    } else {
      assembleChains(loops, chains);
    }
    if (chains.empty() && fanTris_.empty()) skip("no usable trimming loops");

    return triangulateChains(chains);
  }

 private:
  // --- loop mapping ---------------------------------------------------------

  LoopUV mapLoop(const Loop& loop) {
    // Gather the 3D polyline in traversal order; junction points dropped.
    std::vector<Vec3> pts;
    for (const auto& ref : loop.edges) {
      const TopoEdge& e = solid_.edges[ref.edge];
      const auto& poly = cache_.points(e.id);
      const bool forward = ref.orientation == e.senseAgrees;
      if (forward) {
        for (std::size_t i = 0; i + 1 < poly.size(); ++i) pts.push_back(poly[i]);
      } else {
        for (std::size_t i = poly.size(); i-- > 1;) pts.push_back(poly[i]);
      }
    }
    LoopUV out;
    if (pts.size() < 2) return out;

    // Invert with branch continuity; parametric poles inherit u from their
    // predecessor.
    out.pts.reserve(pts.size());
    bool prevValid = false;
    Vec2 prev{0, 0};
    for (const Vec3& p : pts) {
      auto uv = invertPoint(surf_, p);
      if (!uv) skip("loop-inversion failure");
      const SurfacePoint sp = evalSurface(surf_, uv->x, uv->y);
      if (distance(sp.point, p) > 10.0 * solid_.tolOnSurface) skip("loop point off surface");
      Vec2 q = *uv;
      if (prevValid) {
        if (sp.singular && uPeriod_ != 0.0) q.x = prev.x;
        q.x = unwrapNear(q.x, prev.x, uPeriod_);
        q.y = unwrapNear(q.y, prev.y, vPeriod_);
      }
      out.pts.push_back({q, p});
      prev = q;
      prevValid = true;
    }

    // Net winding: where the closing step lands relative to the start.
    if (uPeriod_ != 0.0) {
      const double closeU = unwrapNear(out.pts.front().uv.x, out.pts.back().uv.x, uPeriod_);
      out.windU = static_cast<int>(std::lround((closeU - out.pts.front().uv.x) / uPeriod_));
    }
    if (vPeriod_ != 0.0) {
      const double closeV = unwrapNear(out.pts.front().uv.y, out.pts.back().uv.y, vPeriod_);
      out.windV = static_cast<int>(std::lround((closeV - out.pts.front().uv.y) / vPeriod_));
    }
    return out;
  }

  // --- chain assembly (seam handling) ---------------------------------------

  void assembleChains(std::vector<LoopUV>& loops, std::vector<Chain>& chains) {
    std::vector<LoopUV*> uChains, vChains;
    for (auto& l : loops) {
      if (std::abs(l.windU) > 1 || std::abs(l.windV) > 1 || (l.windU != 0 && l.windV != 0))
        skip("unsupported periodic trimming topology");
      if (l.windU != 0)
        uChains.push_back(&l);
      else if (l.windV != 0)
        vChains.push_back(&l);
      else
        chains.push_back(l.pts);
    }
    if (!uChains.empty() && !vChains.empty()) skip("mixed periodic trimming topology");
    if (uChains.size() > 2 || vChains.size() == 1 || vChains.size() > 2)
      skip("unpaired full-period trimming loop");
    if (uChains.size() == 1) {
      // The band closes at a parametric pole (sphere pole / cone apex).
      chains.push_back(poleCap(*uChains[0]));
      return;
    }
    if (uChains.size() == 2) chains.push_back(bridge(*uChains[0], *uChains[1], true));
    if (vChains.size() == 2) chains.push_back(bridge(*vChains[0], *vChains[1], false));
  }

  // Close a single full-period chain against the surface's pole: bridge the
  // chain to a small synthesized ring around the pole and fan the ring onto
  // the pole vertex.
  Chain poleCap(LoopUV& chain) {
    // Loops run with the face interior on their left (after same-sense),
    // so the winding direction tells which side of the chain the pole is on.
    const bool interiorUp = (chain.windU > 0) == face_.sameSense;
    double vPole;
    if (surf_.type == PrimitiveType::Sphere) {
      vPole = interiorUp ? kPi / 2.0 : -kPi / 2.0;
    } else if (surf_.type == PrimitiveType::Cone) {
      vPole = -surf_.radius / std::sin(surf_.semiAngle);  // the apex
      double vMin = chain.pts.front().uv.y;
      for (const auto& b : chain.pts) vMin = std::min(vMin, b.uv.y);
      if (interiorUp || vMin <= vPole) skip("cone face unbounded away from the apex");
    } else {
      skip("full-period loop on a surface without a pole");
    }

    // Chain extreme closest to the pole; the ring must sit between it and
    // the pole.
    double vEdge = chain.pts.front().uv.y;
    for (const auto& b : chain.pts)
      vEdge = interiorUp ? std::min(vEdge, b.uv.y) : std::max(vEdge, b.uv.y);

    double vRing;
    double ringRadius;
    if (surf_.type == PrimitiveType::Sphere) {
      const double capStep = arcStep(surf_.radius, chordAbs_, angleRad_);
      vRing = vPole + (interiorUp ? -capStep : capStep);
      // Keep the ring strictly between the chain extreme and the pole.
      if (interiorUp)
        vRing = std::max(vRing, 0.5 * (vEdge + vPole));
      else
        vRing = std::min(vRing, 0.5 * (vEdge + vPole));
      ringRadius = surf_.radius * std::cos(vRing);
    } else {
      vRing = vPole + 0.25 * (vEdge - vPole);
      ringRadius = (surf_.radius + vRing * std::sin(surf_.semiAngle));
    }

    // Synthesized ring, wound opposite to the chain so the bridge pairs up.
    const double step = arcStep(std::abs(ringRadius), chordAbs_, angleRad_);
    const int n = std::max(8, static_cast<int>(std::ceil(kTwoPi / step)));
    LoopUV ring;
    ring.windU = chain.windU > 0 ? -1 : 1;
    for (int i = 0; i < n; ++i) {
      const double u = ring.windU > 0 ? kTwoPi * i / n : -kTwoPi * i / n;
      ring.pts.push_back({{u, vRing}, evalSurface(surf_, u, vRing).point});
    }

    // Polar fan from the ring to the pole vertex, oriented to match the
    // face's outward normal.
    const Vec3 pole = evalSurface(surf_, 0.0, vPole).point;
    const Vec3 outward = faceOutwardNormalAt(ring.pts[0].uv);
    for (int i = 0; i < n; ++i) {
      const Vec3& a = ring.pts[i].pos;
      const Vec3& b = ring.pts[(i + 1) % n].pos;
      std::array<Vec3, 3> tri{a, b, pole};
      if (dot(triangleNormal(tri[0], tri[1], tri[2]), outward) < 0.0)
        std::swap(tri[0], tri[1]);
      fanTris_.push_back(tri);
    }
    return bridge(chain, ring, true);
  }

  Vec3 faceOutwardNormalAt(const Vec2& uv) {
    const Vec3 n = evalSurface(surf_, uv.x, uv.y).normal;
    return face_.sameSense ? n : -n;
  }

  // Join two full-period chains into one closed boundary by cutting the
  // periodic band at a seam and connecting both sides with an on-surface
  // polyline (evaluated once, so the two seam copies weld exactly).
  Chain bridge(LoopUV& first, LoopUV& second, bool alongU) {
    const double period = alongU ? uPeriod_ : vPeriod_;
    auto coord = [&](const BoundaryPoint& b) { return alongU ? b.uv.x : b.uv.y; };

    LoopUV* asc = &first;
    LoopUV* desc = &second;
    if ((alongU ? first.windU : first.windV) < 0) std::swap(asc, desc);
    if ((alongU ? asc->windU : asc->windV) < 0 || (alongU ? desc->windU : desc->windV) > 0)
      skip("periodic loops wind the same way");

    Chain a = asc->pts;   // ascending coordinate
    Chain d = desc->pts;  // descending coordinate

    // Rotate the descending chain to start at the sample closest (mod
    // period) to the ascending chain's start, then align its branch.
    const double seam = coord(a.front());
    std::size_t best = 0;
    double bestDist = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double delta = std::abs(unwrapNear(coord(d[i]), seam, period) - seam);
      if (delta < bestDist) {
        bestDist = delta;
        best = i;
      }
    }
    std::rotate(d.begin(), d.begin() + best, d.end());
    {
      const double shift = unwrapNear(coord(d.front()), seam, period) - coord(d.front());
      for (auto& b : d) {
        if (alongU)
          b.uv.x += shift;
        else
          b.uv.y += shift;
      }
      // Rotation broke branch continuity at the wrap point; re-unwrap.
      for (std::size_t i = 1; i < d.size(); ++i) {
        if (alongU)
          d[i].uv.x = unwrapNear(d[i].uv.x, d[i - 1].uv.x, period);
        else
          d[i].uv.y = unwrapNear(d[i].uv.y, d[i - 1].uv.y, period);
      }
    }

    auto shifted = [&](BoundaryPoint b) {
      if (alongU)
        b.uv.x += period;
      else
        b.uv.y += period;
      return b;
    };

    // Seam samples between the chain start points, evaluated once; the two
    // seam copies reuse the same 3D positions.
    const std::vector<BoundaryPoint> seamPts = seamSamples(a.front().uv, d.front().uv);

    // Boundary cycle of the cut band: ascending chain along one side, seam
    // at +period, descending chain (shifted up a period) along the other,
    // seam back at the original branch.
    Chain out;
    out.reserve(a.size() + d.size() + 2 * seamPts.size() + 2);
    for (const auto& b : a) out.push_back(b);
    out.push_back(shifted(a.front()));
    for (std::size_t i = seamPts.size(); i-- > 0;) out.push_back(shifted(seamPts[i]));
    for (const auto& b : d) out.push_back(shifted(b));
    out.push_back(d.front());
    for (const auto& b : seamPts) out.push_back(b);
    return out;
  }

  // Interior samples of the straight UV segment between two seam endpoints.
  std::vector<BoundaryPoint> seamSamples(const Vec2& from, const Vec2& to) {
    double hu, hv;
    gridSpacing(hu, hv);
    const double du = to.x - from.x, dv = to.y - from.y;
    int n = 1;
    if (hu > 0.0) n = std::max(n, static_cast<int>(std::ceil(std::abs(du) / hu)));
    if (hv > 0.0) n = std::max(n, static_cast<int>(std::ceil(std::abs(dv) / hv)));
    std::vector<BoundaryPoint> out;
    for (int i = 1; i < n; ++i) {
      const double t = double(i) / n;
      const Vec2 uv{from.x + du * t, from.y + dv * t};
      out.push_back({uv, evalSurface(surf_, uv.x, uv.y).point});
    }
    std::reverse(out.begin(), out.end());  // stored to->from
    return out;
  }

  // --- closed surfaces without trimming loops -------------------------------

  void synthesizeClosedSurface(std::vector<Chain>& chains) {
    double hu, hv;
    gridSpacing(hu, hv);
    if (surf_.type == PrimitiveType::Torus) {
      // Rectangle over one period in both directions; opposite sides reuse
      // the same 3D samples so the seams weld.
      const int nu = std::max(3, static_cast<int>(std::ceil(kTwoPi / hu)));
      const int nv = std::max(3, static_cast<int>(std::ceil(kTwoPi / hv)));
      std::vector<BoundaryPoint> bottom, right;
      for (int i = 0; i < nu; ++i) {
        const double u = kTwoPi * i / nu;
        bottom.push_back({{u, 0.0}, evalSurface(surf_, u, 0.0).point});
      }
      for (int j = 0; j < nv; ++j) {
        const double v = kTwoPi * j / nv;
        right.push_back({{kTwoPi, v}, evalSurface(surf_, kTwoPi, v).point});
      }
      // Corner welding: the rectangle corners are the same 3D point.
      right[0].pos = bottom[0].pos;
      Chain c;
      for (int i = 0; i < nu; ++i) c.push_back(bottom[i]);
      c.push_back({{kTwoPi, 0.0}, bottom[0].pos});
      for (int j = 1; j < nv; ++j) c.push_back(right[j]);
      c.push_back({{kTwoPi, kTwoPi}, bottom[0].pos});
      for (int i = nu; i-- > 1;) c.push_back({{bottom[i].uv.x, kTwoPi}, bottom[i].pos});
      c.push_back({{0.0, kTwoPi}, bottom[0].pos});
      for (int j = nv; j-- > 1;) c.push_back({{0.0, right[j].uv.y}, right[j].pos});
      chains.push_back(std::move(c));
      return;
    }
    if (surf_.type == PrimitiveType::Sphere) {
      // Band between two polar caps, seam-cut in u; caps closed by explicit
      // fans onto the pole vertices.
      const double capStep = arcStep(surf_.radius, chordAbs_, angleRad_);
      const double vTop = kPi / 2.0 - capStep;
      const double vBot = -kPi / 2.0 + capStep;
      const int nu = std::max(3, static_cast<int>(std::ceil(kTwoPi / hu)));
      const int nv = std::max(1, static_cast<int>(std::ceil((vTop - vBot) / hv)));
      std::vector<BoundaryPoint> bottom, top, seam;
      for (int i = 0; i < nu; ++i) {
        const double u = kTwoPi * i / nu;
        bottom.push_back({{u, vBot}, evalSurface(surf_, u, vBot).point});
        top.push_back({{u, vTop}, evalSurface(surf_, u, vTop).point});
      }
      for (int j = 1; j < nv; ++j) {
        const double v = vBot + (vTop - vBot) * j / nv;
        seam.push_back({{0.0, v}, evalSurface(surf_, 0.0, v).point});
      }
      Chain c;
      for (int i = 0; i < nu; ++i) c.push_back(bottom[i]);
      c.push_back({{kTwoPi, vBot}, bottom[0].pos});
      for (const auto& b : seam) c.push_back({{kTwoPi, b.uv.y}, b.pos});
      c.push_back({{kTwoPi, vTop}, top[0].pos});
      for (int i = nu; i-- > 1;) c.push_back(top[i]);
      c.push_back(top[0]);
      for (std::size_t j = seam.size(); j-- > 0;) c.push_back(seam[j]);
      chains.push_back(std::move(c));
      // Polar fans, oriented with the outward face normal.
      const Vec3 north = evalSurface(surf_, 0.0, kPi / 2.0).point;
      const Vec3 south = evalSurface(surf_, 0.0, -kPi / 2.0).point;
      const Vec3 upOut = faceOutwardNormalAt({0.0, vTop});
      const Vec3 downOut = faceOutwardNormalAt({0.0, vBot});
      for (int i = 0; i < nu; ++i) {
        const int j = (i + 1) % nu;
        std::array<Vec3, 3> tn{top[i].pos, top[j].pos, north};
        if (dot(triangleNormal(tn[0], tn[1], tn[2]), upOut) < 0.0) std::swap(tn[0], tn[1]);
        fanTris_.push_back(tn);
        std::array<Vec3, 3> ts{bottom[j].pos, bottom[i].pos, south};
        if (dot(triangleNormal(ts[0], ts[1], ts[2]), downOut) < 0.0) std::swap(ts[0], ts[1]);
        fanTris_.push_back(ts);
      }
      return;
    }
    skip("face has no trimming loops and is not a closed surface");
  }

  // --- tolerance-driven interior spacing ------------------------------------

  void gridSpacing(double& hu, double& hv) {
    hu = 0.0;
    hv = 0.0;
    switch (surf_.type) {
      case PrimitiveType::Plane:
        return;
      case PrimitiveType::Cylinder:
        hu = arcStep(surf_.radius, chordAbs_, angleRad_);
        return;
      case PrimitiveType::Cone: {
        double rMax = std::abs(surf_.radius);
        for (const auto& l : face_.loops)
          for (const auto& r : l.edges) {
            const TopoEdge& e = solid_.edges[r.edge];
            for (const Vec3& p : cache_.points(e.id)) {
              const Vec3 loc = surf_.frame.toLocal(p);
              rMax = std::max(rMax, std::hypot(loc.x, loc.y));
            }
          }
        hu = arcStep(rMax, chordAbs_, angleRad_);
        return;
      }
      case PrimitiveType::Sphere:
        hu = hv = arcStep(surf_.radius, chordAbs_, angleRad_);
        return;
      case PrimitiveType::Torus:
        hu = arcStep(surf_.radius + surf_.minorRadius, chordAbs_, angleRad_);
        hv = arcStep(surf_.minorRadius, chordAbs_, angleRad_);
        return;
      case PrimitiveType::ExtrusionSurface: {
        hu = profileStep();
        return;
      }
      case PrimitiveType::RevolutionSurface: {
        double rMax = 0.0;
        double lo, hi, vLo, vHi;
        surfaceDomain(surf_, lo, hi, vLo, vHi);
        for (int i = 0; i <= 16; ++i) {
          const Vec3 p = evalCurve(surf_.sweptCurve, vLo + (vHi - vLo) * i / 16.0);
          const Vec3 q = p - surf_.frame.origin;
          rMax = std::max(rMax, norm(q - surf_.frame.z * dot(q, surf_.frame.z)));
        }
        hu = arcStep(rMax, chordAbs_, angleRad_);
        hv = profileStep();
        return;
      }
      case PrimitiveType::BSpline: {
        bsplineSpacing(hu, hv);
        return;
      }
      case PrimitiveType::Other:
        return;
    }
  }

  // Largest parameter step of the profile curve meeting the tolerances.
  double profileStep() {
    double domLo, domHi;
    if (surf_.sweptCurve.kind == CurveGeom::Kind::BSpline) {
      domLo = surf_.sweptCurve.bspline.tMin();
      domHi = surf_.sweptCurve.bspline.tMax();
    } else if (surf_.sweptCurve.kind == CurveGeom::Kind::Line) {
      return 0.0;
    } else {
      domLo = 0.0;
      domHi = kTwoPi;
    }
    const auto params = curveParams(surf_.sweptCurve, domLo, domHi, chordAbs_, angleRad_);
    double step = domHi - domLo;
    for (std::size_t i = 1; i < params.size(); ++i)
      step = std::min(step, params[i] - params[i - 1]);
    return step;
  }

  void bsplineSpacing(double& hu, double& hv) {
    double uLo, uHi, vLo, vHi;
    surfaceDomain(surf_, uLo, uHi, vLo, vHi);
    int nu = 2, nv = 2;
    for (int round = 0; round < 6; ++round) {
      bool ok = true;
      for (int i = 0; i < nu && ok; ++i)
        for (int j = 0; j < nv && ok; ++j) {
          const double u0 = uLo + (uHi - uLo) * i / nu, u1 = uLo + (uHi - uLo) * (i + 1) / nu;
          const double v0 = vLo + (vHi - vLo) * j / nv, v1 = vLo + (vHi - vLo) * (j + 1) / nv;
          const SurfacePoint c00 = evalSurface(surf_, u0, v0);
          const SurfacePoint c11 = evalSurface(surf_, u1, v1);
          const SurfacePoint c01 = evalSurface(surf_, u0, v1);
          const SurfacePoint c10 = evalSurface(surf_, u1, v0);
          const SurfacePoint mid = evalSurface(surf_, 0.5 * (u0 + u1), 0.5 * (v0 + v1));
          const Vec3 lerp = (c00.point + c11.point + c01.point + c10.point) * 0.25;
          if (distance(mid.point, lerp) > chordAbs_ ||
              angleBetween(c00.normal, c11.normal) > angleRad_ ||
              angleBetween(c01.normal, c10.normal) > angleRad_)
            ok = false;
        }
      if (ok) break;
      nu *= 2;
      nv *= 2;
    }
    hu = (uHi - uLo) / nu;
    hv = (vHi - vLo) / nv;
  }

  // --- triangulation ---------------------------------------------------------

  FaceMesh triangulateChains(const std::vector<Chain>& chains) {
    std::vector<Vec2> uv;
    std::vector<Vec3> pos;
    std::vector<std::pair<int, int>> constraints;
    Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};

    for (const auto& chain : chains) {
      const int base = static_cast<int>(uv.size());
      int count = 0;
      for (const auto& b : chain) {
        if (count > 0 && uv.back() == b.uv) continue;  // collapsed segment
        uv.push_back(b.uv);
        pos.push_back(b.pos);
        lo.x = std::min(lo.x, b.uv.x);
        lo.y = std::min(lo.y, b.uv.y);
        hi.x = std::max(hi.x, b.uv.x);
        hi.y = std::max(hi.y, b.uv.y);
        ++count;
      }
      if (count >= 2 && uv[base] == uv.back()) {
        uv.pop_back();
        pos.pop_back();
        --count;
      }
      if (count < 3) continue;
      for (int i = 0; i < count; ++i)
        constraints.push_back({base + i, base + (i + 1) % count});
    }

    FaceMesh mesh;
    mesh.sourceFace = face_.id;
    if (constraints.empty() && fanTris_.empty()) skip("degenerate trimming loops");

    std::vector<std::array<int, 3>> tris;
    if (!constraints.empty()) {
      addSteinerGrid(uv, pos, constraints, lo, hi);
      tris = cdt::triangulate(uv, constraints);
      if (tris.empty()) skip("empty triangulation");
    }

    // Emit vertices in first-use order; drop 3D-degenerate triangles.
    const double minArea = 1e-14 * solid_.diag * solid_.diag;
    std::unordered_map<int, int> vertexOf;
    auto emit = [&](int idx) {
      auto [it, inserted] = vertexOf.emplace(idx, static_cast<int>(mesh.vertices.size()));
      if (inserted) mesh.vertices.push_back(pos[idx]);
      return it->second;
    };
    for (const auto& t : tris) {
      if (triangleArea(pos[t[0]], pos[t[1]], pos[t[2]]) <= minArea) continue;
      int a = emit(t[0]), b = emit(t[1]), c = emit(t[2]);
      if (!face_.sameSense) std::swap(b, c);
      mesh.triangles.push_back({a, b, c});
    }
    for (const auto& f : fanTris_) {
      if (triangleArea(f[0], f[1], f[2]) <= minArea) continue;
      std::array<int, 3> t{-1, -1, -1};
      // Weld fan vertices against emitted ones by exact position.
      for (int k = 0; k < 3; ++k) {
        int found = -1;
        for (std::size_t m = 0; m < mesh.vertices.size(); ++m)
          if (mesh.vertices[m] == f[k]) {
            found = static_cast<int>(m);
            break;
          }
        if (found < 0) {
          found = static_cast<int>(mesh.vertices.size());
          mesh.vertices.push_back(f[k]);
        }
        t[k] = found;
      }
      mesh.triangles.push_back(t);
    }
    if (mesh.triangles.empty()) skip("all triangles degenerate");
    return mesh;
  }

  void addSteinerGrid(std::vector<Vec2>& uv, std::vector<Vec3>& pos,
                      const std::vector<std::pair<int, int>>& constraints, const Vec2& lo,
                      const Vec2& hi) {
    double hu, hv;
    gridSpacing(hu, hv);
    const double spanU = hi.x - lo.x, spanV = hi.y - lo.y;
    const int nu = hu > 0.0 ? static_cast<int>(std::ceil(spanU / hu)) : 1;
    const int nv = hv > 0.0 ? static_cast<int>(std::ceil(spanV / hv)) : 1;
    if (nu <= 1 && nv <= 1) return;
    const double stepU = spanU / nu, stepV = spanV / nv;
    for (int i = 1; i < nu; ++i)
      for (int j = 1; j < nv; ++j) {
        const Vec2 q{lo.x + stepU * i, lo.y + stepV * j};
        if (!insideEvenOdd(q, uv, constraints)) continue;
        if (nearBoundary(q, uv, constraints, stepU, stepV)) continue;
        uv.push_back(q);
        pos.push_back(evalSurface(surf_, q.x, q.y).point);
      }
    // Single interior row/column when only one direction is curved.
    if (nv == 1 && nu > 1) {
      for (int i = 1; i < nu; ++i) {
        const Vec2 q{lo.x + stepU * i, lo.y + 0.5 * spanV};
        if (!insideEvenOdd(q, uv, constraints)) continue;
        if (nearBoundary(q, uv, constraints, stepU, stepV)) continue;
        uv.push_back(q);
        pos.push_back(evalSurface(surf_, q.x, q.y).point);
      }
    }
    if (nu == 1 && nv > 1) {
      for (int j = 1; j < nv; ++j) {
        const Vec2 q{lo.x + 0.5 * spanU, lo.y + stepV * j};
        if (!insideEvenOdd(q, uv, constraints)) continue;
        if (nearBoundary(q, uv, constraints, stepU, stepV)) continue;
        uv.push_back(q);
        pos.push_back(evalSurface(surf_, q.x, q.y).point);
      }
    }
  }

  static bool insideEvenOdd(const Vec2& q, const std::vector<Vec2>& uv,
                            const std::vector<std::pair<int, int>>& constraints) {
    int crossings = 0;
    for (const auto& [ia, ib] : constraints) {
      const Vec2& a = uv[ia];
      const Vec2& b = uv[ib];
      if ((a.y > q.y) == (b.y > q.y)) continue;
      const double x = a.x + (b.x - a.x) * (q.y - a.y) / (b.y - a.y);
      if (x > q.x) ++crossings;
    }
    return (crossings & 1) != 0;
  }

  static bool nearBoundary(const Vec2& q, const std::vector<Vec2>& uv,
                           const std::vector<std::pair<int, int>>& constraints, double stepU,
                           double stepV) {
    const double su = stepU > 0.0 ? stepU : 1.0;
    const double sv = stepV > 0.0 ? stepV : 1.0;
    for (const auto& [ia, ib] : constraints) {
      // Distance in grid-step units, so anisotropic parameterizations are
      // handled uniformly.
      const Vec2 a{uv[ia].x / su, uv[ia].y / sv};
      const Vec2 b{uv[ib].x / su, uv[ib].y / sv};
      const Vec2 p{q.x / su, q.y / sv};
      const Vec2 d = b - a;
      const double len2 = dot(d, d);
      double t = len2 > 0.0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
      const Vec2 c = a + d * t;
      // Small margin: just enough to keep grid points off the boundary
      // itself (thin triangles are fine for the exact CDT, but gaps from an
      // aggressive margin would widen elements past the chord tolerance).
      if (norm(p - c) < 0.1) return true;
    }
    return false;
  }

  const BRepSolid& solid_;
  const Face& face_;
  const TessellationSpec& spec_;
  const EdgePolylineCache& cache_;
  const SurfaceGeom& surf_;
  double chordAbs_;
  double angleRad_;
  double uPeriod_ = 0.0, vPeriod_ = 0.0;
  std::vector<std::array<Vec3, 3>> fanTris_;  // polar fans, already in 3D
};

}  // namespace

FaceMesh tessellateFace(const BRepSolid& solid, const Face& face, const TessellationSpec& spec,
                        const EdgePolylineCache& cache) {
  return FaceTessellator(solid, face, spec, cache).run();
}

TessellationResult tessellateSolid(const BRepSolid& solid, const TessellationSpec& spec) {
  const EdgePolylineCache cache(solid, spec);
  TessellationResult out;
  for (const auto& face : solid.faces) {
    try {
      out.meshes.push_back(tessellateFace(solid, face, spec, cache));
    } catch (const Error& e) {
      out.skipped.push_back({face.id, e.what()});
    }
  }
  return out;
}

}  // namespace steppart
