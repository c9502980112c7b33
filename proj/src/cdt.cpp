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

#include "steppart/cdt.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "steppart/error.hpp"

namespace steppart::cdt {

namespace {

using i64 = std::int64_t;
using i128 = __int128;

constexpr i64 kLattice = 1 << 26;

struct IPoint {
  i64 x = 0, y = 0;
};

inline int sgn(i128 v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// Exact: >0 when (a,b,c) is counter-clockwise.
inline int orient(const IPoint& a, const IPoint& b, const IPoint& c) {
  const i128 det = i128(b.x - a.x) * i128(c.y - a.y) - i128(b.y - a.y) * i128(c.x - a.x);
  return sgn(det);
}

// Exact: >0 when d is strictly inside the circumcircle of CCW (a,b,c).
inline int incircle(const IPoint& a, const IPoint& b, const IPoint& c, const IPoint& d) {
  const i128 adx = a.x - d.x, ady = a.y - d.y;
  const i128 bdx = b.x - d.x, bdy = b.y - d.y;
  const i128 cdx = c.x - d.x, cdy = c.y - d.y;
  const i128 al = adx * adx + ady * ady;
  const i128 bl = bdx * bdx + bdy * bdy;
  const i128 cl = cdx * cdx + cdy * cdy;
  const i128 det = adx * (bdy * cl - cdy * bl) - ady * (bdx * cl - cdx * bl) +
                   al * (bdx * cdy - cdx * bdy);
  return sgn(det);
}

// Incircle with the triangle's orientation normalized to CCW; a degenerate
// (collinear) triangle contains nothing.
inline int incircleOriented(const IPoint& a, const IPoint& b, const IPoint& c, const IPoint& d) {
  const int o = orient(a, b, c);
  if (o > 0) return incircle(a, b, c, d);
  if (o < 0) return incircle(a, c, b, d);
  return -1;
}

struct Tri {
  int v[3] = {-1, -1, -1};   // CCW
  int nb[3] = {-1, -1, -1};  // nb[i] across the edge opposite v[i]
  bool alive = true;
};

inline std::uint64_t edgeKey(int a, int b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

class Triangulator {
 public:
  Triangulator(const std::vector<Vec2>& points,
               const std::vector<std::pair<int, int>>& constraints) {
    snapPoints(points);
    if (numReal_ < 3) return;
    makeSuperTriangle();
    for (int i = 0; i < numReal_; ++i) insertPoint(i);
    for (const auto& [a, b] : constraints) {
      const int ua = repOf_[a];
      const int ub = repOf_[b];
      if (ua != ub) recoverEdge(ua, ub);
    }
  }

  std::vector<std::array<int, 3>> insideTriangles() const {
    std::vector<std::array<int, 3>> out;
    if (tris_.empty()) return out;
    // Even-odd parity flood from the super-triangle fringe.
    std::vector<int> parity(tris_.size(), -1);
    std::deque<int> queue;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!tris_[t].alive) continue;
      for (int v : tris_[t].v)
        if (v >= numReal_) {
          if (parity[t] == -1) {
            parity[t] = 0;
            queue.push_back(static_cast<int>(t));
          }
          break;
        }
    }
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop_front();
      for (int i = 0; i < 3; ++i) {
        const int n = tris_[t].nb[i];
        if (n < 0 || parity[n] != -1) continue;
        const bool constrained =
            constrained_.count(edgeKey(tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3])) > 0;
        parity[n] = constrained ? (parity[t] ^ 1) : parity[t];
        queue.push_back(n);
      }
    }
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!tris_[t].alive || parity[t] != 1) continue;
      bool super = false;
      for (int v : tris_[t].v) super = super || v >= numReal_;
      if (super) continue;
      out.push_back({original_[tris_[t].v[0]], original_[tris_[t].v[1]],
                     original_[tris_[t].v[2]]});
    }
    return out;
  }

  bool degenerate() const { return numReal_ < 3 || tris_.empty(); }

 private:
  [[noreturn]] static void fail(const std::string& msg) { throw Error("tessellate", msg); }

  void snapPoints(const std::vector<Vec2>& points) {
    repOf_.assign(points.size(), -1);
    if (points.empty()) return;
    double minX = points[0].x, maxX = points[0].x;
    double minY = points[0].y, maxY = points[0].y;
    for (const auto& p : points) {
      minX = std::min(minX, p.x);
      maxX = std::max(maxX, p.x);
      minY = std::min(minY, p.y);
      maxY = std::max(maxY, p.y);
    }
    const double extent = std::max(maxX - minX, maxY - minY);
    const double scale = extent > 0.0 ? double(kLattice) / extent : 0.0;
    std::unordered_map<std::uint64_t, int> seen;
    for (std::size_t i = 0; i < points.size(); ++i) {
      IPoint ip;
      ip.x = i64(std::llround((points[i].x - minX) * scale));
      ip.y = i64(std::llround((points[i].y - minY) * scale));
      const std::uint64_t key =
          (std::uint64_t(std::uint32_t(ip.x)) << 32) | std::uint32_t(ip.y);
      auto [it, inserted] = seen.emplace(key, static_cast<int>(pts_.size()));
      if (inserted) {
        pts_.push_back(ip);
        original_.push_back(static_cast<int>(i));
      }
      repOf_[i] = it->second;
    }
    numReal_ = static_cast<int>(pts_.size());
  }

  void makeSuperTriangle() {
    const i64 L = kLattice;
    pts_.push_back({-3 * L, -3 * L});
    pts_.push_back({4 * L, -3 * L});
    pts_.push_back({L / 2, 4 * L});
    vertTri_.assign(pts_.size(), -1);
    Tri t;
    t.v[0] = numReal_;
    t.v[1] = numReal_ + 1;
    t.v[2] = numReal_ + 2;
    tris_.push_back(t);
    for (int v : t.v) vertTri_[v] = 0;
    lastTri_ = 0;
  }

  int newTri(int a, int b, int c) {
    Tri t;
    t.v[0] = a;
    t.v[1] = b;
    t.v[2] = c;
    tris_.push_back(t);
    const int idx = static_cast<int>(tris_.size()) - 1;
    vertTri_[a] = idx;
    vertTri_[b] = idx;
    vertTri_[c] = idx;
    return idx;
  }

  int neighborSlot(int t, int n) const {
    for (int i = 0; i < 3; ++i)
      if (tris_[t].nb[i] == n) return i;
    return -1;
  }

  // Walk to a triangle containing p (inside or on boundary).
  int locate(int pIdx) const {
    const IPoint& p = pts_[pIdx];
    int cur = lastTri_;
    if (cur < 0 || !tris_[cur].alive)
      for (std::size_t t = 0; t < tris_.size(); ++t)
        if (tris_[t].alive) {
          cur = static_cast<int>(t);
          break;
        }
    const std::size_t maxSteps = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < maxSteps; ++step) {
      const Tri& t = tris_[cur];
      int next = -1;
      for (int i = 0; i < 3; ++i) {
        const int va = t.v[(i + 1) % 3], vb = t.v[(i + 2) % 3];
        if (orient(pts_[va], pts_[vb], p) < 0) {
          next = t.nb[i];
          break;
        }
      }
      if (next < 0) return cur;
      cur = next;
    }
    // Degenerate walk; deterministic exhaustive fallback.
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!tris_[t].alive) continue;
      bool inside = true;
      for (int i = 0; i < 3 && inside; ++i)
        inside = orient(pts_[tris_[t].v[(i + 1) % 3]], pts_[tris_[t].v[(i + 2) % 3]], p) >= 0;
      if (inside) return static_cast<int>(t);
    }
    fail("point location failed");
  }

  void insertPoint(int pIdx) {
    const IPoint& p = pts_[pIdx];
    const int start = locate(pIdx);

    // Bowyer-Watson cavity: all connected triangles whose circumcircle
    // strictly contains p.
    std::vector<int> cavity;
    std::unordered_set<int> inCavity;
    std::deque<int> queue{start};
    inCavity.insert(start);
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop_front();
      cavity.push_back(t);
      for (int i = 0; i < 3; ++i) {
        const int n = tris_[t].nb[i];
        if (n < 0 || inCavity.count(n)) continue;
        const Tri& nt = tris_[n];
        if (incircle(pts_[nt.v[0]], pts_[nt.v[1]], pts_[nt.v[2]], p) > 0) {
          inCavity.insert(n);
          queue.push_back(n);
        }
      }
    }

    // Rim: directed edges of the cavity boundary with their outer neighbor.
    std::unordered_map<int, std::pair<int, int>> rimNext;  // from -> (to, outerTri)
    for (int t : cavity) {
      for (int i = 0; i < 3; ++i) {
        const int n = tris_[t].nb[i];
        if (n >= 0 && inCavity.count(n)) continue;
        rimNext[tris_[t].v[(i + 1) % 3]] = {tris_[t].v[(i + 2) % 3], n};
      }
    }
    for (int t : cavity) tris_[t].alive = false;

    // Fan from p around the rim cycle, starting at the smallest rim vertex.
    int first = rimNext.begin()->first;
    for (const auto& [from, rest] : rimNext) first = std::min(first, from);
    std::vector<int> newTris;
    int from = first;
    do {
      auto [to, outer] = rimNext.at(from);
      const int nt = newTri(pIdx, from, to);
      tris_[nt].nb[0] = outer;
      if (outer >= 0) {
        for (int i = 0; i < 3; ++i) {
          const int wa = tris_[outer].v[(i + 1) % 3], wb = tris_[outer].v[(i + 2) % 3];
          if ((wa == to && wb == from) || (wa == from && wb == to)) tris_[outer].nb[i] = nt;
        }
      }
      newTris.push_back(nt);
      from = to;
    } while (from != first);

    // Fan tri k = (p, from, to): the edge opposite `from` is (to, p), shared
    // with the next fan triangle; the edge opposite `to` is (p, from),
    // shared with the previous one.
    const int m = static_cast<int>(newTris.size());
    for (int k = 0; k < m; ++k) {
      tris_[newTris[k]].nb[1] = newTris[(k + 1) % m];
      tris_[newTris[k]].nb[2] = newTris[(k - 1 + m) % m];
    }
    lastTri_ = newTris.back();
  }

  // All alive triangles around vertex v (via adjacency circulation).
  std::vector<int> fan(int v) const {
    std::vector<int> out;
    int start = vertTri_[v];
    if (start < 0 || !tris_[start].alive || !hasVertex(start, v)) {
      start = -1;
      for (std::size_t t = 0; t < tris_.size(); ++t)
        if (tris_[t].alive && hasVertex(static_cast<int>(t), v)) {
          start = static_cast<int>(t);
          break;
        }
      if (start < 0) fail("vertex lost from triangulation");
    }
    int cur = start;
    do {
      out.push_back(cur);
      const int i = vertexSlot(cur, v);
      cur = tris_[cur].nb[(i + 2) % 3];  // across edge (v, v[i+1])
      if (cur < 0) fail("open fan in bounded triangulation");
    } while (cur != start);
    return out;
  }

  bool hasVertex(int t, int v) const {
    return tris_[t].v[0] == v || tris_[t].v[1] == v || tris_[t].v[2] == v;
  }

  int vertexSlot(int t, int v) const {
    for (int i = 0; i < 3; ++i)
      if (tris_[t].v[i] == v) return i;
    fail("vertex not in triangle");
  }

  bool edgeExists(int a, int b) const {
    for (int t : fan(a))
      if (hasVertex(t, b)) return true;
    return false;
  }

  void markConstrained(int a, int b) { constrained_.insert(edgeKey(a, b)); }

  static bool between(const IPoint& a, const IPoint& b, const IPoint& p) {
    // p collinear with (a,b): strictly between by bounding interval.
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
  }

  void recoverEdge(int a, int b) {
    if (edgeExists(a, b)) {
      markConstrained(a, b);
      return;
    }
    const IPoint& pa = pts_[a];
    const IPoint& pb = pts_[b];

    // Find the fan triangle whose sector at a contains the direction to b.
    int t0 = -1;
    for (int t : fan(a)) {
      const int i = vertexSlot(t, a);
      const int p = tris_[t].v[(i + 1) % 3];
      const int q = tris_[t].v[(i + 2) % 3];
      const int op = orient(pa, pts_[p], pb);
      const int oq = orient(pa, pts_[q], pb);
      if (op == 0 && between(pa, pb, pts_[p])) {
        markConstrained(a, p);
        recoverEdge(p, b);
        return;
      }
      if (oq == 0 && between(pa, pb, pts_[q])) {
        markConstrained(a, q);
        recoverEdge(q, b);
        return;
      }
      if (op > 0 && oq < 0) {
        t0 = t;
        break;
      }
    }
    if (t0 < 0) fail("constraint walk failed to start");

    // March the crossed strip from a to b, collecting the chains of vertices
    // left (upper) and right (lower) of the constraint line. In CCW triangle
    // (a, p, q) crossed toward b, p lies right of a->b and q left of it.
    std::vector<int> strip{t0};
    std::vector<int> upper, lower;
    {
      const int i = vertexSlot(t0, a);
      lower.push_back(tris_[t0].v[(i + 1) % 3]);
      upper.push_back(tris_[t0].v[(i + 2) % 3]);
    }
    int cur = t0;
    while (true) {
      const int crossU = upper.back();
      const int crossL = lower.back();
      if (constrained_.count(edgeKey(crossU, crossL)))
        fail("constraint segments cross (self-intersecting trimming loops)");
      const int slot = neighborSlotForEdge(cur, crossU, crossL);
      const int next = tris_[cur].nb[slot];
      if (next < 0) fail("constraint walk left the triangulation");
      strip.push_back(next);
      int r = -1;
      for (int v : tris_[next].v)
        if (v != crossU && v != crossL) r = v;
      if (r == b) break;
      const int o = orient(pa, pb, pts_[r]);
      if (o == 0 && between(pa, pb, pts_[r])) {
        // Constraint passes through vertex r: recover in two halves.
        recoverEdge(a, r);
        recoverEdge(r, b);
        return;
      }
      if (o > 0)
        upper.push_back(r);
      else
        lower.push_back(r);
      cur = next;
    }

    // Outer neighbors of the strip, keyed by directed rim edge.
    std::unordered_map<std::uint64_t, int> outer;
    std::unordered_set<int> inStrip(strip.begin(), strip.end());
    for (int t : strip)
      for (int i = 0; i < 3; ++i) {
        const int n = tris_[t].nb[i];
        if (n >= 0 && inStrip.count(n)) continue;
        outer[edgeKey(tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3])] = n;
      }
    for (int t : strip) tris_[t].alive = false;

    std::vector<int> newTris;
    triangulatePseudo(a, b, upper, newTris);
    std::reverse(lower.begin(), lower.end());
    triangulatePseudo(b, a, lower, newTris);
    relink(newTris, outer);
    markConstrained(a, b);
    legalize(newTris);
  }

  int neighborSlotForEdge(int t, int va, int vb) const {
    for (int i = 0; i < 3; ++i) {
      const int wa = tris_[t].v[(i + 1) % 3], wb = tris_[t].v[(i + 2) % 3];
      if ((wa == va && wb == vb) || (wa == vb && wb == va)) return i;
    }
    fail("edge not in triangle");
  }

  // Delaunay-criterion triangulation of a pseudo-polygon chain hanging off
  // the base edge (a, b).
  void triangulatePseudo(int a, int b, const std::vector<int>& chain, std::vector<int>& out) {
    if (chain.empty()) return;
    // Prefer a candidate off the base line; a simple pseudo-polygon always
    // has one.
    std::size_t ci = 0;
    for (std::size_t i = 0; i < chain.size(); ++i)
      if (orient(pts_[a], pts_[b], pts_[chain[i]]) != 0) {
        ci = i;
        break;
      }
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (i == ci || orient(pts_[a], pts_[b], pts_[chain[i]]) == 0) continue;
      if (incircleOriented(pts_[a], pts_[b], pts_[chain[ci]], pts_[chain[i]]) > 0) ci = i;
    }
    const int c = chain[ci];
    const std::vector<int> left(chain.begin(), chain.begin() + ci);
    const std::vector<int> right(chain.begin() + ci + 1, chain.end());
    triangulatePseudo(a, c, left, out);
    triangulatePseudo(c, b, right, out);
    const int o = orient(pts_[a], pts_[b], pts_[c]);
    out.push_back(o >= 0 ? newTri(a, b, c) : newTri(a, c, b));
  }

  // Wire up adjacency for freshly created triangles: shared edges among the
  // new set, outer rim edges from the removed region's neighbors.
  void relink(const std::vector<int>& newTris, std::unordered_map<std::uint64_t, int>& outer) {
    std::unordered_map<std::uint64_t, std::pair<int, int>> half;  // edge -> (tri, slot)
    for (int t : newTris)
      for (int i = 0; i < 3; ++i) {
        const std::uint64_t key = edgeKey(tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3]);
        auto it = half.find(key);
        if (it == half.end()) {
          half.emplace(key, std::make_pair(t, i));
        } else {
          tris_[t].nb[i] = it->second.first;
          tris_[it->second.first].nb[it->second.second] = t;
          half.erase(it);
        }
      }
    for (const auto& [key, slot] : half) {
      auto it = outer.find(key);
      const int n = it == outer.end() ? -1 : it->second;
      tris_[slot.first].nb[slot.second] = n;
      if (n >= 0) {
        const int va = tris_[slot.first].v[(slot.second + 1) % 3];
        const int vb = tris_[slot.first].v[(slot.second + 2) % 3];
        const int ns = neighborSlotForEdge(n, va, vb);
        tris_[n].nb[ns] = slot.first;
      }
    }
  }

  // Restore the Delaunay criterion by flipping non-constrained edges.
  void legalize(const std::vector<int>& seeds) {
    std::vector<std::pair<int, int>> stack;  // (tri, slot)
    for (int t : seeds)
      for (int i = 0; i < 3; ++i) stack.push_back({t, i});
    std::size_t guard = 0;
    const std::size_t maxOps = 64 * (tris_.size() + 16);
    while (!stack.empty() && guard++ < maxOps) {
      auto [t, i] = stack.back();
      stack.pop_back();
      if (t >= static_cast<int>(tris_.size()) || !tris_[t].alive) continue;
      const int n = tris_[t].nb[i];
      if (n < 0 || !tris_[n].alive) continue;
      const int vb = tris_[t].v[(i + 1) % 3], vc = tris_[t].v[(i + 2) % 3];
      if (constrained_.count(edgeKey(vb, vc))) continue;
      const int ns = neighborSlot(n, t);
      if (ns < 0) continue;
      const int va = tris_[t].v[i];
      const int vd = tris_[n].v[ns];
      if (incircleOriented(pts_[va], pts_[vb], pts_[vc], pts_[vd]) <= 0) continue;
      // Flip (vb,vc) -> (va,vd). Strict incircle violation implies the quad
      // is strictly convex, so both new triangles are valid CCW.
      const int nbAB = tris_[t].nb[(i + 2) % 3];   // across (va, vb)
      const int nbCA = tris_[t].nb[(i + 1) % 3];   // across (vc, va)
      const int nbBD = tris_[n].nb[(ns + 2) % 3];  // across (vd, vb)
      const int nbDC = tris_[n].nb[(ns + 1) % 3];  // across (vc, vd)
      tris_[t].v[0] = va;
      tris_[t].v[1] = vb;
      tris_[t].v[2] = vd;
      tris_[n].v[0] = va;
      tris_[n].v[1] = vd;
      tris_[n].v[2] = vc;
      tris_[t].nb[0] = nbBD;
      tris_[t].nb[1] = n;
      tris_[t].nb[2] = nbAB;
      tris_[n].nb[0] = nbDC;
      tris_[n].nb[1] = nbCA;
      tris_[n].nb[2] = t;
      for (int v : tris_[t].v) vertTri_[v] = t;
      for (int v : tris_[n].v) vertTri_[v] = n;
      if (nbBD >= 0) tris_[nbBD].nb[neighborSlotForEdge(nbBD, vb, vd)] = t;
      if (nbDC >= 0) tris_[nbDC].nb[neighborSlotForEdge(nbDC, vd, vc)] = n;
      if (nbAB >= 0) tris_[nbAB].nb[neighborSlotForEdge(nbAB, va, vb)] = t;
      if (nbCA >= 0) tris_[nbCA].nb[neighborSlotForEdge(nbCA, vc, va)] = n;
      stack.push_back({t, 0});
      stack.push_back({t, 2});
      stack.push_back({n, 0});
      stack.push_back({n, 1});
    }
  }

  std::vector<IPoint> pts_;
  std::vector<int> original_;  // unique index -> original input index
  std::vector<int> repOf_;     // original input index -> unique index
  std::vector<Tri> tris_;
  std::vector<int> vertTri_;
  std::unordered_set<std::uint64_t> constrained_;
  int numReal_ = 0;
  int lastTri_ = -1;
};

}  // namespace

std::vector<std::array<int, 3>> triangulate(const std::vector<Vec2>& points,
                                            const std::vector<std::pair<int, int>>& constraints) {
  Triangulator tr(points, constraints);
  if (tr.degenerate()) return {};
  return tr.insideTriangles();
}

}  // namespace steppart::cdt
