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

#include "steppart/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>

#include "steppart/error.hpp"

namespace steppart {

nlohmann::json AgreementReport::toJson() const {
  nlohmann::json matchedJson = nlohmann::json::array();
  for (const auto& [r, c] : matched) matchedJson.push_back({r, c});
  nlohmann::json iou = nlohmann::json::object();
  for (const auto& [label, value] : perLabelIoU) iou[std::to_string(label)] = value;
  return {{"accuracy", accuracy},
          {"miou", meanIoU},
          {"boundary_accuracy", boundaryAccuracy},
          {"matched", matchedJson},
          {"unmatched_ref", unmatchedRef},
          {"unmatched_cand", unmatchedCand},
          {"per_label_iou", iou}};
}

namespace {

inline double uniform01(std::mt19937_64& eng) {
  return double(eng() >> 11) * 0x1.0p-53;
}

}  // namespace

SampledLabels samplePoints(const Carrier& carrier, int n, std::uint64_t seed) {
  if (carrier.triangles.empty()) throw Error("eval", "empty carrier");
  if (n < 1) throw Error("eval", "sample count must be >= 1");

  std::vector<double> cumArea(carrier.triangles.size());
  double total = 0.0;
  for (std::size_t t = 0; t < carrier.triangles.size(); ++t) {
    const auto& tri = carrier.triangles[t];
    total += triangleArea(carrier.vertices[tri[0]], carrier.vertices[tri[1]],
                          carrier.vertices[tri[2]]);
    cumArea[t] = total;
  }
  if (total <= 0.0) throw Error("eval", "carrier has zero surface area");

  SampledLabels out;
  out.points.reserve(n);
  out.labels.reserve(n);
  std::mt19937_64 eng(seed);
  for (int i = 0; i < n; ++i) {
    const double pick = uniform01(eng) * total;
    const double r1 = uniform01(eng);
    const double r2 = uniform01(eng);
    const std::size_t t =
        std::upper_bound(cumArea.begin(), cumArea.end(), pick) - cumArea.begin();
    const std::size_t tc = std::min(t, carrier.triangles.size() - 1);
    const auto& tri = carrier.triangles[tc];
    const double s = std::sqrt(r1);
    const double wa = 1.0 - s, wb = s * (1.0 - r2), wc = s * r2;
    out.points.push_back(carrier.vertices[tri[0]] * wa + carrier.vertices[tri[1]] * wb +
                         carrier.vertices[tri[2]] * wc);
    out.labels.push_back(carrier.partLabel[tc]);
  }
  return out;
}

SampledLabels sampleBoundaryPoints(const Carrier& carrier, int n, double bandFrac) {
  SampledLabels out;
  if (carrier.triangles.empty() || n < 1) return out;
  const double diag = carrier.bounds().diagonal();
  const double offset = 0.5 * bandFrac * diag;

  struct BoundaryEdge {
    int v0, v1;
    int triA, triB;  // lowest-index triangles with two distinct labels
    double len;
  };
  std::vector<BoundaryEdge> bEdges;
  double totalLen = 0.0;
  for (const auto& e : carrierEdges(carrier)) {
    if (e.tris.size() < 2) continue;
    int triA = e.tris[0];
    int triB = -1;
    for (int t : e.tris)
      if (carrier.partLabel[t] != carrier.partLabel[triA]) {
        triB = t;
        break;
      }
    if (triB < 0) continue;
    const double len = distance(carrier.vertices[e.v0], carrier.vertices[e.v1]);
    bEdges.push_back({e.v0, e.v1, triA, triB, len});
    totalLen += len;
  }
  if (bEdges.empty() || totalLen <= 0.0) return out;

  auto centroid = [&](int t) {
    const auto& tri = carrier.triangles[t];
    return (carrier.vertices[tri[0]] + carrier.vertices[tri[1]] + carrier.vertices[tri[2]]) *
           (1.0 / 3.0);
  };
  for (const auto& e : bEdges) {
    const int count = std::max(1, static_cast<int>(std::llround(n * e.len / totalLen)));
    for (int k = 0; k < count; ++k) {
      const double u = (k + 0.5) / count;
      const Vec3 q = carrier.vertices[e.v0] + (carrier.vertices[e.v1] - carrier.vertices[e.v0]) * u;
      for (int t : {e.triA, e.triB}) {
        const Vec3 toCentroid = centroid(t) - q;
        const double d = norm(toCentroid);
        const Vec3 p = d > 0.0 ? q + toCentroid * std::min(1.0, offset / d) : q;
        out.points.push_back(p);
        out.labels.push_back(carrier.partLabel[t]);
      }
    }
  }
  return out;
}

std::vector<int> vertexLabels(const Carrier& carrier) {
  std::vector<int> labels(carrier.vertices.size(), -1);
  for (std::size_t t = 0; t < carrier.triangles.size(); ++t)
    for (int v : carrier.triangles[t])
      if (labels[v] < 0) labels[v] = carrier.partLabel[t];
  return labels;
}

// ---------------------------------------------------------------------------
// Nearest neighbor
// ---------------------------------------------------------------------------

namespace {

// Uniform hash grid over the target vertices; queries are exact (expanding
// shells, terminated once no closer cell can exist).
class NnGrid {
 public:
  explicit NnGrid(const std::vector<Vec3>& pts) : pts_(pts) {
    Aabb box;
    for (const auto& p : pts) box.expand(p);
    lo_ = box.lo;
    const double diag = std::max(box.diagonal(), 1e-300);
    const double targetCells = std::cbrt(double(std::max<std::size_t>(pts.size(), 1)));
    cell_ = std::max(diag / std::max(1.0, 2.0 * targetCells), 1e-300);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto c = coord(pts[i]);
      for (int k = 0; k < 3; ++k) {
        cellLo_[k] = std::min(cellLo_[k], c[k]);
        cellHi_[k] = std::max(cellHi_[k], c[k]);
      }
      cells_[keyOf(c)].push_back(int(i));
    }
  }

  int nearest(const Vec3& q) const {
    const auto c = coord(q);
    // Shells beyond this cover no occupied cell.
    std::int64_t ringCap = 0;
    for (int k = 0; k < 3; ++k) {
      ringCap = std::max(ringCap, std::abs(c[k] - cellLo_[k]));
      ringCap = std::max(ringCap, std::abs(c[k] - cellHi_[k]));
    }
    int best = -1;
    double bestD2 = std::numeric_limits<double>::max();
    for (std::int64_t ring = 0; ring <= ringCap; ++ring) {
      if (best >= 0 && ring >= 2) {
        // Every point in this or a farther shell is at distance >= (ring-1)*cell,
        // so stop strictly past the current best (ties keep scanning so the
        // smallest index wins).
        const double dmin = double(ring - 1) * cell_;
        if (dmin * dmin > bestD2) break;
      }
      for (std::int64_t dx = -ring; dx <= ring; ++dx)
        for (std::int64_t dy = -ring; dy <= ring; ++dy)
          for (std::int64_t dz = -ring; dz <= ring; ++dz) {
            if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
            auto it = cells_.find(keyOf({c[0] + dx, c[1] + dy, c[2] + dz}));
            if (it == cells_.end()) continue;
            for (int i : it->second) {
              const double d2 = norm2(pts_[i] - q);
              if (d2 < bestD2 || (d2 == bestD2 && i < best)) {
                bestD2 = d2;
                best = i;
              }
            }
          }
    }
    return best;
  }

 private:
  std::array<std::int64_t, 3> coord(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor((p.x - lo_.x) / cell_)),
            static_cast<std::int64_t>(std::floor((p.y - lo_.y) / cell_)),
            static_cast<std::int64_t>(std::floor((p.z - lo_.z) / cell_))};
  }
  static std::uint64_t keyOf(const std::array<std::int64_t, 3>& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int64_t v : c) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ULL;
    }
    return h;
  }

  const std::vector<Vec3>& pts_;
  Vec3 lo_;
  double cell_ = 1.0;
  std::array<std::int64_t, 3> cellLo_{0, 0, 0};
  std::array<std::int64_t, 3> cellHi_{0, 0, 0};
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace

SampledLabels transferLabels(const SampledLabels& points, const Carrier& target) {
  if (target.vertices.empty()) throw Error("eval", "empty transfer target");
  const std::vector<int> vLabels = vertexLabels(target);
  const NnGrid grid(target.vertices);
  SampledLabels out;
  out.points = points.points;
  out.labels.resize(points.size());
  out.source = "transfer";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int v = grid.nearest(points.points[i]);
    out.labels[i] = vLabels[v];
  }
  return out;
}

namespace {

// Ericson-style closest point on a triangle.
Vec3 closestOnTriangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

// Uniform grid over triangles (each triangle registered in every cell its
// bounding box overlaps); exact nearest-triangle queries.
class TriGrid {
 public:
  explicit TriGrid(const Carrier& c) : c_(c) {
    Aabb box = c.bounds();
    lo_ = box.lo;
    const double diag = std::max(box.diagonal(), 1e-300);
    const double targetCells = std::cbrt(double(std::max<std::size_t>(c.triangles.size(), 1)));
    cell_ = std::max(diag / std::max(1.0, 2.0 * targetCells), 1e-300);
    for (std::size_t t = 0; t < c.triangles.size(); ++t) {
      Aabb tb;
      for (int v : c.triangles[t]) tb.expand(c.vertices[v]);
      const auto clo = coord(tb.lo);
      const auto chi = coord(tb.hi);
      for (int k = 0; k < 3; ++k) {
        cellLo_[k] = std::min(cellLo_[k], clo[k]);
        cellHi_[k] = std::max(cellHi_[k], chi[k]);
      }
      for (std::int64_t x = clo[0]; x <= chi[0]; ++x)
        for (std::int64_t y = clo[1]; y <= chi[1]; ++y)
          for (std::int64_t z = clo[2]; z <= chi[2]; ++z)
            cells_[keyOf({x, y, z})].push_back(static_cast<int>(t));
    }
  }

  int nearestTriangle(const Vec3& q) const {
    const auto c = coord(q);
    std::int64_t ringCap = 0;
    for (int k = 0; k < 3; ++k) {
      ringCap = std::max(ringCap, std::abs(c[k] - cellLo_[k]));
      ringCap = std::max(ringCap, std::abs(c[k] - cellHi_[k]));
    }
    int best = -1;
    double bestD2 = std::numeric_limits<double>::max();
    for (std::int64_t ring = 0; ring <= ringCap; ++ring) {
      if (best >= 0 && ring >= 2) {
        const double dmin = double(ring - 1) * cell_;
        if (dmin * dmin > bestD2) break;
      }
      for (std::int64_t dx = -ring; dx <= ring; ++dx)
        for (std::int64_t dy = -ring; dy <= ring; ++dy)
          for (std::int64_t dz = -ring; dz <= ring; ++dz) {
            if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
            auto it = cells_.find(keyOf({c[0] + dx, c[1] + dy, c[2] + dz}));
            if (it == cells_.end()) continue;
            for (int t : it->second) {
              const auto& tri = c_.triangles[t];
              const Vec3 cp = closestOnTriangle(q, c_.vertices[tri[0]], c_.vertices[tri[1]],
                                                c_.vertices[tri[2]]);
              const double d2 = norm2(cp - q);
              if (d2 < bestD2 || (d2 == bestD2 && t < best)) {
                bestD2 = d2;
                best = t;
              }
            }
          }
    }
    return best;
  }

 private:
  std::array<std::int64_t, 3> coord(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor((p.x - lo_.x) / cell_)),
            static_cast<std::int64_t>(std::floor((p.y - lo_.y) / cell_)),
            static_cast<std::int64_t>(std::floor((p.z - lo_.z) / cell_))};
  }
  static std::uint64_t keyOf(const std::array<std::int64_t, 3>& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int64_t v : c) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ULL;
    }
    return h;
  }

  const Carrier& c_;
  Vec3 lo_;
  double cell_ = 1.0;
  std::array<std::int64_t, 3> cellLo_{0, 0, 0};
  std::array<std::int64_t, 3> cellHi_{0, 0, 0};
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace

SampledLabels transferLabelsSurface(const SampledLabels& points, const Carrier& target) {
  if (target.triangles.empty()) throw Error("eval", "empty transfer target");
  const TriGrid grid(target);
  SampledLabels out;
  out.points = points.points;
  out.labels.resize(points.size());
  out.source = "transfer-surface";
  for (std::size_t i = 0; i < points.size(); ++i)
    out.labels[i] = target.partLabel[grid.nearestTriangle(points.points[i])];
  return out;
}

// ---------------------------------------------------------------------------
// Hungarian alignment
// ---------------------------------------------------------------------------

namespace {

// Minimum-cost assignment over a square matrix (potentials method).
// Returns match[col] = row.
std::vector<int> hungarianMinSquare(const std::vector<std::vector<std::int64_t>>& a) {
  const int n = static_cast<int>(a.size());
  const std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    minv.assign(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      std::int64_t delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> rowOfCol(n, -1);
  for (int j = 1; j <= n; ++j) rowOfCol[j - 1] = p[j] - 1;
  return rowOfCol;
}

// Maximum-weight assignment on a possibly rectangular weight matrix;
// returns (row, col) pairs (all rows or all cols matched, padding ignored).
std::vector<std::pair<int, int>> hungarianMax(
    const std::vector<std::vector<std::int64_t>>& w, std::int64_t* objective) {
  const int rows = static_cast<int>(w.size());
  const int cols = rows ? static_cast<int>(w[0].size()) : 0;
  const int n = std::max(rows, cols);
  std::vector<std::pair<int, int>> out;
  if (n == 0) {
    if (objective) *objective = 0;
    return out;
  }
  std::int64_t maxW = 0;
  for (const auto& row : w)
    for (std::int64_t x : row) maxW = std::max(maxW, x);
  std::vector<std::vector<std::int64_t>> cost(n, std::vector<std::int64_t>(n, maxW));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) cost[i][j] = maxW - w[i][j];
  const auto rowOfCol = hungarianMinSquare(cost);
  std::int64_t total = 0;
  for (int j = 0; j < cols; ++j) {
    const int i = rowOfCol[j];
    if (i < 0 || i >= rows) continue;
    total += w[i][j];
    out.push_back({i, j});
  }
  if (objective) *objective = total;
  std::sort(out.begin(), out.end());
  return out;
}

struct Confusion {
  std::vector<int> refLabels, candLabels;  // sorted unique
  std::vector<std::vector<std::int64_t>> counts;
  std::unordered_map<int, int> refIndex, candIndex;
};

Confusion buildConfusion(const SampledLabels& ref, const SampledLabels& cand) {
  Confusion c;
  std::set<int> refSet(ref.labels.begin(), ref.labels.end());
  std::set<int> candSet(cand.labels.begin(), cand.labels.end());
  c.refLabels.assign(refSet.begin(), refSet.end());
  c.candLabels.assign(candSet.begin(), candSet.end());
  for (std::size_t i = 0; i < c.refLabels.size(); ++i) c.refIndex[c.refLabels[i]] = int(i);
  for (std::size_t i = 0; i < c.candLabels.size(); ++i) c.candIndex[c.candLabels[i]] = int(i);
  c.counts.assign(c.refLabels.size(), std::vector<std::int64_t>(c.candLabels.size(), 0));
  for (std::size_t i = 0; i < ref.labels.size(); ++i)
    ++c.counts[c.refIndex[ref.labels[i]]][c.candIndex[cand.labels[i]]];
  return c;
}

}  // namespace

std::int64_t hungarianObjective(const std::vector<std::vector<std::int64_t>>& weights) {
  std::int64_t obj = 0;
  hungarianMax(weights, &obj);
  return obj;
}

std::vector<std::pair<int, int>> alignLabels(const SampledLabels& ref,
                                             const SampledLabels& cand) {
  if (ref.size() != cand.size()) throw Error("eval", "mismatched point counts");
  const Confusion c = buildConfusion(ref, cand);
  std::vector<std::pair<int, int>> out;
  for (const auto& [ri, ci] : hungarianMax(c.counts, nullptr))
    if (c.counts[ri][ci] > 0) out.push_back({c.refLabels[ri], c.candLabels[ci]});
  return out;
}

AgreementReport agreement(const SampledLabels& ref, const SampledLabels& cand,
                          const SampledLabels& refBoundary, const SampledLabels& candBoundary) {
  if (ref.size() != cand.size()) throw Error("eval", "mismatched point counts");
  if (refBoundary.size() != candBoundary.size())
    throw Error("eval", "mismatched boundary point counts");

  AgreementReport rep;
  rep.matched = alignLabels(ref, cand);
  std::unordered_map<int, int> candToRef;
  std::set<int> matchedRef, matchedCand;
  for (const auto& [r, c] : rep.matched) {
    candToRef[c] = r;
    matchedRef.insert(r);
    matchedCand.insert(c);
  }
  const Confusion c = buildConfusion(ref, cand);
  for (int r : c.refLabels)
    if (!matchedRef.count(r)) rep.unmatchedRef.push_back(r);
  for (int l : c.candLabels)
    if (!matchedCand.count(l)) rep.unmatchedCand.push_back(l);

  auto mapped = [&](int candLabel) {
    auto it = candToRef.find(candLabel);
    return it == candToRef.end() ? std::numeric_limits<int>::min() : it->second;
  };

  std::size_t agree = 0;
  std::unordered_map<int, std::int64_t> inter, uni;
  for (int r : c.refLabels) {
    inter[r] = 0;
    uni[r] = 0;
  }
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const int r = ref.labels[i];
    const int m = mapped(cand.labels[i]);
    if (r == m) {
      ++agree;
      ++inter[r];
      ++uni[r];
    } else {
      ++uni[r];
      if (inter.count(m)) ++uni[m];
    }
  }
  rep.accuracy = double(agree) / double(ref.size());
  double iouSum = 0.0;
  for (int r : c.refLabels) {
    const double iou = uni[r] > 0 ? double(inter[r]) / double(uni[r]) : 0.0;
    rep.perLabelIoU[r] = iou;
    iouSum += iou;
  }
  rep.meanIoU = c.refLabels.empty() ? 0.0 : iouSum / double(c.refLabels.size());

  if (refBoundary.size() == 0) {
    rep.boundaryAccuracy = 1.0;  // no part boundaries: vacuously consistent
  } else {
    std::size_t bAgree = 0;
    for (std::size_t i = 0; i < refBoundary.size(); ++i)
      if (refBoundary.labels[i] == mapped(candBoundary.labels[i])) ++bAgree;
    rep.boundaryAccuracy = double(bAgree) / double(refBoundary.size());
  }
  return rep;
}

AgreementReport evaluateCarriers(const Carrier& ref, const Carrier& cand, int n,
                                 std::uint64_t seed, double bandFrac) {
  const SampledLabels surface = samplePoints(ref, n, seed);
  const SampledLabels boundary = sampleBoundaryPoints(ref, std::max(1, n / 10), bandFrac);
  const SampledLabels candSurface = transferLabelsSurface(surface, cand);
  const SampledLabels candBoundary = transferLabelsSurface(boundary, cand);
  return agreement(surface, candSurface, boundary, candBoundary);
}

AgreementReport selfConsistency(const BRepSolid& solid, const TessellationSpec& specRef,
                                const TessellationSpec& specAlt, double thetaDeg, int tauMin,
                                int n, std::uint64_t seed, double bandFrac) {
  const AdjacencyGraph graph = buildAdjacency(solid);
  const Partition part = extractParts(solid, graph, thetaDeg);
  auto makeCarrier = [&](const TessellationSpec& spec) {
    const TessellationResult tess = tessellateSolid(solid, spec);
    Carrier c = projectLabels(tess.meshes, part);
    c.meta.thetaDeg = thetaDeg;
    c.meta.tess = spec;
    for (const auto& s : tess.skipped) c.meta.skippedFaces.push_back(s.face);
    return stabilize(c, tauMin);
  };
  const Carrier refCarrier = makeCarrier(specRef);
  const Carrier altCarrier = makeCarrier(specAlt);
  return evaluateCarriers(refCarrier, altCarrier, n, seed, bandFrac);
}

}  // namespace steppart
