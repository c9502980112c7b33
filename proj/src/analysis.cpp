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

#include "steppart/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "steppart/error.hpp"

namespace steppart {

double DihedralHistogram::fractionBelow(double thresholdDeg) const {
  if (sortedPhi.empty()) return 0.0;
  const auto it = std::upper_bound(sortedPhi.begin(), sortedPhi.end(), thresholdDeg);
  return double(it - sortedPhi.begin()) / double(sortedPhi.size());
}

DihedralHistogram dihedralHistogram(const std::vector<AdjacencyGraph>& graphs, int bins) {
  if (bins < 2) throw Error("eval", "histogram needs at least 2 bins");
  DihedralHistogram h;
  h.binEdges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) h.binEdges[i] = 180.0 * i / bins;
  h.counts.assign(bins, 0);
  for (const auto& g : graphs) {
    bool any = false;
    for (const auto& e : g.edges) {
      if (!e.samePrimitive) continue;
      any = true;
      ++h.totalEdges;
      h.sortedPhi.push_back(e.phiDeg);
      int bin = static_cast<int>(std::clamp(e.phiDeg, 0.0, 180.0) / 180.0 * bins);
      bin = std::min(bin, bins - 1);
      ++h.counts[bin];
    }
    if (!any) ++h.modelsWithoutSamePrimitive;
  }
  std::sort(h.sortedPhi.begin(), h.sortedPhi.end());
  return h;
}

std::string histCsv(const DihedralHistogram& hist) {
  std::string out = "bin_lo,bin_hi,count\n";
  char buf[96];
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%lld\n", hist.binEdges[i], hist.binEdges[i + 1],
                  static_cast<long long>(hist.counts[i]));
    out += buf;
  }
  return out;
}

double carrierEntropy(const Carrier& carrier) {
  std::map<int, double> areas;
  double total = 0.0;
  for (std::size_t t = 0; t < carrier.triangles.size(); ++t) {
    const auto& tri = carrier.triangles[t];
    const double a = triangleArea(carrier.vertices[tri[0]], carrier.vertices[tri[1]],
                                  carrier.vertices[tri[2]]);
    areas[carrier.partLabel[t]] += a;
    total += a;
  }
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (const auto& [label, a] : areas) {
    const double share = a / total;
    if (share > 0.0) h -= share * std::log2(share);
  }
  return std::max(h, 0.0);
}

namespace {

Vec3 triNormal(const Carrier& c, int t) {
  const auto& tri = c.triangles[t];
  return triangleNormal(c.vertices[tri[0]], c.vertices[tri[1]], c.vertices[tri[2]]);
}

}  // namespace

double carrierBoundarySharpness(const Carrier& carrier) {
  double weighted = 0.0, totalLen = 0.0;
  for (const auto& e : carrierEdges(carrier)) {
    if (e.tris.size() < 2) continue;
    int triA = e.tris[0], triB = -1;
    for (int t : e.tris)
      if (carrier.partLabel[t] != carrier.partLabel[triA]) {
        triB = t;
        break;
      }
    if (triB < 0) continue;
    const double len = distance(carrier.vertices[e.v0], carrier.vertices[e.v1]);
    const double phi = deg(angleBetween(triNormal(carrier, triA), triNormal(carrier, triB)));
    weighted += len * phi;
    totalLen += len;
  }
  return totalLen > 0.0 ? weighted / totalLen : 0.0;
}

double carrierIntraDeviation(const Carrier& carrier) {
  struct Acc {
    Vec3 normalSum{0, 0, 0};
    double area = 0.0;
    std::vector<int> tris;
  };
  std::map<int, Acc> parts;
  for (std::size_t t = 0; t < carrier.triangles.size(); ++t) {
    const auto& tri = carrier.triangles[t];
    const double a = triangleArea(carrier.vertices[tri[0]], carrier.vertices[tri[1]],
                                  carrier.vertices[tri[2]]);
    Acc& acc = parts[carrier.partLabel[t]];
    acc.normalSum += triNormal(carrier, static_cast<int>(t)) * a;
    acc.area += a;
    acc.tris.push_back(static_cast<int>(t));
  }
  if (parts.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [label, acc] : parts) {
    const double meanLen = norm(acc.normalSum) / std::max(acc.area, 1e-300);
    if (meanLen < 1e-9) {
      // Normals so spread that the mean vanishes (e.g. a full cylinder):
      // isotropic limit.
      sum += 90.0;
      continue;
    }
    const Vec3 mean = normalize(acc.normalSum);
    double dev = 0.0;
    for (int t : acc.tris) {
      const auto& tri = carrier.triangles[t];
      const double a = triangleArea(carrier.vertices[tri[0]], carrier.vertices[tri[1]],
                                    carrier.vertices[tri[2]]);
      dev += a * deg(angleBetween(triNormal(carrier, t), mean));
    }
    sum += dev / std::max(acc.area, 1e-300);
  }
  return sum / double(parts.size());
}

std::vector<SweepRecord> thresholdSweep(const BRepSolid& solid,
                                        const std::vector<double>& thetasDeg,
                                        const TessellationSpec& spec, int tauMin) {
  if (thetasDeg.empty()) throw Error("eval", "empty theta list");
  const AdjacencyGraph graph = buildAdjacency(solid);
  const TessellationResult tess = tessellateSolid(solid, spec);
  std::vector<SweepRecord> out;
  for (double theta : thetasDeg) {
    const Partition part = extractParts(solid, graph, theta);
    Carrier carrier = projectLabels(tess.meshes, part);
    carrier.meta.thetaDeg = theta;
    carrier.meta.tess = spec;
    carrier = stabilize(carrier, tauMin);

    SweepRecord rec;
    rec.thetaDeg = theta;
    rec.partCount = carrier.meta.numParts;
    rec.entropy = carrierEntropy(carrier);
    rec.boundarySharpness = carrierBoundarySharpness(carrier);
    rec.intraDeviation = carrierIntraDeviation(carrier);
    for (const auto& p : carrier.meta.parts)
      ++rec.primitiveCounts[static_cast<int>(p.primitive)];
    out.push_back(rec);
  }
  return out;
}

std::string sweepCsvHeader() {
  std::string out = "model_id,theta,P,H,S_boundary,D_intra";
  for (int i = 0; i < kNumPrimitiveTypes; ++i)
    out += std::string(",n_") + primitiveName(static_cast<PrimitiveType>(i));
  return out + "\n";
}

std::string sweepCsvRow(const std::string& modelId, const SweepRecord& rec) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%.9g,%d,%.9g,%.9g,%.9g", modelId.c_str(), rec.thetaDeg,
                rec.partCount, rec.entropy, rec.boundarySharpness, rec.intraDeviation);
  std::string out = buf;
  for (int i = 0; i < kNumPrimitiveTypes; ++i) out += "," + std::to_string(rec.primitiveCounts[i]);
  return out + "\n";
}

}  // namespace steppart
