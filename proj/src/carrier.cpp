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

#include "steppart/carrier.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>

#include "steppart/error.hpp"

namespace steppart {

bool CarrierMeta::operator==(const CarrierMeta& o) const {
  return thetaDeg == o.thetaDeg && tauMin == o.tauMin && tess.name == o.tess.name &&
         tess.chordTol == o.tess.chordTol && tess.angleTolDeg == o.tess.angleTolDeg &&
         numParts == o.numParts && skippedFaces == o.skippedFaces &&
         flaggedIsolates == o.flaggedIsolates && parts == o.parts && version == o.version &&
         runConfig == o.runConfig;
}

Aabb Carrier::bounds() const {
  Aabb box;
  for (const auto& v : vertices) box.expand(v);
  return box;
}

bool Carrier::operator==(const Carrier& o) const {
  return vertices == o.vertices && triangles == o.triangles && partLabel == o.partLabel &&
         sourceFace == o.sourceFace && primitive == o.primitive && meta == o.meta;
}

namespace {

struct VecKey {
  std::uint64_t a, b, c;
  bool operator==(const VecKey& o) const { return a == o.a && b == o.b && c == o.c; }
};

struct VecKeyHash {
  std::size_t operator()(const VecKey& k) const {
    std::uint64_t h = k.a * 0x9e3779b97f4a7c15ULL;
    h ^= k.b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= k.c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

VecKey keyOf(const Vec3& v) {
  VecKey k;
  std::memcpy(&k.a, &v.x, 8);
  std::memcpy(&k.b, &v.y, 8);
  std::memcpy(&k.c, &v.z, 8);
  return k;
}

void recomputePartTotals(Carrier& c) {
  std::map<int, PartTotal> totals;
  for (std::size_t t = 0; t < c.triangles.size(); ++t) {
    PartTotal& pt = totals[c.partLabel[t]];
    if (pt.triangles == 0) pt.primitive = c.primitive[t];  // first (canonical) triangle
    pt.label = c.partLabel[t];
    pt.triangles += 1;
    pt.area += triangleArea(c.vertices[c.triangles[t][0]], c.vertices[c.triangles[t][1]],
                            c.vertices[c.triangles[t][2]]);
  }
  c.meta.parts.clear();
  for (const auto& [label, pt] : totals) c.meta.parts.push_back(pt);
  c.meta.numParts = static_cast<int>(totals.size());
}

// Rebuild the carrier in canonical triangle order (label, source face,
// existing order) with vertices renumbered in first-use order.
Carrier canonicalize(const Carrier& in) {
  std::vector<int> order(in.triangles.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (in.partLabel[a] != in.partLabel[b]) return in.partLabel[a] < in.partLabel[b];
    return in.sourceFace[a] < in.sourceFace[b];
  });
  Carrier out;
  out.meta = in.meta;
  out.triangles.reserve(in.triangles.size());
  std::vector<int> remap(in.vertices.size(), -1);
  for (int t : order) {
    std::array<int, 3> tri;
    for (int k = 0; k < 3; ++k) {
      const int v = in.triangles[t][k];
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(in.vertices[v]);
      }
      tri[k] = remap[v];
    }
    out.triangles.push_back(tri);
    out.partLabel.push_back(in.partLabel[t]);
    out.sourceFace.push_back(in.sourceFace[t]);
    out.primitive.push_back(in.primitive[t]);
  }
  recomputePartTotals(out);
  return out;
}

}  // namespace

Carrier projectLabels(const std::vector<FaceMesh>& meshes, const Partition& partition) {
  Carrier c;
  std::unordered_map<VecKey, int, VecKeyHash> weld;
  for (const auto& mesh : meshes) {
    if (mesh.sourceFace < 0 ||
        mesh.sourceFace >= static_cast<int>(partition.assignment.size()) ||
        partition.assignment[mesh.sourceFace] <= 0)
      throw Error("carrier",
                  "unknown-face-id: face " + std::to_string(mesh.sourceFace) +
                      " is not in the partition");
    const int label = partition.assignment[mesh.sourceFace];
    const PrimitiveType prim = partition.parts[label - 1].type;
    std::vector<int> remap(mesh.vertices.size());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      auto [it, inserted] =
          weld.emplace(keyOf(mesh.vertices[v]), static_cast<int>(c.vertices.size()));
      if (inserted) c.vertices.push_back(mesh.vertices[v]);
      remap[v] = it->second;
    }
    for (const auto& tri : mesh.triangles) {
      c.triangles.push_back({remap[tri[0]], remap[tri[1]], remap[tri[2]]});
      c.partLabel.push_back(label);
      c.sourceFace.push_back(mesh.sourceFace);
      c.primitive.push_back(prim);
    }
  }
  return canonicalize(c);
}

std::vector<CarrierEdge> carrierEdges(const Carrier& carrier) {
  std::map<std::pair<int, int>, std::vector<int>> edges;
  for (std::size_t t = 0; t < carrier.triangles.size(); ++t) {
    const auto& tri = carrier.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edges[{a, b}].push_back(static_cast<int>(t));
    }
  }
  std::vector<CarrierEdge> out;
  out.reserve(edges.size());
  for (auto& [key, tris] : edges) out.push_back({key.first, key.second, std::move(tris)});
  return out;
}

namespace {

struct Component {
  int id = 0;
  int label = 0;
  std::vector<int> tris;
  int minTri = 0;
};

std::vector<Component> labelComponents(const Carrier& c, const std::vector<CarrierEdge>& edges) {
  const int n = static_cast<int>(c.triangles.size());
  std::vector<std::vector<int>> sameLabelNb(n);
  for (const auto& e : edges)
    for (std::size_t i = 0; i < e.tris.size(); ++i)
      for (std::size_t j = i + 1; j < e.tris.size(); ++j) {
        if (c.partLabel[e.tris[i]] != c.partLabel[e.tris[j]]) continue;
        sameLabelNb[e.tris[i]].push_back(e.tris[j]);
        sameLabelNb[e.tris[j]].push_back(e.tris[i]);
      }
  std::vector<Component> comps;
  std::vector<int> compOf(n, -1);
  for (int seed = 0; seed < n; ++seed) {
    if (compOf[seed] >= 0) continue;
    Component comp;
    comp.id = static_cast<int>(comps.size());
    comp.label = c.partLabel[seed];
    comp.minTri = seed;
    std::vector<int> stack{seed};
    compOf[seed] = comp.id;
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      comp.tris.push_back(t);
      for (int nb : sameLabelNb[t])
        if (compOf[nb] < 0) {
          compOf[nb] = comp.id;
          stack.push_back(nb);
        }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace

Carrier stabilize(const Carrier& carrier, int tauMin) {
  Carrier c = carrier;
  c.meta.tauMin = tauMin;
  c.meta.flaggedIsolates.clear();

  if (tauMin > 0) {
    while (true) {
      const auto edges = carrierEdges(c);
      auto comps = labelComponents(c, edges);

      // Component id per triangle, for boundary bookkeeping.
      std::vector<int> compOf(c.triangles.size(), -1);
      for (const auto& comp : comps)
        for (int t : comp.tris) compOf[t] = comp.id;

      // Absorption targets must be established parts: a label whose own
      // total is below tau_min cannot swallow its neighbors (otherwise a
      // coarsely tessellated model with only small parts would collapse
      // into a single label).
      std::map<int, int> labelTotal;
      for (int l : c.partLabel) ++labelTotal[l];

      // Shared boundary length of each small component per qualifying
      // neighbor label.
      std::vector<std::map<int, double>> borders(comps.size());
      std::vector<bool> small(comps.size());
      for (auto& comp : comps)
        small[comp.id] = static_cast<int>(comp.tris.size()) < tauMin;
      for (const auto& e : edges) {
        if (e.tris.size() < 2) continue;
        const double len = distance(c.vertices[e.v0], c.vertices[e.v1]);
        for (std::size_t i = 0; i < e.tris.size(); ++i)
          for (std::size_t j = i + 1; j < e.tris.size(); ++j) {
            const int la = c.partLabel[e.tris[i]], lb = c.partLabel[e.tris[j]];
            if (la == lb) continue;
            if (small[compOf[e.tris[i]]] && labelTotal[lb] >= tauMin)
              borders[compOf[e.tris[i]]][lb] += len;
            if (small[compOf[e.tris[j]]] && labelTotal[la] >= tauMin)
              borders[compOf[e.tris[j]]][la] += len;
          }
      }

      // Absorb the smallest absorbable component (ties to the earliest).
      int pick = -1;
      for (const auto& comp : comps) {
        if (!small[comp.id] || borders[comp.id].empty()) continue;
        if (pick < 0 || comp.tris.size() < comps[pick].tris.size() ||
            (comp.tris.size() == comps[pick].tris.size() && comp.minTri < comps[pick].minTri))
          pick = comp.id;
      }
      if (pick < 0) break;
      int bestLabel = -1;
      double bestLen = -1.0;
      for (const auto& [label, len] : borders[pick]) {
        if (len > bestLen || (len == bestLen && label < bestLabel)) {
          bestLen = len;
          bestLabel = label;
        }
      }
      for (int t : comps[pick].tris) c.partLabel[t] = bestLabel;
    }

    // Remaining sub-threshold components have no labeled neighbor: keep and
    // flag them (by final, compacted label below).
  }

  // Compact labels to 1..k' preserving ascending old-label order.
  std::map<int, int> compact;
  for (int l : c.partLabel) compact.emplace(l, 0);
  int next = 1;
  for (auto& [oldLabel, newLabel] : compact) newLabel = next++;
  for (auto& l : c.partLabel) l = compact[l];

  if (tauMin > 0) {
    const auto edges = carrierEdges(c);
    for (const auto& comp : labelComponents(c, edges))
      if (static_cast<int>(comp.tris.size()) < tauMin)
        c.meta.flaggedIsolates.push_back(c.partLabel[comp.minTri]);
    std::sort(c.meta.flaggedIsolates.begin(), c.meta.flaggedIsolates.end());
    c.meta.flaggedIsolates.erase(
        std::unique(c.meta.flaggedIsolates.begin(), c.meta.flaggedIsolates.end()),
        c.meta.flaggedIsolates.end());
  }

  return canonicalize(c);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

void appendDouble(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

nlohmann::json tessJson(const TessellationSpec& tess) {
  return {{"name", tess.name}, {"chord_tol", tess.chordTol}, {"angle_tol", tess.angleTolDeg}};
}

TessellationSpec tessFromJson(const nlohmann::json& j) {
  TessellationSpec t;
  t.name = j.at("name").get<std::string>();
  t.chordTol = j.at("chord_tol").get<double>();
  t.angleTolDeg = j.at("angle_tol").get<double>();
  return t;
}

PrimitiveType primitiveFromName(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(PrimitiveType::Other); ++i)
    if (name == primitiveName(static_cast<PrimitiveType>(i)))
      return static_cast<PrimitiveType>(i);
  throw Error("io", "unknown primitive name '" + name + "'");
}

}  // namespace

void writeCarrier(const Carrier& carrier, const std::string& objPath,
                  const std::string& jsonPath) {
  std::string obj;
  obj.reserve(carrier.vertices.size() * 40 + carrier.triangles.size() * 24);
  for (const auto& v : carrier.vertices) {
    obj += "v ";
    appendDouble(obj, v.x);
    obj += ' ';
    appendDouble(obj, v.y);
    obj += ' ';
    appendDouble(obj, v.z);
    obj += '\n';
  }
  int currentLabel = std::numeric_limits<int>::min();
  for (std::size_t t = 0; t < carrier.triangles.size(); ++t) {
    if (carrier.partLabel[t] != currentLabel) {
      currentLabel = carrier.partLabel[t];
      obj += "g part_" + std::to_string(currentLabel) + "\n";
    }
    const auto& tri = carrier.triangles[t];
    obj += "f " + std::to_string(tri[0] + 1) + " " + std::to_string(tri[1] + 1) + " " +
           std::to_string(tri[2] + 1) + "\n";
  }
  std::ofstream objOut(objPath, std::ios::binary);
  if (!objOut) throw Error("io", "cannot write " + objPath);
  objOut << obj;
  objOut.close();
  if (!objOut) throw Error("io", "failed writing " + objPath);

  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : carrier.meta.parts)
    parts.push_back({{"label", p.label},
                     {"triangles", p.triangles},
                     {"area", p.area},
                     {"primitive", primitiveName(p.primitive)}});
  nlohmann::json j = {
      {"schema", 1},
      {"meta",
       {{"theta_deg", carrier.meta.thetaDeg},
        {"tau_min", carrier.meta.tauMin},
        {"tess", tessJson(carrier.meta.tess)},
        {"num_parts", carrier.meta.numParts},
        {"skipped_faces", carrier.meta.skippedFaces},
        {"flagged_isolates", carrier.meta.flaggedIsolates},
        {"parts", parts},
        {"version", carrier.meta.version},
        {"run_config", carrier.meta.runConfig},
        {"extensions", nlohmann::json::object()}}},
      {"part_label", carrier.partLabel},
      {"source_face", carrier.sourceFace},
  };
  std::vector<std::string> prim;
  prim.reserve(carrier.primitive.size());
  for (auto p : carrier.primitive) prim.push_back(primitiveName(p));
  j["primitive"] = prim;

  std::ofstream jsonOut(jsonPath, std::ios::binary);
  if (!jsonOut) throw Error("io", "cannot write " + jsonPath);
  jsonOut << j.dump() << "\n";
  jsonOut.close();
  if (!jsonOut) throw Error("io", "failed writing " + jsonPath);
}

Carrier readCarrier(const std::string& objPath, const std::string& jsonPath) {
  std::ifstream objIn(objPath);
  if (!objIn) throw Error("io", "cannot read " + objPath);
  Carrier c;
  std::string line;
  while (std::getline(objIn, line)) {
    if (line.rfind("v ", 0) == 0) {
      Vec3 v;
      if (std::sscanf(line.c_str() + 2, "%lf %lf %lf", &v.x, &v.y, &v.z) != 3)
        throw Error("io", "malformed OBJ vertex line in " + objPath);
      c.vertices.push_back(v);
    } else if (line.rfind("f ", 0) == 0) {
      int a, b, d;
      if (std::sscanf(line.c_str() + 2, "%d %d %d", &a, &b, &d) != 3)
        throw Error("io", "malformed OBJ face line in " + objPath);
      c.triangles.push_back({a - 1, b - 1, d - 1});
    }
  }

  nlohmann::json j;
  {
    std::ifstream jsonIn(jsonPath);
    if (!jsonIn) throw Error("io", "cannot read " + jsonPath);
    try {
      jsonIn >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error("io", "malformed label sidecar " + jsonPath + ": " + e.what());
    }
  }
  if (!j.contains("schema") || j["schema"].get<int>() != 1)
    throw Error("io", "schema-version mismatch in " + jsonPath);
  c.partLabel = j.at("part_label").get<std::vector<int>>();
  c.sourceFace = j.at("source_face").get<std::vector<int>>();
  for (const auto& name : j.at("primitive"))
    c.primitive.push_back(primitiveFromName(name.get<std::string>()));
  if (c.partLabel.size() != c.triangles.size() || c.sourceFace.size() != c.triangles.size() ||
      c.primitive.size() != c.triangles.size())
    throw Error("io", "label arrays do not match triangle count in " + jsonPath);

  const auto& meta = j.at("meta");
  c.meta.thetaDeg = meta.at("theta_deg").get<double>();
  c.meta.tauMin = meta.at("tau_min").get<int>();
  c.meta.tess = tessFromJson(meta.at("tess"));
  c.meta.numParts = meta.at("num_parts").get<int>();
  c.meta.skippedFaces = meta.at("skipped_faces").get<std::vector<int>>();
  c.meta.flaggedIsolates = meta.value("flagged_isolates", std::vector<int>{});
  c.meta.version = meta.value("version", std::string{});
  c.meta.runConfig = meta.value("run_config", nlohmann::json::object());
  for (const auto& p : meta.value("parts", nlohmann::json::array())) {
    PartTotal pt;
    pt.label = p.at("label").get<int>();
    pt.triangles = p.at("triangles").get<int>();
    pt.area = p.at("area").get<double>();
    pt.primitive = primitiveFromName(p.at("primitive").get<std::string>());
    c.meta.parts.push_back(pt);
  }
  return c;
}

}  // namespace steppart
