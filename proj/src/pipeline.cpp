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

#include "steppart/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>

#include "steppart/error.hpp"
#include "steppart/partition.hpp"
#include "steppart/version.hpp"

namespace steppart {

nlohmann::json RunConfig::toJson() const {
  return {{"theta_deg", thetaDeg},
          {"tau_min", tauMin},
          {"tess",
           {{"name", tess.name}, {"chord_tol", tess.chordTol}, {"angle_tol", tess.angleTolDeg}}},
          {"samples", samples},
          {"seed", seed},
          {"boundary_band", boundaryBandFrac},
          {"version", kVersion}};
}

nlohmann::json StageTimings::toJson() const {
  return {{"parse_s", parseS},       {"build_s", buildS},         {"partition_s", partitionS},
          {"tessellate_s", tessellateS}, {"stabilize_s", stabilizeS}, {"serialize_s", serializeS}};
}

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

Carrier extractCarrier(const std::string& stepText, const RunConfig& cfg,
                       StageTimings* timings) {
  StageTimings local;
  StageTimings& tm = timings ? *timings : local;
  Stopwatch watch;

  const StepEntityGraph graph = parseStep(stepText);
  tm.parseS = watch.lap();

  const BRepSolid solid = buildBRep(graph);
  tm.buildS = watch.lap();

  const AdjacencyGraph adjacency = buildAdjacency(solid);
  const Partition partition = extractParts(solid, adjacency, cfg.thetaDeg);
  tm.partitionS = watch.lap();

  const TessellationResult tess = tessellateSolid(solid, cfg.tess);
  tm.tessellateS = watch.lap();

  Carrier carrier = projectLabels(tess.meshes, partition);
  carrier.meta.thetaDeg = cfg.thetaDeg;
  carrier.meta.tess = cfg.tess;
  carrier.meta.version = kVersion;
  carrier.meta.runConfig = cfg.toJson();
  for (const auto& s : tess.skipped) carrier.meta.skippedFaces.push_back(s.face);
  carrier = stabilize(carrier, cfg.tauMin);
  tm.stabilizeS = watch.lap();
  return carrier;
}

ExtractStats extractToFiles(const std::string& stepPath, const std::string& outDir,
                            const RunConfig& cfg) {
  const std::string text = readFileText(stepPath);
  ExtractStats stats;
  Carrier carrier = extractCarrier(text, cfg, &stats.timings);

  std::filesystem::create_directories(outDir);
  const std::string stem = modelStem(stepPath);
  Stopwatch watch;
  writeCarrier(carrier, outDir + "/" + stem + ".obj", outDir + "/" + stem + ".labels.json");
  stats.timings.serializeS = watch.lap();

  stats.numParts = carrier.meta.numParts;
  stats.numTriangles = carrier.numTriangles();
  stats.skippedFaces = carrier.meta.skippedFaces;
  std::vector<int> faces(carrier.sourceFace.begin(), carrier.sourceFace.end());
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  stats.numFaces = faces.size() + carrier.meta.skippedFaces.size();
  return stats;
}

std::string readFileText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

std::string modelStem(const std::string& path) {
  std::string stem = std::filesystem::path(path).filename().string();
  for (const char* ext : {".step", ".stp", ".STEP", ".STP"}) {
    const std::size_t len = std::string(ext).size();
    if (stem.size() > len && stem.compare(stem.size() - len, len, ext) == 0) {
      stem.resize(stem.size() - len);
      break;
    }
  }
  return stem;
}

}  // namespace steppart
