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
#include <string>

#include <json.hpp>

#include "steppart/carrier.hpp"

namespace steppart {

struct RunConfig {
  double thetaDeg = 8.0;
  int tauMin = 20;
  TessellationSpec tess = TessellationSpec::t0();
  int samples = 100000;
  std::uint64_t seed = 0;
  double boundaryBandFrac = 0.01;
  int workers = 0;  // 0: STEP_PARTS_WORKERS env var, else hardware concurrency
  bool failFast = false;

  /// Model-output embedding. Execution-environment fields (worker count,
  /// paths) are excluded so outputs are byte-identical across schedulers.
  nlohmann::json toJson() const;
};

struct StageTimings {
  double parseS = 0, buildS = 0, partitionS = 0, tessellateS = 0, stabilizeS = 0, serializeS = 0;

  nlohmann::json toJson() const;
};

struct ExtractStats {
  int numParts = 0;
  std::size_t numTriangles = 0;
  std::size_t numFaces = 0;
  std::vector<int> skippedFaces;
  StageTimings timings;
};

/// Raw STEP text -> stabilized labeled carrier (the whole single-model
/// pipeline, pure).
Carrier extractCarrier(const std::string& stepText, const RunConfig& cfg,
                       StageTimings* timings = nullptr);

/// Full extract for one file: writes <stem>.obj and <stem>.labels.json into
/// outDir. Throws steppart::Error with the failing stage.
ExtractStats extractToFiles(const std::string& stepPath, const std::string& outDir,
                            const RunConfig& cfg);

/// Read a whole file (throws stage "io").
std::string readFileText(const std::string& path);

/// Stem of a path: basename minus a trailing .step/.stp (case-insensitive).
std::string modelStem(const std::string& path);

}  // namespace steppart
