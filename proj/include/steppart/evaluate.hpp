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
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "steppart/carrier.hpp"

namespace steppart {

struct SampledLabels {
  std::vector<Vec3> points;
  std::vector<int> labels;
  std::string source;

  std::size_t size() const { return points.size(); }
};

struct AgreementReport {
  double accuracy = 0.0;
  double meanIoU = 0.0;
  double boundaryAccuracy = 0.0;
  std::vector<std::pair<int, int>> matched;  // (ref label, cand label), overlap > 0
  std::vector<int> unmatchedRef;
  std::vector<int> unmatchedCand;
  std::map<int, double> perLabelIoU;  // keyed by ref label

  nlohmann::json toJson() const;
};

/// Area-weighted uniform surface samples with the originating triangle's
/// part label. Deterministic: mt19937_64 seeded with `seed`, three draws per
/// point (triangle pick, two barycentric coordinates), uniform doubles via
/// (x >> 11) * 2^-53.
SampledLabels samplePoints(const Carrier& carrier, int n, std::uint64_t seed);

/// Points in the boundary band: stratified samples on every part-boundary
/// edge (count proportional to edge length), offset by half the band width
/// into each adjacent part, labeled by that part. Deterministic, RNG-free.
SampledLabels sampleBoundaryPoints(const Carrier& carrier, int n, double bandFrac);

/// Per-vertex label: the label of the lowest-index incident triangle.
std::vector<int> vertexLabels(const Carrier& carrier);

/// Nearest-vertex label transfer (exact Euclidean nearest neighbor over the
/// target's vertices, ties to the smaller vertex index).
SampledLabels transferLabels(const SampledLabels& points, const Carrier& target);

/// Nearest-surface label transfer: each point takes the label of the target
/// triangle closest in exact point-to-triangle distance (ties to the smaller
/// triangle index). This is what carrier-vs-carrier evaluation uses: on
/// identical geometry it reproduces labels exactly, which vertex lookup
/// cannot do at vertices shared between parts.
SampledLabels transferLabelsSurface(const SampledLabels& points, const Carrier& target);

/// Maximum-weight matching (Hungarian) over the ref/cand confusion matrix.
/// Returns pairs with positive overlap.
std::vector<std::pair<int, int>> alignLabels(const SampledLabels& ref,
                                             const SampledLabels& cand);

/// Exact O(n^3) assignment: maximum total weight over row->column matchings.
std::int64_t hungarianObjective(const std::vector<std::vector<std::int64_t>>& weights);

/// Metrics after optimal alignment. Accuracy and mean IoU come from the main
/// sample sets; boundary accuracy from the dedicated boundary sets using the
/// same label mapping (1.0 when the boundary set is empty: no boundary, no
/// disagreement).
AgreementReport agreement(const SampledLabels& ref, const SampledLabels& cand,
                          const SampledLabels& refBoundary, const SampledLabels& candBoundary);

/// Full protocol between two carriers: sample on ref (surface + boundary),
/// transfer candidate labels by nearest vertex, align, report.
AgreementReport evaluateCarriers(const Carrier& ref, const Carrier& cand, int n,
                                 std::uint64_t seed, double bandFrac);

/// Tessellation self-consistency: same partition and post-processing at both
/// specs, sampled on the reference tessellation, transferred from the
/// alternative one.
AgreementReport selfConsistency(const BRepSolid& solid, const TessellationSpec& specRef,
                                const TessellationSpec& specAlt, double thetaDeg, int tauMin,
                                int n, std::uint64_t seed, double bandFrac);

}  // namespace steppart
