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

#include <array>
#include <string>
#include <vector>

#include "steppart/carrier.hpp"
#include "steppart/partition.hpp"

namespace steppart {

struct DihedralHistogram {
  std::vector<double> binEdges;       // bins+1 edges spanning [0, 180]
  std::vector<std::int64_t> counts;   // same-primitive adjacencies only
  std::int64_t totalEdges = 0;
  int modelsWithoutSamePrimitive = 0;
  std::vector<double> sortedPhi;      // for exact low-angle fraction queries

  /// Fraction of same-primitive adjacencies with phi <= thresholdDeg.
  double fractionBelow(double thresholdDeg) const;
};

/// Histogram of dihedral angles over same-primitive face adjacencies,
/// default 90 bins of 2 degrees.
DihedralHistogram dihedralHistogram(const std::vector<AdjacencyGraph>& graphs, int bins = 90);

std::string histCsv(const DihedralHistogram& hist);

constexpr int kNumPrimitiveTypes = static_cast<int>(PrimitiveType::Other) + 1;

struct SweepRecord {
  double thetaDeg = 0.0;
  int partCount = 0;          // P: labels on the stabilized carrier
  double entropy = 0.0;       // H = -sum a_i log2 a_i over part area shares
  double boundarySharpness = 0.0;  // length-weighted mean dihedral across part boundaries, deg
  double intraDeviation = 0.0;     // mean angular deviation from part mean normals, deg
  std::array<int, kNumPrimitiveTypes> primitiveCounts{};  // parts per primitive type

  bool operator==(const SweepRecord&) const = default;
};

/// Carrier-level statistics used by the sweep (exposed for tests).
double carrierEntropy(const Carrier& carrier);
double carrierBoundarySharpness(const Carrier& carrier);
double carrierIntraDeviation(const Carrier& carrier);

/// Full pipeline per theta value on one solid; metrics on the stabilized
/// carrier.
std::vector<SweepRecord> thresholdSweep(const BRepSolid& solid,
                                        const std::vector<double>& thetasDeg,
                                        const TessellationSpec& spec, int tauMin);

std::string sweepCsvHeader();
std::string sweepCsvRow(const std::string& modelId, const SweepRecord& rec);

}  // namespace steppart
