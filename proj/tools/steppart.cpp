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

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "steppart/analysis.hpp"
#include "steppart/error.hpp"
#include "steppart/evaluate.hpp"
#include "steppart/partition.hpp"
#include "steppart/pipeline.hpp"
#include "steppart/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace steppart;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitFatal = 2;

void printErrorJson(const std::string& stage, const std::string& message) {
  json err = {{"error", {{"stage", stage}, {"message", message}}}};
  std::cout << err.dump() << "\n";
}

struct CommonFlags {
  RunConfig cfg;
  std::string tessName = "t0";
  double chordTol = -1.0;
  double angleTol = -1.0;

  void attach(CLI::App* app) {
    app->add_option("--theta", cfg.thetaDeg, "Merge threshold in degrees")->capture_default_str();
    app->add_option("--tau-min", cfg.tauMin, "Minimum triangles per carrier part")
        ->capture_default_str();
    app->add_option("--tess", tessName, "Tessellation spec: t0|t1|t2")->capture_default_str();
    app->add_option("--chord-tol", chordTol, "Chordal tolerance (fraction of bbox diagonal)");
    app->add_option("--angle-tol", angleTol, "Angular tolerance in degrees");
    app->add_option("--samples", cfg.samples, "Evaluation sample count")->capture_default_str();
    app->add_option("--seed", cfg.seed, "Sampling seed")->capture_default_str();
    app->add_option("--band", cfg.boundaryBandFrac,
                    "Boundary band width (fraction of bbox diagonal)")
        ->capture_default_str();
  }

  void finalize() {
    cfg.tess = TessellationSpec::byName(tessName);
    if (chordTol > 0.0) {
      cfg.tess.chordTol = chordTol;
      cfg.tess.name = "custom";
    }
    if (angleTol > 0.0) {
      cfg.tess.angleTolDeg = angleTol;
      cfg.tess.name = "custom";
    }
  }
};

int resolveWorkers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STEP_PARTS_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<std::string> stepFilesIn(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".step" || ext == ".stp") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Accept a stem, a .obj path, or a .labels.json path.
std::pair<std::string, std::string> carrierPaths(std::string path) {
  const std::string labelsSuffix = ".labels.json";
  if (path.size() > labelsSuffix.size() &&
      path.compare(path.size() - labelsSuffix.size(), labelsSuffix.size(), labelsSuffix) == 0)
    path.resize(path.size() - labelsSuffix.size());
  else if (path.size() > 4 && path.compare(path.size() - 4, 4, ".obj") == 0)
    path.resize(path.size() - 4);
  return {path + ".obj", path + labelsSuffix};
}

void writeTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path);
  out << content;
}

// ---------------------------------------------------------------------------

int cmdExtract(const std::string& input, const std::string& outDir, CommonFlags& flags,
               const std::string& dumpAdjacency) {
  flags.finalize();
  if (!dumpAdjacency.empty()) {
    const BRepSolid solid = buildBRep(parseStep(readFileText(input)));
    writeTextFile(dumpAdjacency, adjacencyCsv(solid, buildAdjacency(solid, true)));
  }
  const ExtractStats stats = extractToFiles(input, outDir, flags.cfg);
  json out = {{"model", modelStem(input)},
              {"parts", stats.numParts},
              {"triangles", stats.numTriangles},
              {"skipped_faces", stats.skippedFaces}};
  std::cout << out.dump() << "\n";
  std::cerr << "timings: " << stats.timings.toJson().dump() << "\n";
  return kExitOk;
}

int cmdEval(const std::string& refPath, const std::string& candPath, const std::string& outPath,
            CommonFlags& flags) {
  flags.finalize();
  const auto [refObj, refJson] = carrierPaths(refPath);
  const auto [candObj, candJson] = carrierPaths(candPath);
  const Carrier ref = readCarrier(refObj, refJson);
  const Carrier cand = readCarrier(candObj, candJson);
  const AgreementReport rep =
      evaluateCarriers(ref, cand, flags.cfg.samples, flags.cfg.seed, flags.cfg.boundaryBandFrac);
  const std::string text = rep.toJson().dump() + "\n";
  if (outPath.empty())
    std::cout << text;
  else
    writeTextFile(outPath, text);
  return kExitOk;
}

int cmdHist(const std::vector<std::string>& inputs, int bins, double threshold,
            const std::string& outPath) {
  std::vector<AdjacencyGraph> graphs;
  for (const auto& path : inputs) {
    const StepEntityGraph g = parseStep(readFileText(path));
    graphs.push_back(buildAdjacency(buildBRep(g)));
  }
  const DihedralHistogram hist = dihedralHistogram(graphs, bins);
  writeTextFile(outPath, histCsv(hist));
  json summary = {{"total_same_primitive_edges", hist.totalEdges},
                  {"models_without_same_primitive", hist.modelsWithoutSamePrimitive},
                  {"fraction_below_threshold", hist.fractionBelow(threshold)},
                  {"threshold_deg", threshold}};
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

int cmdSweep(const std::vector<std::string>& inputs, const std::vector<double>& thetas,
             const std::string& outPath, CommonFlags& flags) {
  flags.finalize();
  std::string csv = sweepCsvHeader();
  for (const auto& path : inputs) {
    const StepEntityGraph g = parseStep(readFileText(path));
    const BRepSolid solid = buildBRep(g);
    const auto records = thresholdSweep(solid, thetas, flags.cfg.tess, flags.cfg.tauMin);
    for (const auto& rec : records) csv += sweepCsvRow(modelStem(path), rec);
  }
  writeTextFile(outPath, csv);
  return kExitOk;
}

int cmdBatch(const std::string& dir, const std::string& outDir, int workers, bool failFast,
             CommonFlags& flags) {
  flags.finalize();
  const RunConfig cfg = flags.cfg;
  const auto files = stepFilesIn(dir);
  if (files.empty()) {
    printErrorJson("io", "no STEP files in " + dir);
    return kExitFatal;
  }
  fs::create_directories(outDir);

  struct ModelOutcome {
    bool ok = false;
    ExtractStats stats;
    std::string errorStage, errorMessage;
  };
  std::vector<ModelOutcome> outcomes(files.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  const int numWorkers = resolveWorkers(workers);
  auto work = [&]() {
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= files.size()) return;
      try {
        outcomes[i].stats = extractToFiles(files[i], outDir, cfg);
        outcomes[i].ok = true;
      } catch (const Error& e) {
        outcomes[i].errorStage = e.stage();
        outcomes[i].errorMessage = e.what();
        if (failFast) abort.store(true);
      } catch (const std::exception& e) {
        outcomes[i].errorStage = "internal";
        outcomes[i].errorMessage = e.what();
        if (failFast) abort.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < numWorkers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  int failures = 0;
  json models = json::array();
  json timings = json::array();
  std::vector<double> totals;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto& oc = outcomes[i];
    const std::string name = modelStem(files[i]);
    if (oc.ok) {
      models.push_back({{"model", name},
                        {"ok", true},
                        {"parts", oc.stats.numParts},
                        {"triangles", oc.stats.numTriangles},
                        {"skipped_faces", oc.stats.skippedFaces}});
      const auto& tm = oc.stats.timings;
      const double total = tm.parseS + tm.buildS + tm.partitionS + tm.tessellateS +
                           tm.stabilizeS + tm.serializeS;
      totals.push_back(total);
      json t = tm.toJson();
      t["model"] = name;
      t["total_s"] = total;
      timings.push_back(t);
    } else {
      ++failures;
      models.push_back({{"model", name},
                        {"ok", false},
                        {"error", {{"stage", oc.errorStage}, {"message", oc.errorMessage}}}});
    }
  }

  // summary.json is deterministic; wall-clock measurements live in
  // timings.json.
  json summary = {{"config", cfg.toJson()},
                  {"n_models", files.size()},
                  {"n_success", files.size() - failures},
                  {"n_failed", failures},
                  {"models", models}};
  writeTextFile(outDir + "/summary.json", summary.dump(2) + "\n");

  json timingDoc = {{"workers", numWorkers}, {"models", timings}};
  if (!totals.empty()) {
    std::sort(totals.begin(), totals.end());
    auto pct = [&](double p) { return totals[std::min(totals.size() - 1,
                                                      std::size_t(p * totals.size()))]; };
    timingDoc["percentiles_s"] = {{"p50", pct(0.50)}, {"p90", pct(0.90)}, {"p99", pct(0.99)}};
    timingDoc["mean_s"] =
        std::accumulate(totals.begin(), totals.end(), 0.0) / double(totals.size());
  }
  writeTextFile(outDir + "/timings.json", timingDoc.dump(2) + "\n");

  std::cout << summary["n_success"].dump() << " ok, " << failures << " failed\n";
  return failures == 0 ? kExitOk : kExitPartial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STEP B-Rep instance partition toolchain"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonFlags flags;

  auto* extract = app.add_subcommand("extract", "Extract a labeled carrier from a STEP file");
  std::string extractInput, extractOut = ".", extractDump;
  extract->add_option("input", extractInput, "STEP file")->required();
  extract->add_option("--out-dir", extractOut, "Output directory")->capture_default_str();
  extract->add_option("--dump-adjacency", extractDump,
                      "Write the per-edge dihedral diagnostics CSV here");
  flags.attach(extract);

  auto* eval = app.add_subcommand("eval", "Agreement metrics between two labeled carriers");
  std::string refPath, candPath, evalOut;
  eval->add_option("--ref", refPath, "Reference carrier (stem or file)")->required();
  eval->add_option("--cand", candPath, "Candidate carrier (stem or file)")->required();
  eval->add_option("--out", evalOut, "Write the report here instead of stdout");
  flags.attach(eval);

  auto* hist = app.add_subcommand("hist", "Same-primitive dihedral histogram over models");
  std::vector<std::string> histInputs;
  int histBins = 90;
  double histThreshold = 8.0;
  std::string histOut = "hist.csv";
  hist->add_option("inputs", histInputs, "STEP files")->required();
  hist->add_option("--bins", histBins, "Histogram bins over [0,180]")->capture_default_str();
  hist->add_option("--threshold", histThreshold, "Low-angle query threshold (degrees)")
      ->capture_default_str();
  hist->add_option("--out", histOut, "CSV output path")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Partition statistics across merge thresholds");
  std::vector<std::string> sweepInputs;
  std::vector<double> sweepThetas = {4, 6, 8, 10, 12};
  std::string sweepOut = "sweep.csv";
  sweep->add_option("inputs", sweepInputs, "STEP files")->required();
  sweep->add_option("--thetas", sweepThetas, "Threshold list in degrees")->capture_default_str();
  sweep->add_option("--out", sweepOut, "CSV output path")->capture_default_str();
  flags.attach(sweep);

  auto* batch = app.add_subcommand("batch", "Process a directory of STEP files");
  std::string batchDir, batchOut = "out";
  int batchWorkers = 0;
  bool batchFailFast = false;
  batch->add_option("dir", batchDir, "Input directory")->required();
  batch->add_option("--out-dir", batchOut, "Output directory")->capture_default_str();
  batch->add_option("--workers", batchWorkers, "Worker threads (0 = auto)")
      ->capture_default_str();
  batch->add_flag("--fail-fast", batchFailFast, "Abort on the first failure");
  flags.attach(batch);

  CLI11_PARSE(app, argc, argv);

  try {
    if (extract->parsed()) return cmdExtract(extractInput, extractOut, flags, extractDump);
    if (eval->parsed()) return cmdEval(refPath, candPath, evalOut, flags);
    if (hist->parsed()) return cmdHist(histInputs, histBins, histThreshold, histOut);
    if (sweep->parsed()) return cmdSweep(sweepInputs, sweepThetas, sweepOut, flags);
    if (batch->parsed()) return cmdBatch(batchDir, batchOut, batchWorkers, batchFailFast, flags);
  } catch (const Error& e) {
    printErrorJson(e.stage(), e.what());
    return kExitFatal;
  } catch (const std::exception& e) {
    printErrorJson("internal", e.what());
    return kExitFatal;
  }
  return kExitFatal;
}
