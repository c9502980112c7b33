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

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "steppart/stepgen.hpp"

using namespace steppart;

int main(int argc, char** argv) {
  CLI::App app{"Synthetic STEP model generator"};
  std::string outDir = "corpus";
  int count = 100;
  std::uint64_t seed = 1;
  std::string kind = "corpus";
  app.add_option("--out", outDir, "Output directory")->capture_default_str();
  app.add_option("--count", count, "Number of corpus models")->capture_default_str();
  app.add_option("--seed", seed, "Corpus parameter seed")->capture_default_str();
  app.add_option("--kind", kind,
                 "corpus|cube|cylinder|splitcyl|fillet|prism|cone|pcone|sphere|torus|bspline")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(outDir);
  auto writeModel = [&](const std::string& name, const std::string& text) {
    std::ofstream out(outDir + "/" + name + ".step", std::ios::binary);
    out << text;
  };

  if (kind == "corpus") {
    for (const auto& [name, text] : genCorpus(count, seed)) writeModel(name, text);
    std::cout << count << " models written to " << outDir << "\n";
    return 0;
  }
  if (kind == "cube") {
    writeModel("cube", genBox({1, 1, 1}));
  } else if (kind == "cylinder") {
    writeModel("cylinder", genCylinder(1.0, 2.0));
  } else if (kind == "splitcyl") {
    writeModel("split_cylinder", genSplitCylinder(1.0, 2.0));
  } else if (kind == "fillet") {
    writeModel("filleted_block", genFilletedBlock(1.0, 0.5, 1.0, 1.0));
  } else if (kind == "prism") {
    writeModel("prism", genPrism(6, 1.0, 2.0));
  } else if (kind == "cone") {
    writeModel("cone", genCone(1.0, 2.0, 0.3));
  } else if (kind == "pcone") {
    writeModel("pointed_cone", genPointedCone(1.0, 0.4));
  } else if (kind == "sphere") {
    writeModel("sphere", genSphere(1.5));
  } else if (kind == "torus") {
    writeModel("torus", genTorus(2.0, 0.5));
  } else if (kind == "bspline") {
    writeModel("bspline_patch", genBSplinePatch());
  } else {
    std::cerr << "unknown kind " << kind << "\n";
    return 2;
  }
  std::cout << "model written to " << outDir << "\n";
  return 0;
}
