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
#include <utility>
#include <vector>

#include "steppart/geom.hpp"

namespace steppart {

/// Rotation (axis-angle) followed by translation; used to emit rigid-motion
/// variants of the synthetic models.
struct RigidMotion {
  Vec3 axis{0, 0, 1};
  double angleRad = 0.0;
  Vec3 translation{0, 0, 0};

  Vec3 applyDir(const Vec3& d) const;
  Vec3 apply(const Vec3& p) const;
};

/// Synthetic ISO 10303-21 models (Part-21 text). Each is a well-formed
/// exchange file with a MANIFOLD_SOLID_BREP or SHELL_BASED_SURFACE_MODEL.
std::string genBox(const Vec3& dims, const RigidMotion& motion = {});
std::string genCylinder(double radius, double height, const RigidMotion& motion = {});
std::string genSplitCylinder(double radius, double height, const RigidMotion& motion = {});
std::string genFilletedBlock(double topWidth, double filletRadius, double sideHeight,
                             double depth, const RigidMotion& motion = {});
std::string genPrism(int sides, double radius, double height, const RigidMotion& motion = {});
/// Conical frustum: lateral cone face (widening along +z) plus two caps.
std::string genCone(double baseRadius, double height, double semiAngleRad,
                    const RigidMotion& motion = {});
/// Closed torus: a single untrimmed toroidal face.
std::string genTorus(double majorRadius, double minorRadius, const RigidMotion& motion = {});
/// Ball: a single untrimmed spherical face.
std::string genSphere(double radius, const RigidMotion& motion = {});
/// Pointed cone: apex below the base circle at z = -r/tan(semiAngle),
/// base cap on top. The lateral face reaches the apex.
std::string genPointedCone(double baseRadius, double semiAngleRad,
                           const RigidMotion& motion = {});
/// Open shell holding one bicubic B-spline patch bounded by its four
/// boundary curves.
std::string genBSplinePatch(const RigidMotion& motion = {});

/// Deterministic synthetic corpus: (model name, file content) pairs, shape
/// family and parameters drawn from a seeded generator.
std::vector<std::pair<std::string, std::string>> genCorpus(int count, std::uint64_t seed);

}  // namespace steppart
