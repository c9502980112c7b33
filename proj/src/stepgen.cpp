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

#include "steppart/stepgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "steppart/step21.hpp"

namespace steppart {

Vec3 RigidMotion::applyDir(const Vec3& d) const {
  const Vec3 w = normalize(axis);
  const double c = std::cos(angleRad), s = std::sin(angleRad);
  return d * c + cross(w, d) * s + w * (dot(w, d) * (1.0 - c));
}

Vec3 RigidMotion::apply(const Vec3& p) const { return applyDir(p) + translation; }

namespace {

// Incrementally builds a Part-21 entity graph and serializes it.
class GraphWriter {
 public:
  explicit GraphWriter(const RigidMotion& motion, const std::string& name) : motion_(motion) {
    SimpleRecord desc;
    desc.keyword = "FILE_DESCRIPTION";
    PValue descList;
    descList.kind = PValue::Kind::List;
    PValue descStr;
    descStr.kind = PValue::Kind::String;
    descStr.text = "synthetic model";
    descList.list.push_back(descStr);
    desc.args = {descList, str("2;1")};
    SimpleRecord fname;
    fname.keyword = "FILE_NAME";
    fname.args = {str(name), str(""), emptyList(), emptyList(), str("steppart"), str(""), str("")};
    SimpleRecord schema;
    schema.keyword = "FILE_SCHEMA";
    PValue schemaList;
    schemaList.kind = PValue::Kind::List;
    schemaList.list.push_back(str("AUTOMOTIVE_DESIGN { 1 0 10303 214 1 1 1 1 }"));
    schema.args = {schemaList};
    graph_.header.records = {desc, fname, schema};
  }

  std::int64_t add(const std::string& keyword, std::vector<PValue> args) {
    const std::int64_t id = nextId_++;
    EntityRecord e;
    e.id = id;
    SimpleRecord rec;
    rec.keyword = keyword;
    rec.args = std::move(args);
    e.records.push_back(std::move(rec));
    graph_.entities.emplace(id, std::move(e));
    return id;
  }

  static PValue str(const std::string& s) {
    PValue v;
    v.kind = PValue::Kind::String;
    v.text = s;
    return v;
  }
  static PValue en(const char* token) {
    PValue v;
    v.kind = PValue::Kind::Enum;
    v.text = token;
    return v;
  }
  static PValue boolean(bool b) { return en(b ? "T" : "F"); }
  static PValue emptyList() {
    PValue v;
    v.kind = PValue::Kind::List;
    return v;
  }
  static PValue refList(const std::vector<std::int64_t>& ids) {
    PValue v;
    v.kind = PValue::Kind::List;
    for (auto id : ids) v.list.push_back(PValue::makeRef(id));
    return v;
  }

  std::int64_t point(const Vec3& p) {
    const Vec3 q = motion_.apply(p);
    PValue coords;
    coords.kind = PValue::Kind::List;
    coords.list = {PValue::makeReal(q.x), PValue::makeReal(q.y), PValue::makeReal(q.z)};
    return add("CARTESIAN_POINT", {str(""), coords});
  }

  std::int64_t direction(const Vec3& d) {
    const Vec3 q = motion_.applyDir(d);
    PValue coords;
    coords.kind = PValue::Kind::List;
    coords.list = {PValue::makeReal(q.x), PValue::makeReal(q.y), PValue::makeReal(q.z)};
    return add("DIRECTION", {str(""), coords});
  }

  std::int64_t axis2(const Vec3& origin, const Vec3& z, const Vec3& x) {
    return add("AXIS2_PLACEMENT_3D", {str(""), PValue::makeRef(point(origin)),
                                      PValue::makeRef(direction(z)),
                                      PValue::makeRef(direction(x))});
  }

  std::int64_t vertex(const Vec3& p) {
    return add("VERTEX_POINT", {str(""), PValue::makeRef(point(p))});
  }

  std::int64_t line(const Vec3& origin, const Vec3& dir) {
    const std::int64_t vec =
        add("VECTOR", {str(""), PValue::makeRef(direction(dir)), PValue::makeReal(1.0)});
    return add("LINE", {str(""), PValue::makeRef(point(origin)), PValue::makeRef(vec)});
  }

  std::int64_t circle(const Vec3& center, const Vec3& z, const Vec3& x, double r) {
    return add("CIRCLE", {str(""), PValue::makeRef(axis2(center, z, x)), PValue::makeReal(r)});
  }

  std::int64_t edge(std::int64_t v1, std::int64_t v2, std::int64_t curve, bool sense = true) {
    return add("EDGE_CURVE", {str(""), PValue::makeRef(v1), PValue::makeRef(v2),
                              PValue::makeRef(curve), boolean(sense)});
  }

  std::int64_t orientedEdge(std::int64_t e, bool orientation) {
    return add("ORIENTED_EDGE", {str(""), PValue::derived(), PValue::derived(),
                                 PValue::makeRef(e), boolean(orientation)});
  }

  // Loop of (edge id, orientation) pairs; outer selects the bound entity.
  std::int64_t bound(const std::vector<std::pair<std::int64_t, bool>>& edges, bool outer) {
    std::vector<std::int64_t> oriented;
    for (const auto& [e, o] : edges) oriented.push_back(orientedEdge(e, o));
    const std::int64_t loop = add("EDGE_LOOP", {str(""), refList(oriented)});
    return add(outer ? "FACE_OUTER_BOUND" : "FACE_BOUND",
               {str(""), PValue::makeRef(loop), boolean(true)});
  }

  std::int64_t face(const std::vector<std::int64_t>& bounds, std::int64_t surface,
                    bool sameSense) {
    return add("ADVANCED_FACE",
               {str(""), refList(bounds), PValue::makeRef(surface), boolean(sameSense)});
  }

  std::int64_t plane(const Vec3& origin, const Vec3& z, const Vec3& x) {
    return add("PLANE", {str(""), PValue::makeRef(axis2(origin, z, x))});
  }

  std::int64_t cylinder(const Vec3& origin, const Vec3& z, const Vec3& x, double r) {
    return add("CYLINDRICAL_SURFACE",
               {str(""), PValue::makeRef(axis2(origin, z, x)), PValue::makeReal(r)});
  }

  void closedSolid(const std::vector<std::int64_t>& faces) {
    const std::int64_t shell = add("CLOSED_SHELL", {str(""), refList(faces)});
    add("MANIFOLD_SOLID_BREP", {str("solid"), PValue::makeRef(shell)});
  }

  void openModel(const std::vector<std::int64_t>& faces) {
    const std::int64_t shell = add("OPEN_SHELL", {str(""), refList(faces)});
    PValue shells;
    shells.kind = PValue::Kind::List;
    shells.list.push_back(PValue::makeRef(shell));
    add("SHELL_BASED_SURFACE_MODEL", {str("surface model"), shells});
  }

  std::string text() const { return serializeStep(graph_); }

 private:
  StepEntityGraph graph_;
  RigidMotion motion_;
  std::int64_t nextId_ = 1;
};

// Quad face of a planar polygonal solid from corner positions and
// precreated edges (lookup by vertex index pair).
struct EdgeTable {
  // key: (min, max) vertex index -> (edge id, logical direction from min)
  std::vector<std::array<int, 2>> keys;
  std::vector<std::int64_t> ids;
  std::vector<bool> fromFirst;

  void put(int a, int b, std::int64_t id) {
    keys.push_back({std::min(a, b), std::max(a, b)});
    ids.push_back(id);
    fromFirst.push_back(a < b);
  }
  // Edge for traversal a->b with the orientation flag.
  std::pair<std::int64_t, bool> get(int a, int b) const {
    const std::array<int, 2> k{std::min(a, b), std::max(a, b)};
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i] == k) {
        const bool logicalFromA = (fromFirst[i] == (a < b));
        return {ids[i], logicalFromA};
      }
    return {-1, true};
  }
};

std::string genPolyhedron(const std::vector<Vec3>& corners,
                          const std::vector<std::vector<int>>& faceCycles,
                          const std::vector<std::array<int, 2>>& edgePairs,
                          const RigidMotion& motion, const std::string& name) {
  GraphWriter w(motion, name);
  std::vector<std::int64_t> vertexIds;
  for (const auto& c : corners) vertexIds.push_back(w.vertex(c));

  EdgeTable edges;
  for (const auto& [a, b] : edgePairs) {
    const Vec3 dir = normalize(corners[b] - corners[a]);
    const std::int64_t curve = w.line(corners[a], dir);
    edges.put(a, b, w.edge(vertexIds[a], vertexIds[b], curve));
  }

  std::vector<std::int64_t> faces;
  for (const auto& cycle : faceCycles) {
    // Outward normal from the first convex corner of the cycle.
    const Vec3& p0 = corners[cycle[0]];
    const Vec3& p1 = corners[cycle[1]];
    const Vec3& p2 = corners[cycle[2]];
    const Vec3 n = normalize(cross(p1 - p0, p2 - p1));
    Vec3 ref = normalize(p1 - p0);
    const std::int64_t surf = w.plane(p0, n, ref);
    std::vector<std::pair<std::int64_t, bool>> loop;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const int a = cycle[i], b = cycle[(i + 1) % cycle.size()];
      loop.push_back(edges.get(a, b));
    }
    faces.push_back(w.face({w.bound(loop, true)}, surf, true));
  }
  w.closedSolid(faces);
  return w.text();
}

}  // namespace

std::string genBox(const Vec3& dims, const RigidMotion& motion) {
  const double dx = dims.x, dy = dims.y, dz = dims.z;
  const std::vector<Vec3> c = {{0, 0, 0},  {dx, 0, 0},  {dx, dy, 0},  {0, dy, 0},
                               {0, 0, dz}, {dx, 0, dz}, {dx, dy, dz}, {0, dy, dz}};
  const std::vector<std::vector<int>> faces = {
      {0, 3, 2, 1},  // bottom (-z)
      {4, 5, 6, 7},  // top (+z)
      {0, 1, 5, 4},  // front (-y)
      {2, 3, 7, 6},  // back (+y)
      {0, 4, 7, 3},  // left (-x)
      {1, 2, 6, 5},  // right (+x)
  };
  const std::vector<std::array<int, 2>> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0},
                                                 {4, 5}, {5, 6}, {6, 7}, {7, 4},
                                                 {0, 4}, {1, 5}, {2, 6}, {3, 7}};
  return genPolyhedron(c, faces, edges, motion, "box");
}

std::string genPrism(int sides, double radius, double height, const RigidMotion& motion) {
  std::vector<Vec3> c;
  for (int i = 0; i < sides; ++i) {
    const double a = kTwoPi * i / sides;
    c.push_back({radius * std::cos(a), radius * std::sin(a), 0.0});
  }
  for (int i = 0; i < sides; ++i) c.push_back({c[i].x, c[i].y, height});
  std::vector<std::vector<int>> faces;
  std::vector<int> bottom, top;
  for (int i = 0; i < sides; ++i) bottom.push_back(sides - 1 - i);  // outward -z
  for (int i = 0; i < sides; ++i) top.push_back(sides + i);
  faces.push_back(bottom);
  faces.push_back(top);
  std::vector<std::array<int, 2>> edges;
  for (int i = 0; i < sides; ++i) {
    const int j = (i + 1) % sides;
    edges.push_back({i, j});
    edges.push_back({sides + i, sides + j});
    edges.push_back({i, sides + i});
    faces.push_back({i, j, sides + j, sides + i});  // lateral, outward radial
  }
  return genPolyhedron(c, faces, edges, motion, "prism");
}

std::string genCylinder(double radius, double height, const RigidMotion& motion) {
  GraphWriter w(motion, "cylinder");
  const Vec3 zAxis{0, 0, 1}, xAxis{1, 0, 0};

  const std::int64_t vBottom = w.vertex({radius, 0, 0});
  const std::int64_t vTop = w.vertex({radius, 0, height});
  const std::int64_t bottomCircle = w.circle({0, 0, 0}, zAxis, xAxis, radius);
  const std::int64_t topCircle = w.circle({0, 0, height}, zAxis, xAxis, radius);
  const std::int64_t bottomEdge = w.edge(vBottom, vBottom, bottomCircle);
  const std::int64_t topEdge = w.edge(vTop, vTop, topCircle);

  const std::int64_t lateral = w.cylinder({0, 0, 0}, zAxis, xAxis, radius);
  const std::int64_t lateralFace =
      w.face({w.bound({{bottomEdge, true}}, true), w.bound({{topEdge, false}}, false)}, lateral,
             true);
  const std::int64_t topPlane = w.plane({0, 0, height}, zAxis, xAxis);
  const std::int64_t topFace = w.face({w.bound({{topEdge, true}}, true)}, topPlane, true);
  const std::int64_t bottomPlane = w.plane({0, 0, 0}, {0, 0, -1}, xAxis);
  const std::int64_t bottomFace =
      w.face({w.bound({{bottomEdge, false}}, true)}, bottomPlane, true);

  w.closedSolid({lateralFace, topFace, bottomFace});
  return w.text();
}

std::string genSplitCylinder(double radius, double height, const RigidMotion& motion) {
  GraphWriter w(motion, "split cylinder");
  const Vec3 zAxis{0, 0, 1}, xAxis{1, 0, 0};
  const Vec3 vb0{radius, 0, 0}, vbPi{-radius, 0, 0};
  const Vec3 vt0{radius, 0, height}, vtPi{-radius, 0, height};

  const std::int64_t iVb0 = w.vertex(vb0), iVbPi = w.vertex(vbPi);
  const std::int64_t iVt0 = w.vertex(vt0), iVtPi = w.vertex(vtPi);

  const std::int64_t bottomCircle = w.circle({0, 0, 0}, zAxis, xAxis, radius);
  const std::int64_t topCircle = w.circle({0, 0, height}, zAxis, xAxis, radius);
  // Arcs subtend [0,pi] (A side) and [pi,2pi] (B side) of the same circles.
  const std::int64_t botA = w.edge(iVb0, iVbPi, bottomCircle);
  const std::int64_t botB = w.edge(iVbPi, iVb0, bottomCircle);
  const std::int64_t topA = w.edge(iVt0, iVtPi, topCircle);
  const std::int64_t topB = w.edge(iVtPi, iVt0, topCircle);
  const std::int64_t seam0 = w.edge(iVb0, iVt0, w.line(vb0, zAxis));
  const std::int64_t seamPi = w.edge(iVbPi, iVtPi, w.line(vbPi, zAxis));

  // Both lateral halves reference the same cylindrical surface instance.
  const std::int64_t lateral = w.cylinder({0, 0, 0}, zAxis, xAxis, radius);
  const std::int64_t faceA = w.face(
      {w.bound({{botA, true}, {seamPi, true}, {topA, false}, {seam0, false}}, true)}, lateral,
      true);
  const std::int64_t faceB = w.face(
      {w.bound({{botB, true}, {seam0, true}, {topB, false}, {seamPi, false}}, true)}, lateral,
      true);

  const std::int64_t topPlane = w.plane({0, 0, height}, zAxis, xAxis);
  const std::int64_t topFace =
      w.face({w.bound({{topA, true}, {topB, true}}, true)}, topPlane, true);
  const std::int64_t bottomPlane = w.plane({0, 0, 0}, {0, 0, -1}, xAxis);
  const std::int64_t bottomFace =
      w.face({w.bound({{botA, false}, {botB, false}}, true)}, bottomPlane, true);

  w.closedSolid({faceA, faceB, topFace, bottomFace});
  return w.text();
}

std::string genFilletedBlock(double topWidth, double filletRadius, double sideHeight,
                             double depth, const RigidMotion& motion) {
  GraphWriter w(motion, "filleted block");
  const double r = filletRadius, b = depth, h = filletRadius + sideHeight;
  const Vec3 A{-topWidth, 0, h}, B{0, 0, h}, C{0, b, h}, D{-topWidth, b, h};
  const Vec3 E{r, 0, h - r}, F{r, b, h - r}, G{r, 0, 0}, H{r, b, 0};

  const std::int64_t iA = w.vertex(A), iB = w.vertex(B), iC = w.vertex(C), iD = w.vertex(D);
  const std::int64_t iE = w.vertex(E), iF = w.vertex(F), iG = w.vertex(G), iH = w.vertex(H);

  auto lineEdge = [&](std::int64_t va, std::int64_t vb, const Vec3& pa, const Vec3& pb) {
    return w.edge(va, vb, w.line(pa, normalize(pb - pa)));
  };
  const std::int64_t eAB = lineEdge(iA, iB, A, B);
  const std::int64_t eBC = lineEdge(iB, iC, B, C);
  const std::int64_t eCD = lineEdge(iC, iD, C, D);
  const std::int64_t eDA = lineEdge(iD, iA, D, A);
  const std::int64_t eEF = lineEdge(iE, iF, E, F);
  const std::int64_t eEG = lineEdge(iE, iG, E, G);
  const std::int64_t eGH = lineEdge(iG, iH, G, H);
  const std::int64_t eHF = lineEdge(iH, iF, H, F);

  // Quarter arcs of the fillet sections at y=0 and y=depth.
  const Vec3 axisY{0, 1, 0}, refZ{0, 0, 1};
  const std::int64_t arc0 = w.circle({0, 0, h - r}, axisY, refZ, r);
  const std::int64_t arcB = w.circle({0, b, h - r}, axisY, refZ, r);
  const std::int64_t eBE = w.edge(iB, iE, arc0);
  const std::int64_t eCF = w.edge(iC, iF, arcB);

  const std::int64_t topPlane = w.plane(A, {0, 0, 1}, {1, 0, 0});
  const std::int64_t topFace = w.face(
      {w.bound({{eAB, true}, {eBC, true}, {eCD, true}, {eDA, true}}, true)}, topPlane, true);

  const std::int64_t fillet = w.cylinder({0, 0, h - r}, axisY, refZ, r);
  const std::int64_t filletFace = w.face(
      {w.bound({{eBE, true}, {eEF, true}, {eCF, false}, {eBC, false}}, true)}, fillet, true);

  const std::int64_t sidePlane = w.plane(E, {1, 0, 0}, {0, 1, 0});
  const std::int64_t sideFace = w.face(
      {w.bound({{eEG, true}, {eGH, true}, {eHF, true}, {eEF, false}}, true)}, sidePlane, true);

  w.openModel({topFace, filletFace, sideFace});
  return w.text();
}

std::string genCone(double baseRadius, double height, double semiAngleRad,
                    const RigidMotion& motion) {
  GraphWriter w(motion, "cone frustum");
  const Vec3 zAxis{0, 0, 1}, xAxis{1, 0, 0};
  const double topRadius = baseRadius + height * std::tan(semiAngleRad);

  const std::int64_t vBottom = w.vertex({baseRadius, 0, 0});
  const std::int64_t vTop = w.vertex({topRadius, 0, height});
  const std::int64_t bottomCircle = w.circle({0, 0, 0}, zAxis, xAxis, baseRadius);
  const std::int64_t topCircle = w.circle({0, 0, height}, zAxis, xAxis, topRadius);
  const std::int64_t bottomEdge = w.edge(vBottom, vBottom, bottomCircle);
  const std::int64_t topEdge = w.edge(vTop, vTop, topCircle);

  const std::int64_t lateral =
      w.add("CONICAL_SURFACE", {GraphWriter::str(""), PValue::makeRef(w.axis2({0, 0, 0}, zAxis, xAxis)),
                                PValue::makeReal(baseRadius), PValue::makeReal(semiAngleRad)});
  const std::int64_t lateralFace =
      w.face({w.bound({{bottomEdge, true}}, true), w.bound({{topEdge, false}}, false)}, lateral,
             true);
  const std::int64_t topPlane = w.plane({0, 0, height}, zAxis, xAxis);
  const std::int64_t topFace = w.face({w.bound({{topEdge, true}}, true)}, topPlane, true);
  const std::int64_t bottomPlane = w.plane({0, 0, 0}, {0, 0, -1}, xAxis);
  const std::int64_t bottomFace =
      w.face({w.bound({{bottomEdge, false}}, true)}, bottomPlane, true);
  w.closedSolid({lateralFace, topFace, bottomFace});
  return w.text();
}

std::string genTorus(double majorRadius, double minorRadius, const RigidMotion& motion) {
  GraphWriter w(motion, "torus");
  const std::int64_t surf = w.add(
      "TOROIDAL_SURFACE", {GraphWriter::str(""), PValue::makeRef(w.axis2({0, 0, 0}, {0, 0, 1}, {1, 0, 0})),
                           PValue::makeReal(majorRadius), PValue::makeReal(minorRadius)});
  const std::int64_t face = w.face({}, surf, true);
  w.closedSolid({face});
  return w.text();
}

std::string genSphere(double radius, const RigidMotion& motion) {
  GraphWriter w(motion, "sphere");
  const std::int64_t surf = w.add(
      "SPHERICAL_SURFACE", {GraphWriter::str(""), PValue::makeRef(w.axis2({0, 0, 0}, {0, 0, 1}, {1, 0, 0})),
                            PValue::makeReal(radius)});
  const std::int64_t face = w.face({}, surf, true);
  w.closedSolid({face});
  return w.text();
}

std::string genPointedCone(double baseRadius, double semiAngleRad, const RigidMotion& motion) {
  GraphWriter w(motion, "pointed cone");
  const Vec3 zAxis{0, 0, 1}, xAxis{1, 0, 0};
  const std::int64_t vBase = w.vertex({baseRadius, 0, 0});
  const std::int64_t baseCircle = w.circle({0, 0, 0}, zAxis, xAxis, baseRadius);
  const std::int64_t baseEdge = w.edge(vBase, vBase, baseCircle);

  // Radius grows with +v, so the apex sits below the base plane.
  const std::int64_t lateral =
      w.add("CONICAL_SURFACE", {GraphWriter::str(""), PValue::makeRef(w.axis2({0, 0, 0}, zAxis, xAxis)),
                                PValue::makeReal(baseRadius), PValue::makeReal(semiAngleRad)});
  // Interior of the lateral face lies toward the apex (below): traverse the
  // rim descending in u.
  const std::int64_t lateralFace =
      w.face({w.bound({{baseEdge, false}}, true)}, lateral, true);
  const std::int64_t capPlane = w.plane({0, 0, 0}, zAxis, xAxis);
  const std::int64_t capFace = w.face({w.bound({{baseEdge, true}}, true)}, capPlane, true);
  w.closedSolid({lateralFace, capFace});
  return w.text();
}

std::string genBSplinePatch(const RigidMotion& motion) {
  GraphWriter w(motion, "bspline patch");
  // Bicubic Bezier-form patch over [0,1]^2 with a central bump.
  Vec3 grid[4][4];
  std::int64_t gridIds[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double x = i / 3.0, y = j / 3.0;
      grid[i][j] = {x, y, 0.5 * std::sin(kPi * x) * std::sin(kPi * y)};
      gridIds[i][j] = w.point(grid[i][j]);
    }
  auto knots = [&] {
    PValue mults;
    mults.kind = PValue::Kind::List;
    mults.list = {PValue::makeInt(4), PValue::makeInt(4)};
    PValue vals;
    vals.kind = PValue::Kind::List;
    vals.list = {PValue::makeReal(0.0), PValue::makeReal(1.0)};
    return std::make_pair(mults, vals);
  };

  auto curveFromRow = [&](const std::array<std::int64_t, 4>& ids) {
    PValue ctrl;
    ctrl.kind = PValue::Kind::List;
    for (auto id : ids) ctrl.list.push_back(PValue::makeRef(id));
    auto [mults, vals] = knots();
    return w.add("B_SPLINE_CURVE_WITH_KNOTS",
                 {GraphWriter::str(""), PValue::makeInt(3), ctrl, GraphWriter::en("UNSPECIFIED"),
                  GraphWriter::boolean(false), GraphWriter::boolean(false), mults, vals,
                  GraphWriter::en("UNSPECIFIED")});
  };

  const std::int64_t c00 = w.vertex(grid[0][0]);
  const std::int64_t c30 = w.vertex(grid[3][0]);
  const std::int64_t c33 = w.vertex(grid[3][3]);
  const std::int64_t c03 = w.vertex(grid[0][3]);
  // Boundary curves follow the clamped patch edges exactly.
  const std::int64_t south =
      curveFromRow({gridIds[0][0], gridIds[1][0], gridIds[2][0], gridIds[3][0]});
  const std::int64_t east =
      curveFromRow({gridIds[3][0], gridIds[3][1], gridIds[3][2], gridIds[3][3]});
  const std::int64_t north =
      curveFromRow({gridIds[0][3], gridIds[1][3], gridIds[2][3], gridIds[3][3]});
  const std::int64_t west =
      curveFromRow({gridIds[0][0], gridIds[0][1], gridIds[0][2], gridIds[0][3]});
  const std::int64_t eS = w.edge(c00, c30, south);
  const std::int64_t eE = w.edge(c30, c33, east);
  const std::int64_t eN = w.edge(c03, c33, north);
  const std::int64_t eW = w.edge(c00, c03, west);

  PValue net;
  net.kind = PValue::Kind::List;
  for (int i = 0; i < 4; ++i) {
    PValue row;
    row.kind = PValue::Kind::List;
    for (int j = 0; j < 4; ++j) row.list.push_back(PValue::makeRef(gridIds[i][j]));
    net.list.push_back(row);
  }
  auto [mults, vals] = knots();
  const std::int64_t surf = w.add(
      "B_SPLINE_SURFACE_WITH_KNOTS",
      {GraphWriter::str(""), PValue::makeInt(3), PValue::makeInt(3), net,
       GraphWriter::en("UNSPECIFIED"), GraphWriter::boolean(false), GraphWriter::boolean(false),
       GraphWriter::boolean(false), mults, mults, vals, vals, GraphWriter::en("UNSPECIFIED")});
  const std::int64_t face = w.face(
      {w.bound({{eS, true}, {eE, true}, {eN, false}, {eW, false}}, true)}, surf, true);
  w.openModel({face});
  return w.text();
}

std::vector<std::pair<std::string, std::string>> genCorpus(int count, std::uint64_t seed) {
  std::vector<std::pair<std::string, std::string>> out;
  std::mt19937_64 eng(seed);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (double(eng() >> 11) * 0x1.0p-53);
  };
  for (int i = 0; i < count; ++i) {
    RigidMotion motion;
    motion.axis = normalize(Vec3{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)});
    if (norm(motion.axis) < 0.5) motion.axis = {0, 0, 1};
    motion.angleRad = uniform(0, kTwoPi);
    motion.translation = {uniform(-10, 10), uniform(-10, 10), uniform(-10, 10)};

    std::string text;
    std::string kind;
    switch (i % 9) {
      case 0:
        kind = "box";
        text = genBox({uniform(0.5, 3), uniform(0.5, 3), uniform(0.5, 3)}, motion);
        break;
      case 1:
        kind = "cylinder";
        text = genCylinder(uniform(0.4, 2), uniform(0.5, 3), motion);
        break;
      case 2:
        kind = "splitcyl";
        text = genSplitCylinder(uniform(0.4, 2), uniform(0.5, 3), motion);
        break;
      case 3: {
        kind = "prism";
        const int sides = 3 + static_cast<int>(uniform(0, 9.999));  // 3..12
        text = genPrism(sides, uniform(0.5, 2), uniform(0.5, 3), motion);
        break;
      }
      case 4:
        kind = "fillet";
        text = genFilletedBlock(uniform(0.5, 2), uniform(0.2, 0.8), uniform(0.5, 2),
                                uniform(0.5, 2), motion);
        break;
      case 5:
        kind = "cone";
        text = genCone(uniform(0.4, 1.5), uniform(0.5, 2), uniform(0.1, 0.6), motion);
        break;
      case 6:
        kind = "torus";
        text = genTorus(uniform(1.5, 3), uniform(0.3, 1.0), motion);
        break;
      case 7:
        kind = "sphere";
        text = genSphere(uniform(0.5, 2), motion);
        break;
      case 8:
        kind = "pcone";
        text = genPointedCone(uniform(0.4, 1.5), uniform(0.15, 0.6), motion);
        break;
    }
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%04d", kind.c_str(), i);
    out.push_back({name, std::move(text)});
  }
  return out;
}

}  // namespace steppart
