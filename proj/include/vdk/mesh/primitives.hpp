#pragma once

#include <functional>
#include <vector>

#include "vdk/mesh/tri_mesh.hpp"

namespace vdk::primitives {

/// Subdivided icosahedron; level 0 has 20 faces, each level multiplies by 4.
TriMesh icosphere(double radius, int subdivisions, const Vec3& center = Vec3::Zero());

/// Axis-aligned cube [lo, hi]^3 with 12 outward triangles.
TriMesh cube(double lo = 0.0, double hi = 1.0);

/// Flat (z = 0) grid of (nx+1) x (ny+1) vertices spanning [0,sx] x [0,sy].
TriMesh gridPatch(int nx, int ny, double sx, double sy);

/// Regular hexagon fan of six equilateral triangles, centre vertex 0.
TriMesh hexPatch(double edge = 1.0);

/// Open tube (no caps) along +Z, radius r, `rings` vertex rings.
TriMesh openCylinder(double radius, double length, int segments, int rings);

/// Closed surface of revolution about +Z. The profile runs from one pole to
/// the other as (z, r) samples; the first and last must have r == 0 and become
/// single pole vertices.
TriMesh revolve(const std::vector<Vec2>& profile, int segments);

/// Straight tube with spherical end caps of radii r0 (at z = 0 side) and r1,
/// joined by a tangent cone. Tip apexes lie at z = -r0 and z = length + r1.
TriMesh roundedTube(double length, double r0, double r1, int segments, double profileStep);

/// Torus around +Z.
TriMesh torus(double majorRadius, double minorRadius, int majorSegments, int minorSegments);

/// Polygonizes f < 0 over the grid box with marching tetrahedra (watertight,
/// outward oriented). `cell` is the grid spacing in mm.
TriMesh polygonize(const std::function<double(const Vec3&)>& sdf, const BoundingBox& box, double cell);

/// Tapered capsule between a (radius ra) and b (radius rb).
double roundConeSdf(const Vec3& p, const Vec3& a, const Vec3& b, double ra, double rb);
/// Polynomial smooth minimum with blend radius k.
double smoothMin(double a, double b, double k);

struct Branch {
  Vec3 from;
  Vec3 to;
  double radiusFrom;
  double radiusTo;
};

/// Smooth union of tapered branches.
double branchesSdf(const Vec3& p, const std::vector<Branch>& branches, double blend);

/// Three arms of the given length leaving the origin in the XY plane at
/// 120° spacing. Tip apexes are returned through `tips`.
TriMesh yBranch(double armLength, double radius, double cell, std::vector<Vec3>* tips = nullptr);

/// Synthetic liver-like vessel tree (deterministic) with its branch list.
std::vector<Branch> vesselTreeBranches();
TriMesh vesselTree(double cell);

}  // namespace vdk::primitives
