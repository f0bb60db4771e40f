#pragma once

#include <string>
#include <vector>

#include "vdk/render/scene.hpp"

namespace vdk {

/// Rectangular ground plane patch: origin is one corner, the patch spans
/// origin + s*uAxis*extentU + t*vAxis*extentV for s, t in [0, 1]. The
/// projecting light travels along -normal.
struct ShadowPlane {
  Vec3 origin = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  Vec3 uAxis = Vec3::UnitX();
  double extentU = 100.0;
  double extentV = 100.0;
  int resolutionU = 256;
  int resolutionV = 256;

  Vec3 vAxis() const { return normal.cross(uAxis).normalized(); }
  double cellU() const { return extentU / resolutionU; }
  double cellV() const { return extentV / resolutionV; }
  /// World position of a cell centre.
  Vec3 cellCenter(int u, int v) const;
  /// Signed height of a point above the plane.
  double height(const Vec3& p) const { return normal.dot(p - origin); }
};

/// Plane sized to the scene bounds: placed `gap` below the lowest point along
/// -normal with a margin around the projected footprint.
ShadowPlane fitShadowPlane(const Scene& scene, const Vec3& normal, double gap, double margin, int resolution);

/// Orthographic shadow labels: 0 = no shadow, otherwise instance index + 1 of
/// the caster nearest to the light at that cell.
struct ShadowMask {
  ShadowPlane plane;
  std::vector<int> labels;
  std::vector<std::string> warnings;

  int at(int u, int v) const { return labels[static_cast<std::size_t>(v) * plane.resolutionU + u]; }
  /// Number of 4-connected components of non-zero cells.
  int componentCount() const;
};

/// Projects every instance onto the plane. Geometry below the plane adds a
/// "plane intersects mesh" warning; the shadow is still produced.
ShadowMask shadowProject(const Scene& scene, const ShadowPlane& plane);

}  // namespace vdk
