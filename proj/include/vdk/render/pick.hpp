#pragma once

#include <optional>

#include "vdk/render/scene.hpp"

namespace vdk {

struct PickResult {
  int instance = -1;
  int face = -1;
  int vertexIndex = -1;  ///< triangle vertex nearest to the hit point
  Vec3 worldPosition = Vec3::Zero();
  double depth = 1.0;  ///< linear depth, comparable with FrameBuffer::depth
  double distance = 0.0;
};

/// Casts the camera ray through the pixel centre and returns the nearest hit
/// between the near and far planes (ties to the lower instance, then face).
std::optional<PickResult> pick(const Scene& scene, int x, int y);

/// Möller–Trumbore; returns the ray parameter and (u, v) of the hit.
std::optional<Vec3> intersectTriangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace vdk
