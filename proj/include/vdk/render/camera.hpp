#pragma once

#include "vdk/core/types.hpp"

namespace vdk {

/// Perspective pinhole camera. Pixel (x, y) covers [x, x+1) x [y, y+1) with
/// row 0 at the top of the image; samples are taken at pixel centres.
struct Camera {
  Vec3 position{0.0, 0.0, 100.0};
  Vec3 lookAt = Vec3::Zero();
  Vec3 up = Vec3::UnitY();
  double verticalFov = 45.0;  ///< degrees
  double nearPlane = 1.0;
  double farPlane = 1000.0;
  int width = 512;
  int height = 512;

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;

  Vec3 forward() const;
  Vec3 right() const;
  Vec3 trueUp() const;

  /// World point to (right, up, depth) where depth is the distance along the
  /// view axis (positive in front of the camera).
  Vec3 toView(const Vec3& world) const;
  /// World direction into view space with +z pointing at the viewer.
  Vec3 directionToView(const Vec3& dir) const;
  Vec3 directionFromView(const Vec3& dir) const;

  /// Screen position (pixels, fractional) and view depth. Only meaningful
  /// for depth > 0.
  Vec3 project(const Vec3& world) const;

  /// Unit ray direction through the given screen point (pixel units).
  Vec3 rayDirection(double sx, double sy) const;
  Vec3 pixelRay(int x, int y) const { return rayDirection(x + 0.5, y + 0.5); }

  /// (viewDepth - near) / (far - near), clamped to [0, 1].
  double linearDepth(double viewDepth) const;

  double aspect() const { return static_cast<double>(width) / height; }
  double tanHalfFov() const;

  /// Same view with a different resolution.
  Camera withViewport(int w, int h) const;
};

/// Linear depth of a world-space point under the camera.
double linearDepth(const Camera& camera, const Vec3& world);

}  // namespace vdk
