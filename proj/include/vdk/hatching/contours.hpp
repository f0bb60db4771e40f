#pragma once

#include <utility>
#include <vector>

#include "vdk/render/framebuffer.hpp"
#include "vdk/render/scene.hpp"

namespace vdk {

struct ContourPolyline {
  int instance = -1;
  std::vector<Vec3> world;
  std::vector<Vec2> screen;  ///< pixel coordinates, same length as world
  bool closed = false;       ///< last point connects back to the first
};

/// Edges (a < b) where the two incident faces differ in facing toward the
/// eye, plus boundary edges. Sorted.
std::vector<std::pair<int, int>> contourEdges(const TriMesh& mesh, const Vec3& eye);

/// Chains edges into vertex paths. Open chains run between vertices whose
/// edge degree is not 2; the remaining edges form loops, returned with
/// closed = true and without repeating the first vertex.
std::vector<std::pair<std::vector<int>, bool>> chainEdges(const std::vector<std::pair<int, int>>& edges);

struct ContourOptions {
  double sampleSpacingPx = 1.0;
  double depthTolerance = 0.5;  ///< mm
  bool removeOccluded = true;
  bool splitIntersections = true;
  std::size_t minPoints = 2;
  double minLengthPx = 2.0;  ///< shorter open fragments are dropped
};

/// Contours of every instance. Occlusion compares samples against the
/// largest view depth in the 3x3 neighbourhood of the geometry buffer;
/// polylines are split at occlusion boundaries and at screen-space crossings.
std::vector<ContourPolyline> extractContours(const Scene& scene, const FrameBuffer& geometry,
                                             const ContourOptions& options = {});

/// Screen-space length including the closing segment of loops.
double screenLength(const ContourPolyline& polyline);

}  // namespace vdk
