#pragma once

#include <vector>

#include "vdk/render/framebuffer.hpp"
#include "vdk/shading/shading.hpp"

namespace vdk {

struct VoidSpaceParams {
  DistanceParams colors;        ///< PCD near/far colours
  int maxContourPoints = 2048;  ///< contour subsampled by uniform stride above this
  double distanceFloorPx = 0.5;
  int isolineCount = 10;
  double isolineWidthPx = 1.0;
  double reliefScale = 4.0;  ///< height of the fill surface in image widths per unit depth
  Vec3 lightDirection{0.3, 0.5, 1.0};  ///< view space
  Rgb isolineColor{0.2, 0.2, 0.25};
  Rgb flatColor{1.0, 1.0, 1.0};  ///< used when there is no contour
};

struct VoidSpaceResult {
  int width = 0;
  int height = 0;
  ScalarImage fill;        ///< interpolated depth on void pixels, NaN on covered ones
  std::vector<Rgb> color;  ///< background colour for every pixel
  bool noContour = false;
  std::size_t contourCount = 0;
  std::size_t contourUsed = 0;
  double minDepth = 0.0;
  double maxDepth = 0.0;
};

/// Covered pixels with at least one uncovered 4-neighbour inside the frame,
/// as row-major indices.
std::vector<std::size_t> contourPixels(const FrameBuffer& fb);

/// Fills the void with D(q) = sum w_i d_i / sum w_i over contour pixels,
/// w_i = 1 / max(|q - i|, floor)^2, then shades the fill as a relief surface
/// with the PCD ramp and depth isolines. A frame without contour (empty or
/// fully covered) yields flatColor and noContour = true.
VoidSpaceResult voidSpaceSurfaces(const FrameBuffer& fb, const VoidSpaceParams& params = {});

/// Replaces the colour of void pixels by the computed background.
void compositeVoidSpace(FrameBuffer& fb, const VoidSpaceResult& result);

}  // namespace vdk
