#pragma once

#include <vector>

#include "vdk/core/types.hpp"

namespace vdk {

inline constexpr int kNoObject = -1;

/// Per-pixel render output. Index = y * width + x.
struct FrameBuffer {
  int width = 0;
  int height = 0;
  std::vector<Rgba> color;        ///< linear light, composited over the background
  std::vector<double> depth;      ///< linear depth in [0, 1], 1 where empty
  std::vector<double> viewDepth;  ///< distance along the view axis, +inf where empty
  std::vector<Vec3> normal;       ///< view-space unit normal (+z toward viewer), zero where empty
  std::vector<Vec3> worldNormal;  ///< shading normal in world space
  std::vector<Vec3> position;     ///< world-space surface point
  std::vector<double> illum;      ///< max(0, N.L) for the key light
  std::vector<int> objectMask;    ///< instance index or kNoObject
  std::vector<int> face;          ///< face index within the instance or -1
  std::vector<Vec3> bary;         ///< perspective-correct barycentric weights

  FrameBuffer() = default;
  FrameBuffer(int w, int h);

  std::size_t size() const { return static_cast<std::size_t>(width) * height; }
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  bool covered(std::size_t i) const { return objectMask[i] != kNoObject; }
  bool covered(int x, int y) const { return covered(index(x, y)); }
  bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
};

/// Single-channel float image helper used by post-processing passes.
struct ScalarImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  ScalarImage() = default;
  ScalarImage(int w, int h, double fill = 0.0) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}
  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// 2x2 box filter of the colour channel (presentation supersampling). Other
/// channels take the top-left sample.
FrameBuffer downsample2x(const FrameBuffer& fb);

}  // namespace vdk
