#pragma once

#include <cstdint>
#include <vector>

#include "vdk/render/framebuffer.hpp"
#include "vdk/render/scene.hpp"

namespace vdk {

/// Screen-space 2D vectors, zero where undefined.
struct VectorImage {
  int width = 0;
  int height = 0;
  std::vector<Vec2> data;

  VectorImage() = default;
  VectorImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, Vec2::Zero()) {}
  const Vec2& at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  Vec2& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
};

struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  BinaryImage() = default;
  BinaryImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}
  bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
  bool empty() const { return data.empty(); }
};

/// Fraction of `samples` hemisphere points (Hammersley set, seeded rotation,
/// 4x4 interleaved per pixel) within `radius` mm of each covered pixel whose
/// reprojection lies behind the depth buffer, within range. Smoothed by a
/// 4x4 box over pixels of the same object. Background and samples = 0 give 0.
ScalarImage computeSsao(const FrameBuffer& fb, const Camera& camera, double radius, int samples,
                        std::uint64_t seed = 0);

/// Central-difference gradient of the diffuse term, optionally rotated 90
/// degrees to run along iso-illumination lines. Zero wherever a 4-neighbour
/// is background or another object.
VectorImage illuminationGradient(const FrameBuffer& fb, bool rotate = true);

/// Per-pixel vector lengths.
ScalarImage magnitude(const VectorImage& field);

/// Per-vertex world directions (one list per instance, empty to skip)
/// projected to unit screen directions at each fragment. Directions are
/// lines: vertex contributions are sign-aligned before blending.
VectorImage projectDirectionField(const FrameBuffer& fb, const Scene& scene,
                                  const std::vector<std::vector<Vec3>>& directions);

/// White noise keyed by the hashed world position quantized to `cellSize`
/// mm, multiplied by the diffuse term. Background is 0.
ScalarImage modulatedNoise(const FrameBuffer& fb, std::uint64_t seed, double cellSize);

/// Pixels with a 4-neighbour across a coverage change, a view-depth jump above
/// depthThreshold * depthRange or a normal angle above normalAngleDeg.
BinaryImage detectEdges(const FrameBuffer& fb, double depthRange, double depthThreshold = 0.01,
                        double normalAngleDeg = 30.0);

/// Box-kernel line integral convolution. From each pixel centre a
/// streamline is traced up to halfLength unit steps both ways (midpoint
/// rule, sign aligned to the previous step). Tracing stops on leaving the
/// image, at zero-field pixels and on entering an edge pixel (diagonal moves
/// also test both side pixels). Edge pixels keep their own value. The
/// optional counts receive the number of samples averaged per pixel.
ScalarImage licConvolve(const ScalarImage& noise, const VectorImage& field, int halfLength,
                        const BinaryImage& edges = {}, std::vector<int>* counts = nullptr);

}  // namespace vdk
