#pragma once

#include <functional>

#include "vdk/render/camera.hpp"
#include "vdk/render/framebuffer.hpp"

namespace vdk {

struct OverlayOptions {
  bool depthTest = true;
  /// Moves overlay samples this many mm toward the camera before testing.
  double depthBias = 0.0;
};

/// Draws screen-space primitives over a rendered frame. Colours are blended
/// with their alpha; the depth buffer is read but not written.
class OverlayPainter {
 public:
  OverlayPainter(FrameBuffer& fb, const Camera& camera) : fb_(fb), cam_(camera) {}

  /// Segment with constant pixel width; depth interpolated perspective-correctly.
  void line(const Vec3& a, const Vec3& b, double widthPx, const Rgba& color, const OverlayOptions& opt = {});
  /// Filled disc around a world point.
  void disc(const Vec3& center, double radiusPx, const Rgba& color, const OverlayOptions& opt = {});
  /// Camera-facing square of half-size radiusPx; shade receives local
  /// coordinates in [-1, 1]^2 (+y up) and returns RGBA.
  void billboard(const Vec3& center, double radiusPx, const std::function<Rgba(const Vec2&)>& shade,
                 const OverlayOptions& opt = {});
  /// World-space triangle with texture coordinates; shade(uv) gives RGBA.
  void triangle(const Vec3 world[3], const Vec2 uv[3], const std::function<Rgba(const Vec2&)>& shade,
                const OverlayOptions& opt = {});
  /// Quad a-b-c-d with uv (0,0), (1,0), (1,1), (0,1).
  void quad(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const std::function<Rgba(const Vec2&)>& shade,
            const OverlayOptions& opt = {});

  /// Number of pixels written so far.
  long long pixelsWritten() const { return written_; }

 private:
  bool visible(int x, int y, double viewDepth, const OverlayOptions& opt) const;
  void blend(int x, int y, const Rgba& c);

  FrameBuffer& fb_;
  const Camera& cam_;
  long long written_ = 0;
};

}  // namespace vdk
