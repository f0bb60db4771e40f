#include "vdk/render/framebuffer.hpp"

#include <limits>

namespace vdk {

FrameBuffer::FrameBuffer(int w, int h) : width(w), height(h) {
  const std::size_t n = size();
  color.assign(n, Rgba::Zero());
  depth.assign(n, 1.0);
  viewDepth.assign(n, std::numeric_limits<double>::infinity());
  normal.assign(n, Vec3::Zero());
  worldNormal.assign(n, Vec3::Zero());
  position.assign(n, Vec3::Zero());
  illum.assign(n, 0.0);
  objectMask.assign(n, kNoObject);
  face.assign(n, -1);
  bary.assign(n, Vec3::Zero());
}

FrameBuffer downsample2x(const FrameBuffer& fb) {
  FrameBuffer out(fb.width / 2, fb.height / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const std::size_t o = out.index(x, y);
      const std::size_t s = fb.index(2 * x, 2 * y);
      out.color[o] = 0.25 * (fb.color[s] + fb.color[s + 1] + fb.color[s + fb.width] + fb.color[s + fb.width + 1]);
      out.depth[o] = fb.depth[s];
      out.viewDepth[o] = fb.viewDepth[s];
      out.normal[o] = fb.normal[s];
      out.worldNormal[o] = fb.worldNormal[s];
      out.position[o] = fb.position[s];
      out.illum[o] = fb.illum[s];
      out.objectMask[o] = fb.objectMask[s];
      out.face[o] = fb.face[s];
      out.bary[o] = fb.bary[s];
    }
  }
  return out;
}

}  // namespace vdk
