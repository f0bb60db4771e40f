#include "vdk/glyphs/void_space.hpp"

#include <cmath>
#include <limits>

#include "vdk/core/parallel.hpp"

namespace vdk {

std::vector<std::size_t> contourPixels(const FrameBuffer& fb) {
  std::vector<std::size_t> out;
  for (int y = 0; y < fb.height; ++y) {
    for (int x = 0; x < fb.width; ++x) {
      if (!fb.covered(x, y)) continue;
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (fb.inside(nx[k], ny[k]) && !fb.covered(nx[k], ny[k])) {
          out.push_back(fb.index(x, y));
          break;
        }
      }
    }
  }
  return out;
}

VoidSpaceResult voidSpaceSurfaces(const FrameBuffer& fb, const VoidSpaceParams& params) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  VoidSpaceResult r;
  r.width = fb.width;
  r.height = fb.height;
  r.fill = ScalarImage(fb.width, fb.height, nan);
  r.color.assign(fb.size(), params.flatColor);
  const std::vector<std::size_t> contour = contourPixels(fb);
  r.contourCount = contour.size();
  if (contour.empty()) {
    r.noContour = true;
    return r;
  }

  const std::size_t cap = static_cast<std::size_t>(std::max(1, params.maxContourPoints));
  const std::size_t stride = (contour.size() + cap - 1) / cap;
  std::vector<Vec2> pos;
  std::vector<double> depth;
  for (std::size_t k = 0; k < contour.size(); k += stride) {
    const std::size_t i = contour[k];
    pos.emplace_back(static_cast<double>(i % fb.width), static_cast<double>(i / fb.width));
    depth.push_back(fb.depth[i]);
  }
  r.contourUsed = pos.size();
  r.minDepth = *std::min_element(depth.begin(), depth.end());
  r.maxDepth = *std::max_element(depth.begin(), depth.end());

  const double floor2 = params.distanceFloorPx * params.distanceFloorPx;
  parallelFor(0, static_cast<std::size_t>(fb.height), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < fb.width; ++x) {
      if (fb.covered(x, y)) continue;
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < pos.size(); ++k) {
        const double dx = x - pos[k].x(), dy = y - pos[k].y();
        const double w = 1.0 / std::max(dx * dx + dy * dy, floor2);
        num += w * depth[k];
        den += w;
      }
      r.fill.at(x, y) = num / den;
    }
  });

  const Vec3 light = params.lightDirection.normalized();
  const double span = r.maxDepth - r.minDepth;
  const double k = params.reliefScale * fb.width;
  auto sampleFill = [&](int x, int y, double fallback) {
    if (!fb.inside(x, y)) return fallback;
    const double v = r.fill.at(x, y);
    return std::isfinite(v) ? v : fallback;
  };
  parallelFor(0, static_cast<std::size_t>(fb.height), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < fb.width; ++x) {
      const double d = r.fill.at(x, y);
      if (!std::isfinite(d)) continue;
      const double dx = 0.5 * (sampleFill(x + 1, y, d) - sampleFill(x - 1, y, d));
      const double dy = 0.5 * (sampleFill(x, y + 1, d) - sampleFill(x, y - 1, d));
      const Vec3 n = Vec3(k * dx, -k * dy, 1.0).normalized();
      const double diffuse = std::max(0.0, n.dot(light));
      const double t = span > 0.0 ? clamp01((d - r.minDepth) / span) : 0.0;
      Rgb c = pseudoChromadepth(t, diffuse, params.colors);
      if (params.isolineCount > 0 && span > 0.0) {
        const double grad = std::hypot(dx, dy) / span * params.isolineCount;
        const double v = t * params.isolineCount;
        const double frac = std::abs(v - std::round(v));
        if (grad > 0.0 && frac / grad < 0.5 * params.isolineWidthPx) c = params.isolineColor;
      }
      r.color[fb.index(x, y)] = c;
    }
  });
  return r;
}

void compositeVoidSpace(FrameBuffer& fb, const VoidSpaceResult& result) {
  for (std::size_t i = 0; i < fb.size(); ++i) {
    if (fb.covered(i)) continue;
    fb.color[i].head<3>() = result.color[i];
    fb.color[i].w() = 1.0;
  }
}

}  // namespace vdk
