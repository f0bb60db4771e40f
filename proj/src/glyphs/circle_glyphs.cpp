#include "vdk/glyphs/circle_glyphs.hpp"

#include <algorithm>
#include <cmath>

#include "vdk/shading/colormap.hpp"
#include "vdk/shading/shading.hpp"

namespace vdk {

double circleFill(double normalizedDistance, int circle) {
  return clamp01(kCircleCount * clamp01(normalizedDistance) - circle);
}

bool inFilledSector(const Vec2& local, double fill) {
  if (fill <= 0.0) return false;
  if (fill >= 1.0) return true;
  // Clockwise angle from +y.
  double a = std::atan2(local.x(), local.y());
  if (a < 0.0) a += 2.0 * kPi;
  return a <= fill * 2.0 * kPi;
}

std::vector<CircleGlyph> concentricCircleGlyphs(const Camera& camera, const AnchorSet& anchors,
                                                const std::vector<Vec3>& tumorPositions,
                                                const CircleGlyphOptions& options) {
  std::vector<CircleGlyph> glyphs;
  if (anchors.size() == 0) return glyphs;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, farTumor = 0.0;
  for (const Vec3& p : anchors.worldPositions) {
    CircleGlyph g;
    g.position = p;
    g.cameraDistance = (p - camera.position).norm();
    g.tumorDistance = tumorPositions.empty() ? 0.0 : tumorDistance(p, tumorPositions);
    lo = std::min(lo, g.cameraDistance);
    hi = std::max(hi, g.cameraDistance);
    farTumor = std::max(farTumor, g.tumorDistance);
    glyphs.push_back(g);
  }
  const ColorMap heat = ColorMap::named("heat");
  const double range = options.proximityRange > 0.0 ? options.proximityRange : farTumor;
  for (auto& g : glyphs) {
    g.normalizedDistance = hi > lo ? (g.cameraDistance - lo) / (hi - lo) : 0.0;
    const double ratio = lo / std::max(g.cameraDistance, 1e-12);
    g.sizePx = options.baseSizeFraction * camera.height * ratio * ratio;
    g.fillColor = tumorPositions.empty() ? heat(1.0) : heat(range > 0.0 ? clamp01(g.tumorDistance / range) : 0.0);
  }
  return glyphs;
}

Rgba circleGlyphTexel(const CircleGlyph& glyph, const Vec2& local, const CircleGlyphOptions& options) {
  const double r = local.norm();
  if (r > 1.0) return Rgba(0, 0, 0, 0);
  const double px = std::max(glyph.sizePx * 0.5, 1e-9);
  const double outline = options.outlinePx / px;
  const auto outlineColor = Rgba(options.outlineColor.x(), options.outlineColor.y(), options.outlineColor.z(), 1.0);
  for (int k = 1; k <= kCircleCount; ++k) {
    if (std::abs(r - static_cast<double>(k) / kCircleCount) <= 0.5 * outline) return outlineColor;
  }
  const int circle = std::min(kCircleCount - 1, static_cast<int>(r * kCircleCount));
  if (inFilledSector(local, circleFill(glyph.normalizedDistance, circle))) {
    return Rgba(glyph.fillColor.x(), glyph.fillColor.y(), glyph.fillColor.z(), 1.0);
  }
  return Rgba(options.emptyColor.x(), options.emptyColor.y(), options.emptyColor.z(), options.emptyAlpha);
}

void paintCircleGlyphs(OverlayPainter& painter, const std::vector<CircleGlyph>& glyphs,
                       const CircleGlyphOptions& options) {
  // Far glyphs first so near ones end on top.
  std::vector<std::size_t> order(glyphs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return glyphs[a].cameraDistance > glyphs[b].cameraDistance; });
  for (std::size_t i : order) {
    const CircleGlyph& g = glyphs[i];
    OverlayOptions opt;
    opt.depthBias = 2.0;
    painter.billboard(g.position, 0.5 * g.sizePx, [&](const Vec2& p) { return circleGlyphTexel(g, p, options); }, opt);
  }
}

}  // namespace vdk
