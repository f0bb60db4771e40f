#pragma once

#include <vector>

#include "vdk/glyphs/overlay.hpp"
#include "vdk/glyphs/supporting.hpp"

namespace vdk {

inline constexpr int kCircleCount = 3;

/// Fill fraction of circle k (0 = innermost) for a normalized camera
/// distance t: clamp(3t - k, 0, 1).
double circleFill(double normalizedDistance, int circle);

/// Whether a glyph-local point is inside the filled sector of a circle that
/// is filled `fill` of the way clockwise from 12 o'clock. local uses +y up.
bool inFilledSector(const Vec2& local, double fill);

struct CircleGlyphOptions {
  /// Quad edge as a fraction of the viewport height for the nearest anchor.
  double baseSizeFraction = 0.04;
  /// Tumor distance mapped to the end of the colour ramp; <= 0 uses the
  /// largest anchor-to-tumor distance.
  double proximityRange = 0.0;
  Rgb emptyColor{1.0, 1.0, 1.0};
  double emptyAlpha = 0.55;
  Rgb outlineColor{0.1, 0.1, 0.1};
  double outlinePx = 1.0;
};

struct CircleGlyph {
  Vec3 position;
  double cameraDistance = 0.0;
  double normalizedDistance = 0.0;
  double tumorDistance = 0.0;
  double sizePx = 0.0;  ///< quad edge in pixels
  Rgb fillColor;
};

/// One glyph per anchor. Distances are normalized over the anchor set's
/// camera-distance range; glyph size falls with (nearest distance / distance)^2.
std::vector<CircleGlyph> concentricCircleGlyphs(const Camera& camera, const AnchorSet& anchors,
                                                const std::vector<Vec3>& tumorPositions,
                                                const CircleGlyphOptions& options = {});

/// Colour of a glyph at local coordinates in [-1, 1]^2 (alpha 0 outside).
Rgba circleGlyphTexel(const CircleGlyph& glyph, const Vec2& local, const CircleGlyphOptions& options = {});

void paintCircleGlyphs(OverlayPainter& painter, const std::vector<CircleGlyph>& glyphs,
                       const CircleGlyphOptions& options = {});

}  // namespace vdk
