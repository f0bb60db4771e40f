#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "vdk/glyphs/overlay.hpp"
#include "vdk/mesh/tri_mesh.hpp"
#include "vdk/render/image_io.hpp"
#include "vdk/shading/shading.hpp"

namespace vdk {

struct GlyphStyle {
  double maxLength = 40.0;          ///< mm, sparse arrows; dense arrows use half
  double switchingDistance = 35.0;  ///< mm to the tumor
  double thickness = 1.6;           ///< mm, dense arrows; sparse arrows use 1.5x
  double tickSpacing = 20.0;        ///< mm
  double denseSpacing = 4.0;        ///< Poisson radius near the tumor, mm
  double sparseSpacing = 10.0;      ///< Poisson radius elsewhere, mm
  /// Arrow bitmap: grayscale in rgb, coverage in alpha, shaft along +v.
  std::optional<Image8> glyphTexture;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

struct SurfacePoint {
  Vec3 position;
  Vec3 normal;
  int face = -1;
};

/// Variable-radius dart throwing on area-weighted triangles. A candidate is
/// rejected when an accepted point lies closer than the mean of both radii.
/// Deterministic for a given seed.
std::vector<SurfacePoint> poissonSurfaceSamples(const TriMesh& mesh, const std::function<double(const Vec3&)>& radius,
                                                std::uint64_t seed, int candidatesPerMinDisc = 30);

/// Dense spacing within switchingDistance of the nearest tumor, sparse
/// spacing beyond. Throws NoTumor when no tumor is given.
std::vector<SurfacePoint> arrowSamplePoints(const TriMesh& mesh, const std::vector<Vec3>& tumorPositions,
                                            const GlyphStyle& style, std::uint64_t seed);

/// floor(length / spacing).
int tickCount(double length, double spacing);

/// max(0, cos angle between direction and normal).
double arrowOpacity(const Vec3& direction, const Vec3& normal);

struct ArrowGlyph {
  Vec3 base;
  Vec3 tip;
  Vec3 direction;  ///< unit, toward the tumor
  double tumorDistance = 0.0;
  double length = 0.0;
  double thickness = 0.0;
  double opacity = 0.0;
  bool dense = false;
  std::vector<Vec3> ticks;  ///< dot centres along the shaft
  Rgb color;
};

/// One arrow per sample, pointing at the nearest tumor. Colour follows the
/// PCD ramp over tumor distance normalized by the largest sample distance.
std::vector<ArrowGlyph> arrowGlyphs(const std::vector<SurfacePoint>& samples, const std::vector<Vec3>& tumorPositions,
                                    const GlyphStyle& style, const DistanceParams& colors = {});

/// Procedural arrow: shaft along +v in the lower 68%, head above. The shaft
/// covers the middle third of the width.
Image8 defaultArrowTexture(int width = 32, int height = 128);

/// View-aligned quads from base to tip, textured, with tick dots.
void paintArrowGlyphs(OverlayPainter& painter, const Camera& camera, const std::vector<ArrowGlyph>& glyphs,
                      const Image8& texture);

}  // namespace vdk
