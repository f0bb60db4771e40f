#pragma once

#include <vector>

#include "vdk/core/types.hpp"

namespace vdk {

/// Unit vectors at a surface point: normal, direction to the viewer and
/// direction to the light.
struct SurfaceSample {
  Vec3 normal = Vec3::UnitZ();
  Vec3 view = Vec3::UnitZ();
  Vec3 light = Vec3::UnitZ();
};

struct ShadingParams {
  Rgb baseColor{0.75, 0.12, 0.1};
  double shininess = 32.0;
  Rgb specularColor{0.6, 0.6, 0.6};
  Rgb ambientColor{0.08, 0.02, 0.02};
  int toonBands = 3;
  Rgb rimColor{1.0, 1.0, 1.0};
  double rimAmount = 0.7;
  double rimThreshold = 0.1;
  double fresnelExponent = 3.0;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

/// Mirror of the light direction about the normal: 2(N.L)N - L.
Vec3 reflectLight(const Vec3& n, const Vec3& l);

/// ambient + base*max(0,N.L) + specular*max(0,R.V)^shininess.
Rgb phong(const SurfaceSample& s, const ShadingParams& p);

/// Quantized diffuse level clamp(floor(i*bands)/(bands-1), 0, 1).
double toonLevel(double intensity, int bands);
/// ambient + base*level + specular (on when max(0,R.V)^shininess >
/// rimThreshold) + rimColor (where 1 - N.V > rimAmount).
Rgb toon(const SurfaceSample& s, const ShadingParams& p);

/// (1 - max(0, N.V))^exponent.
double fresnelWeight(const SurfaceSample& s, double exponent);
/// lerp(base*max(0,N.L), rimColor, w).
Rgb fresnel(const SurfaceSample& s, const ShadingParams& p);

struct DistanceParams {
  std::vector<Vec3> tumorPositions;
  double heatRadius = 30.0;
  Rgb heatColor{1.0, 0.0, 0.0};
  double isolineRadius = 40.0;
  int isolineCount = 4;
  double isolineThickness = 1.5;
  double fogFalloff = 2.0;
  Rgb pcdNearColor{1.0, 0.0, 0.0};
  Rgb pcdFarColor{0.0, 0.0, 1.0};

  void validate() const;
};

/// Euclidean distance to the nearest tumor position. Throws NoTumor.
double tumorDistance(const Vec3& p, const std::vector<Vec3>& tumors);

/// Surface colour outside heatRadius, lerp(heatColor, surface, d/R) inside.
Rgb heatmap(double distance, const Rgb& surface, const DistanceParams& p);
Rgb heatmap(const Vec3& position, const Rgb& surface, const DistanceParams& p);

/// Band k (1-based) is centred on k*R/count; odd bands use the full
/// thickness, even bands half. Returns the band index or 0.
int isolineBand(double distance, const DistanceParams& p);
/// Black on a band, otherwise the surface colour.
Rgb isolines(double distance, const Rgb& surface, const DistanceParams& p);
Rgb isolines(const Vec3& position, const Rgb& surface, const DistanceParams& p);

/// (viewDepth - lo) / (hi - lo), clamped; 0 when the range is empty.
double normalizedDepth(double viewDepth, double lo, double hi);

/// Unshaded ramp lerp(near, far, t).
Rgb pcdRamp(double t, const DistanceParams& p);
/// Ramp modulated by 0.5 + 0.5*diffuse.
Rgb pseudoChromadepth(double t, double diffuse, const DistanceParams& p);

/// (1 - t)^falloff.
double fogAlpha(double t, double falloff);

}  // namespace vdk
