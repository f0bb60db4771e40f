#include "vdk/shading/shading.hpp"

#include "vdk/core/error.hpp"

namespace vdk {
namespace {

void require(bool ok, const char* message) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, message);
}

}  // namespace

void ShadingParams::validate() const {
  require(shininess > 0.0, "shininess must be > 0");
  require(toonBands >= 2, "toonBands must be >= 2");
  require(fresnelExponent > 0.0, "fresnelExponent must be > 0");
}

void DistanceParams::validate() const {
  require(heatRadius > 0.0, "heatRadius must be > 0");
  require(isolineCount >= 1, "isolineCount must be >= 1");
  require(isolineRadius > 0.0, "isolineRadius must be > 0");
  require(isolineThickness > 0.0 && isolineThickness < isolineRadius / isolineCount,
          "isolineThickness must be in (0, isolineRadius/isolineCount)");
  require(fogFalloff > 0.0, "fogFalloff must be > 0");
}

Vec3 reflectLight(const Vec3& n, const Vec3& l) { return 2.0 * n.dot(l) * n - l; }

Rgb phong(const SurfaceSample& s, const ShadingParams& p) {
  const double diffuse = std::max(0.0, s.normal.dot(s.light));
  const double spec = std::pow(std::max(0.0, reflectLight(s.normal, s.light).dot(s.view)), p.shininess);
  return p.ambientColor + p.baseColor * diffuse + p.specularColor * spec;
}

double toonLevel(double intensity, int bands) {
  return clamp01(std::floor(intensity * bands) / (bands - 1));
}

Rgb toon(const SurfaceSample& s, const ShadingParams& p) {
  const double level = toonLevel(std::max(0.0, s.normal.dot(s.light)), p.toonBands);
  const double spec = std::pow(std::max(0.0, reflectLight(s.normal, s.light).dot(s.view)), p.shininess);
  Rgb c = p.ambientColor + p.baseColor * level;
  if (spec > p.rimThreshold) c += p.specularColor;
  if (1.0 - s.normal.dot(s.view) > p.rimAmount) c += p.rimColor;
  return c;
}

double fresnelWeight(const SurfaceSample& s, double exponent) {
  return std::pow(1.0 - std::max(0.0, s.normal.dot(s.view)), exponent);
}

Rgb fresnel(const SurfaceSample& s, const ShadingParams& p) {
  const Rgb base = p.baseColor * std::max(0.0, s.normal.dot(s.light));
  return lerp(base, p.rimColor, fresnelWeight(s, p.fresnelExponent));
}

double tumorDistance(const Vec3& point, const std::vector<Vec3>& tumors) {
  if (tumors.empty()) throw Error(ErrorCode::NoTumor, "no tumor positions");
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& t : tumors) best = std::min(best, (point - t).norm());
  return best;
}

Rgb heatmap(double distance, const Rgb& surface, const DistanceParams& p) {
  if (distance >= p.heatRadius) return surface;
  return lerp(p.heatColor, surface, distance / p.heatRadius);
}

Rgb heatmap(const Vec3& position, const Rgb& surface, const DistanceParams& p) {
  return heatmap(tumorDistance(position, p.tumorPositions), surface, p);
}

int isolineBand(double distance, const DistanceParams& p) {
  for (int k = 1; k <= p.isolineCount; ++k) {
    const double center = k * p.isolineRadius / p.isolineCount;
    const double thickness = (k % 2 == 1) ? p.isolineThickness : 0.5 * p.isolineThickness;
    if (std::abs(distance - center) < 0.5 * thickness) return k;
  }
  return 0;
}

Rgb isolines(double distance, const Rgb& surface, const DistanceParams& p) {
  return isolineBand(distance, p) ? Rgb::Zero() : surface;
}

Rgb isolines(const Vec3& position, const Rgb& surface, const DistanceParams& p) {
  return isolines(tumorDistance(position, p.tumorPositions), surface, p);
}

double normalizedDepth(double viewDepth, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  return clamp01((viewDepth - lo) / (hi - lo));
}

Rgb pcdRamp(double t, const DistanceParams& p) { return lerp(p.pcdNearColor, p.pcdFarColor, t); }

Rgb pseudoChromadepth(double t, double diffuse, const DistanceParams& p) {
  return pcdRamp(t, p) * (0.5 + 0.5 * diffuse);
}

double fogAlpha(double t, double falloff) { return std::pow(1.0 - t, falloff); }

}  // namespace vdk
