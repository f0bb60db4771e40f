#include "vdk/lic/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "vdk/core/error.hpp"
#include "vdk/mesh/geometry.hpp"
#include "vdk/render/rasterizer.hpp"
#include "vdk/shading/shading.hpp"

namespace vdk {

void LicParams::validate() const {
  if (ssaoSamples < 0) throw Error(ErrorCode::InvalidArgument, "ssaoSamples must be >= 0");
  if (!(ssaoRadiusFraction >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ssaoRadiusFraction must be >= 0");
  if (halfLength < 0) throw Error(ErrorCode::InvalidArgument, "halfLength must be >= 0");
  if (!(depthEdge > 0.0)) throw Error(ErrorCode::InvalidArgument, "depthEdge must be positive");
  if (!(noiseCell >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noiseCell must be >= 0");
  if (!(ambient >= 0.0 && ambient <= 1.0)) throw Error(ErrorCode::InvalidArgument, "ambient must be in [0, 1]");
  if (!(licContrast >= 0.0)) throw Error(ErrorCode::InvalidArgument, "licContrast must be >= 0");
  if (!(baseBlend >= 0.0 && baseBlend <= 1.0)) throw Error(ErrorCode::InvalidArgument, "baseBlend must be in [0, 1]");
}

namespace {

ScalarImage normalizedMagnitude(const VectorImage& field, const FrameBuffer& fb) {
  ScalarImage m = magnitude(field);
  std::vector<double> values;
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    if (fb.covered(i) && m.data[i] > 0.0) values.push_back(m.data[i]);
  }
  if (values.empty()) return m;
  const auto k = static_cast<std::ptrdiff_t>(0.95 * (values.size() - 1));
  std::nth_element(values.begin(), values.begin() + k, values.end());
  const double scale = values[static_cast<std::size_t>(k)];
  for (double& v : m.data) v = clamp01(v / scale);
  return m;
}

double luminance(const Rgb& c) { return 0.2126 * c.x() + 0.7152 * c.y() + 0.0722 * c.z(); }

}  // namespace

LicResult licPipeline(const Scene& scene, const LicParams& params) {
  params.validate();
  const LicStages& st = params.stages;
  if (st.lut && params.lut.values.empty()) throw Error(ErrorCode::LUTMissing, "lic pipeline needs a lut");
  LicResult r;
  r.frame = rasterizeGeometry(scene);
  FrameBuffer& fb = r.frame;
  PostBuffers& b = r.buffers;
  const Camera cam = scene.camera.withViewport(fb.width, fb.height);
  const BoundingBox box = scene.bounds();
  const double sphere = 0.5 * box.extent().norm();
  const auto [nearDepth, farDepth] = viewDepthRange(cam, box);

  b.ssao = st.ssao ? computeSsao(fb, cam, params.ssaoRadiusFraction * sphere, params.ssaoSamples, scene.seed)
                   : ScalarImage(fb.width, fb.height, 0.0);
  b.illumGradient = st.gradient ? illuminationGradient(fb, params.rotateGradient) : VectorImage(fb.width, fb.height);
  b.igMagnitude = normalizedMagnitude(b.illumGradient, fb);
  if (params.field == LicFieldSource::Curvature) {
    std::vector<std::vector<Vec3>> dirs;
    for (const MeshInstance& inst : scene.instances) dirs.push_back(estimateCurvature(*inst.mesh).dir1);
    b.field = projectDirectionField(fb, scene, dirs);
  } else {
    b.field = b.illumGradient;
  }
  b.lut = applyLut(b.ssao, b.igMagnitude, st.lut ? params.lut : neutralLut());
  if (st.noise) {
    const double centreDepth = std::max(cam.nearPlane, cam.toView(box.center()).z());
    const double cell = params.noiseCell > 0.0 ? params.noiseCell : 2.0 * cam.tanHalfFov() * centreDepth / fb.height;
    b.noise = modulatedNoise(fb, scene.seed, cell);
  } else {
    b.noise = ScalarImage(fb.width, fb.height, 0.0);
    for (std::size_t i = 0; i < fb.size(); ++i) b.noise.data[i] = 0.5 * fb.illum[i];
  }
  if (st.edges) b.edgeMask = detectEdges(fb, std::max(1e-9, farDepth - nearDepth), params.depthEdge, params.normalEdgeDeg);
  b.lic = st.lic ? licConvolve(b.noise, b.field, params.halfLength, b.edgeMask) : b.noise;

  if (!st.composite) {
    for (std::size_t i = 0; i < fb.size(); ++i) {
      const double t = b.lic.data[i];
      fb.color[i] = Rgba(t, t, t, 1.0);
    }
    return r;
  }
  const Vec3 light = scene.keyLightDirection();
  shadeFrameBuffer(fb, scene, [&](const Fragment& f) {
    const std::size_t i = fb.index(f.x, f.y);
    ShadingParams sp;
    sp.baseColor = f.mesh->color;
    sp.ambientColor = 0.1 * f.mesh->color;
    const Rgb base = phong(SurfaceSample{f.normal, f.viewDir, light}, sp);
    // Convolved noise averages toward half the diffuse term; stretch about it.
    const double mean = 0.5 * fb.illum[i];
    const double t = clamp01(2.0 * (mean + params.licContrast * (b.lic.data[i] - mean)));
    const Rgb textured = f.mesh->color * (params.ambient + (1.0 - params.ambient) * t);
    const Rgba& lut = b.lut.data[i];
    const Rgb grey = Rgb::Constant(luminance(textured));
    const Rgb c = lut.head<3>().cwiseProduct(lerp(textured, grey, clamp01(lut.w())));
    return withAlpha(lerp(c, base, params.baseBlend), 1.0);
  });
  return r;
}

}  // namespace vdk
