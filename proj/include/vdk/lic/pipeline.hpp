#pragma once

#include "vdk/lic/lut.hpp"
#include "vdk/lic/post.hpp"
#include "vdk/render/scene.hpp"

namespace vdk {

enum class LicFieldSource { IlluminationGradient, Curvature };

/// Stage switches. With everything but `noise` off the output is the
/// modulated noise image.
struct LicStages {
  bool ssao = true;
  bool gradient = true;
  bool lut = true;
  bool noise = true;
  bool lic = true;
  bool edges = true;
  bool composite = true;  ///< colour with the surface and blend over the base render
};

struct LicParams {
  LicFieldSource field = LicFieldSource::IlluminationGradient;
  bool rotateGradient = true;
  int ssaoSamples = 16;
  double ssaoRadiusFraction = 0.05;  ///< of the scene bounding-sphere radius
  int halfLength = 15;               ///< px
  double depthEdge = 0.01;           ///< of the scene view-depth range
  double normalEdgeDeg = 30.0;
  double noiseCell = 0.0;            ///< mm; 0 = one pixel at the scene centre
  double ambient = 0.15;
  double licContrast = 3.0;          ///< gain of the convolved texture about its diffuse mean
  double baseBlend = 0.25;           ///< weight of the shaded base render
  Lut2D lut;                         ///< required when stages.lut is on
  LicStages stages;

  void validate() const;
};

struct PostBuffers {
  ScalarImage ssao;
  VectorImage illumGradient;
  VectorImage field;            ///< field fed to the convolution
  ScalarImage igMagnitude;      ///< |IG| over its 95th percentile, clamped to [0, 1]
  LutImage lut;
  ScalarImage noise;
  BinaryImage edgeMask;
  ScalarImage lic;
};

struct LicResult {
  FrameBuffer frame;
  PostBuffers buffers;
};

/// SSAO -> illumination gradient -> LUT -> modulated noise -> LIC with edge
/// masking, composited over a Phong base render. Deterministic for a fixed
/// scene seed. Throws LUTMissing when the LUT stage is on without a table.
LicResult licPipeline(const Scene& scene, const LicParams& params);

}  // namespace vdk
