#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vdk/hatching/contours.hpp"
#include "vdk/hatching/cross_field.hpp"
#include "vdk/hatching/streamlines.hpp"
#include "vdk/render/scene.hpp"

namespace vdk {

struct HatchParams {
  StreamlineOptions streamlines;
  PruneOptions prune;
  CrossFieldOptions crossField;
  ContourOptions contours;
  bool crossHatch = true;
  double crossHatchTone = 0.4;  ///< cross-hatch where tone is below this
  double contourWidth = 2.0;    ///< px
  double toneScale = 0.8;       ///< tone = toneScale * diffuse
  Rgb ink{0.05, 0.05, 0.05};
  Rgb paper{1.0, 1.0, 1.0};
};

/// Screen-space cross field of the covered pixels: vertex cross directions
/// family directions projected at the fragment and blended as lines.
ScreenCrossField projectCrossField(const FrameBuffer& geometry, const Scene& scene,
                                   const std::vector<const CrossField*>& fields);

/// Draws polylines with antialiased round caps; each stroke blends once
/// per pixel.
void drawStrokes(FrameBuffer& fb, const std::vector<std::vector<Vec2>>& strokes, const std::vector<double>& widths,
                 const Rgb& ink, const std::vector<bool>& closed = {});

/// Contours + cross-field streamlines + tone pruning over white paper.
/// Results are cached by (mesh hashes, camera, lights, parameters); only a
/// change of any of those recomputes.
class HatchPipeline {
 public:
  explicit HatchPipeline(HatchParams params = {}) : params_(std::move(params)) {}

  const FrameBuffer& render(const Scene& scene);
  std::string cacheKey(const Scene& scene) const;

  int recomputeCount() const { return recomputes_; }
  const HatchSet& hatches() const { return hatches_; }
  const std::vector<ContourPolyline>& contours() const { return contours_; }
  const HatchParams& params() const { return params_; }
  void setParams(HatchParams params) { params_ = std::move(params); }

  /// Cross field for a mesh, computed once per mesh hash.
  const CrossField& crossField(const TriMesh& mesh);

 private:
  HatchParams params_;
  std::map<std::string, std::unique_ptr<CrossField>> fields_;
  std::string key_;
  FrameBuffer frame_;
  HatchSet hatches_;
  std::vector<ContourPolyline> contours_;
  int recomputes_ = 0;
};

}  // namespace vdk
