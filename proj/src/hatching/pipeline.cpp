#include "vdk/hatching/pipeline.hpp"

#include <cmath>

#include "vdk/core/hash.hpp"
#include "vdk/mesh/geometry.hpp"
#include "vdk/render/rasterizer.hpp"

namespace vdk {

ScreenCrossField projectCrossField(const FrameBuffer& geometry, const Scene& scene,
                                   const std::vector<const CrossField*>& fields) {
  const Camera cam = scene.camera.withViewport(geometry.width, geometry.height);
  ScreenCrossField out(geometry.width, geometry.height);
  for (int y = 0; y < geometry.height; ++y) {
    for (int x = 0; x < geometry.width; ++x) {
      const std::size_t i = geometry.index(x, y);
      if (!geometry.covered(i)) continue;
      const int inst = geometry.objectMask[i];
      const CrossField* cf = fields[static_cast<std::size_t>(inst)];
      if (!cf) continue;
      const TriMesh& mesh = *scene.instances[static_cast<std::size_t>(inst)].mesh;
      const Face& f = mesh.faces()[static_cast<std::size_t>(geometry.face[i])];
      const Vec3& p = geometry.position[i];
      const Vec3 ps = cam.project(p);
      const double eps = 1e-3 * std::max(1.0, ps.z());
      // Family directions are lines (sign free): align to the first valid
      // vertex, blend, and keep that branch so one stroke family is traced.
      Vec2 sum = Vec2::Zero(), ref = Vec2::Zero();
      for (int k = 0; k < 3; ++k) {
        const Vec3 q = cam.project(p + eps * cf->familyDirection(f[k]));
        Vec2 d(q.x() - ps.x(), q.y() - ps.y());
        if (d.squaredNorm() < 1e-24) continue;
        d.normalize();
        if (ref.squaredNorm() == 0.0) ref = d;
        if (d.dot(ref) < 0.0) d = -d;
        sum += geometry.bary[i][k] * d;
      }
      if (sum.squaredNorm() < 1e-24) continue;
      out.angle[i] = std::atan2(sum.y(), sum.x());
      out.mask[i] = 1;
    }
  }
  return out;
}

void drawStrokes(FrameBuffer& fb, const std::vector<std::vector<Vec2>>& strokes, const std::vector<double>& widths,
                 const Rgb& ink, const std::vector<bool>& closed) {
  std::vector<double> dist(fb.size(), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> touched;
  for (std::size_t s = 0; s < strokes.size(); ++s) {
    const auto& pts = strokes[s];
    if (pts.empty()) continue;
    const double r = 0.5 * widths[s];
    const bool loop = s < closed.size() && closed[s];
    const std::size_t segs = pts.size() == 1 ? 1 : (loop ? pts.size() : pts.size() - 1);
    for (std::size_t k = 0; k < segs; ++k) {
      const Vec2 a = pts[k], b = pts.size() == 1 ? pts[0] : pts[(k + 1) % pts.size()];
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x(), b.x()) - r - 1)));
      const int x1 = std::min(fb.width - 1, static_cast<int>(std::ceil(std::max(a.x(), b.x()) + r + 1)));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y(), b.y()) - r - 1)));
      const int y1 = std::min(fb.height - 1, static_cast<int>(std::ceil(std::max(a.y(), b.y()) + r + 1)));
      const Vec2 ab = b - a;
      const double len2 = ab.squaredNorm();
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const Vec2 p(x + 0.5, y + 0.5);
          const double t = len2 > 0.0 ? clamp01((p - a).dot(ab) / len2) : 0.0;
          const double d = (a + t * ab - p).norm();
          const std::size_t i = fb.index(x, y);
          if (d < dist[i]) {
            if (!std::isfinite(dist[i])) touched.push_back(i);
            dist[i] = d;
          }
        }
      }
    }
    for (std::size_t i : touched) {
      const double cover = clamp01(r + 0.5 - dist[i]);
      if (cover > 0.0) fb.color[i].head<3>() = ink * cover + fb.color[i].head<3>() * (1.0 - cover);
      dist[i] = std::numeric_limits<double>::infinity();
    }
    touched.clear();
  }
}

const CrossField& HatchPipeline::crossField(const TriMesh& mesh) {
  const std::string h = meshHash(mesh);
  auto it = fields_.find(h);
  if (it == fields_.end()) {
    auto cf = std::make_unique<CrossField>(optimizeCrossField(mesh, estimateCurvature(mesh), params_.crossField));
    it = fields_.emplace(h, std::move(cf)).first;
  }
  return *it->second;
}

std::string HatchPipeline::cacheKey(const Scene& scene) const {
  ByteWriter w;
  const Camera& c = scene.camera;
  for (const Vec3& v : {c.position, c.lookAt, c.up}) {
    for (int k = 0; k < 3; ++k) w.f64(v[k]);
  }
  w.f64(c.verticalFov);
  w.f64(c.nearPlane);
  w.f64(c.farPlane);
  w.u32(static_cast<std::uint32_t>(c.width));
  w.u32(static_cast<std::uint32_t>(c.height));
  const Vec3 light = scene.keyLightDirection();
  for (int k = 0; k < 3; ++k) w.f64(light[k]);
  for (const MeshInstance& inst : scene.instances) w.bytes(meshHash(*inst.mesh));
  const HatchParams& p = params_;
  for (double v : {p.streamlines.dSep, p.streamlines.dTestRatio, p.streamlines.step, p.streamlines.maxLength,
                   p.streamlines.minLength, p.streamlines.baseWidth, p.prune.baseWidth, p.prune.minWidth,
                   p.prune.adjacencyRadius, p.prune.keepBelowTone, p.crossField.lambda, p.crossHatchTone,
                   p.contourWidth, p.toneScale, p.contours.depthTolerance, p.contours.sampleSpacingPx}) {
    w.f64(v);
  }
  w.u64(p.streamlines.seed);
  w.u32(p.crossHatch ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(p.crossField.solver.maxIterations));
  for (int k = 0; k < 3; ++k) {
    w.f64(p.ink[k]);
    w.f64(p.paper[k]);
  }
  return sha256Hex(w.data());
}

const FrameBuffer& HatchPipeline::render(const Scene& scene) {
  const std::string key = cacheKey(scene);
  if (key == key_ && recomputes_ > 0) return frame_;
  ++recomputes_;

  FrameBuffer fb = rasterizeGeometry(scene);
  std::vector<const CrossField*> fields;
  for (const MeshInstance& inst : scene.instances) fields.push_back(&crossField(*inst.mesh));
  const ScreenCrossField field = projectCrossField(fb, scene, fields);

  ScalarImage tone(fb.width, fb.height, 1.0);
  for (std::size_t i = 0; i < fb.size(); ++i) {
    if (fb.covered(i)) tone.data[i] = clamp01(params_.toneScale * fb.illum[i]);
  }

  HatchSet hatches;
  bool anyMask = false;
  for (auto m : field.mask) anyMask = anyMask || m;
  if (anyMask) {
    hatches = pruneHatchesByTone(evenlySpacedStreamlines(field, params_.streamlines), tone, params_.prune);
    if (params_.crossHatch && params_.crossHatchTone > 0.0) {
      ScreenCrossField dark = field.rotated(0.5 * kPi);
      ScalarImage crossTone(fb.width, fb.height, 1.0);
      bool anyDark = false;
      for (std::size_t i = 0; i < dark.mask.size(); ++i) {
        if (dark.mask[i] && tone.data[i] < params_.crossHatchTone) {
          crossTone.data[i] = tone.data[i] / params_.crossHatchTone;
          anyDark = true;
        } else {
          dark.mask[i] = 0;
        }
      }
      if (anyDark) {
        StreamlineOptions o = params_.streamlines;
        o.level = HatchLevel::CrossHatch;
        hatches.append(pruneHatchesByTone(evenlySpacedStreamlines(dark, o), crossTone, params_.prune));
      }
    }
  }
  contours_ = extractContours(scene, fb, params_.contours);

  for (Rgba& c : fb.color) c = Rgba(params_.paper.x(), params_.paper.y(), params_.paper.z(), 1.0);
  drawStrokes(fb, hatches.strokes, hatches.widths, params_.ink);
  std::vector<std::vector<Vec2>> lines;
  std::vector<bool> closed;
  for (const auto& c : contours_) {
    lines.push_back(c.screen);
    closed.push_back(c.closed);
  }
  drawStrokes(fb, lines, std::vector<double>(lines.size(), params_.contourWidth), params_.ink, closed);

  hatches_ = std::move(hatches);
  frame_ = std::move(fb);
  key_ = key;
  return frame_;
}

}  // namespace vdk
