#include "vdk/glyphs/supporting.hpp"

#include <cmath>
#include <map>
#include <unordered_set>

#include "vdk/core/error.hpp"
#include "vdk/render/rasterizer.hpp"
#include "vdk/shading/shading.hpp"

namespace vdk {

AnchorSet makeAnchorSet(const TriMesh& mesh, const std::vector<int>& vertices) {
  AnchorSet set;
  std::unordered_set<int> seen;
  for (int v : vertices) {
    if (v < 0 || v >= static_cast<int>(mesh.vertexCount())) {
      throw Error(ErrorCode::InvalidArgument, "anchor vertex " + std::to_string(v) + " out of range");
    }
    if (!seen.insert(v).second) continue;
    set.anchorVertices.push_back(v);
    set.worldPositions.push_back(mesh.vertex(v));
  }
  return set;
}

std::vector<SupportingLine> supportingLines(const ShadowPlane& plane, const std::vector<Vec3>& selections) {
  const Vec3 n = plane.normal.normalized();
  std::vector<SupportingLine> lines;
  lines.reserve(selections.size());
  for (std::size_t i = 0; i < selections.size(); ++i) {
    const Vec3& p = selections[i];
    const double h = n.dot(p - plane.origin);
    if (h < 0.0) {
      throw Error(ErrorCode::SelectionBelowPlane, "selection " + std::to_string(i) + " lies below the shadow plane");
    }
    lines.push_back({p, p - h * n, h});
  }
  return lines;
}

Vec3 AnchorCylinder::surfacePoint(double angle, double depth) const {
  return axisPoint(depth) + radius * (std::cos(angle) * right + std::sin(angle) * up);
}

AnchorCylinder fitAnchorCylinder(const Scene& scene, double radiusFactor) {
  const BoundingBox box = scene.bounds();
  if (box.empty()) throw Error(ErrorCode::EmptyScene, "anchor cylinder needs scene geometry");
  AnchorCylinder c;
  c.origin = scene.camera.position;
  c.axis = scene.camera.forward();
  c.right = scene.camera.right();
  c.up = scene.camera.trueUp();
  c.radius = radiusFactor * 0.5 * box.extent().norm();
  const auto [lo, hi] = viewDepthRange(scene.camera, box);
  c.nearDepth = std::max(lo, scene.camera.nearPlane);
  c.farDepth = std::min(hi, scene.camera.farPlane);
  if (!(c.farDepth > c.nearDepth) || !(c.radius > 0.0)) {
    throw Error(ErrorCode::DegenerateGeometry, "anchor cylinder has no extent");
  }
  return c;
}

TriMesh anchorCylinderMesh(const AnchorCylinder& c, int segments, int rings) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  for (int r = 0; r < rings; ++r) {
    const double depth = c.nearDepth + (c.farDepth - c.nearDepth) * r / (rings - 1);
    for (int s = 0; s < segments; ++s) v.push_back(c.surfacePoint(2.0 * kPi * s / segments, depth));
  }
  for (int r = 0; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      const int a = r * segments + s, b = r * segments + (s + 1) % segments;
      f.push_back({a, b, b + segments});
      f.push_back({a, b + segments, a + segments});
    }
  }
  return TriMesh(std::move(v), std::move(f));
}

std::vector<std::size_t> thinByAngle(const std::vector<double>& angles, const std::vector<double>& depths,
                                     double binDegrees) {
  if (!(binDegrees > 0.0)) throw Error(ErrorCode::InvalidArgument, "binDegrees must be positive");
  std::map<long long, std::size_t> best;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const long long bin = static_cast<long long>(std::floor(radToDeg(angles[i]) / binDegrees));
    auto it = best.find(bin);
    if (it == best.end() || depths[i] < depths[it->second]) best[bin] = i;
  }
  std::vector<std::size_t> kept;
  for (const auto& [bin, i] : best) kept.push_back(i);
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<SupportingAnchor> supportingAnchors(const AnchorCylinder& c, const AnchorSet& anchors,
                                                const AnchorOptions& options) {
  std::vector<SupportingAnchor> all;
  std::vector<double> angles, depths;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    SupportingAnchor a;
    a.vertex = i < anchors.anchorVertices.size() ? anchors.anchorVertices[i] : -1;
    a.position = anchors.worldPositions[i];
    const Vec3 rel = a.position - c.origin;
    a.depth = c.axis.dot(rel);
    const double x = c.right.dot(rel), y = c.up.dot(rel);
    double angle = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
    if (angle < 0.0) angle += 2.0 * kPi;
    a.angle = angle;
    double footDepth = a.depth;
    if (footDepth < c.nearDepth || footDepth > c.farDepth) {
      footDepth = std::clamp(footDepth, c.nearDepth, c.farDepth);
      a.clamped = true;
    }
    a.foot = c.surfacePoint(angle, footDepth);
    const double half = 0.5 * degToRad(options.arcDegrees);
    const int n = std::max(1, options.arcSegments);
    for (int k = 0; k <= n; ++k) a.arc.push_back(c.surfacePoint(angle - half + 2.0 * half * k / n, footDepth));
    angles.push_back(a.angle);
    depths.push_back(a.depth);
    all.push_back(std::move(a));
  }
  if (!options.thin) return all;
  std::vector<SupportingAnchor> kept;
  for (std::size_t i : thinByAngle(angles, depths, options.binDegrees)) kept.push_back(all[i]);
  return kept;
}

void paintAnchorCylinder(FrameBuffer& fb, const Camera& camera, const AnchorCylinder& cylinder,
                         const CylinderStyle& style) {
  Scene s;
  s.camera = camera.withViewport(fb.width, fb.height);
  MeshInstance inst;
  inst.name = "anchor-cylinder";
  inst.mesh = std::make_shared<const TriMesh>(anchorCylinderMesh(cylinder));
  inst.role = MeshRole::Organ;
  s.instances.push_back(std::move(inst));
  const FrameBuffer g = rasterizeGeometry(s);
  const double span = cylinder.farDepth - cylinder.nearDepth;
  ScalarImage u(fb.width, fb.height, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.covered(i)) u.data[i] = (g.viewDepth[i] - cylinder.nearDepth) / span;
  }
  for (int y = 0; y < fb.height; ++y) {
    for (int x = 0; x < fb.width; ++x) {
      const std::size_t i = fb.index(x, y);
      if (!g.covered(i) || g.viewDepth[i] >= fb.viewDepth[i]) continue;
      const double t = clamp01(u.data[i]);
      Rgb c = style.color * (0.6 + 0.4 * g.illum[i]);
      double alpha = style.opacity * fogAlpha(t, style.fogFalloff);
      if (style.isolineCount > 0) {
        double grad = 0.0;
        const double here = u.data[i];
        const int nx[4] = {x - 1, x + 1, x, x};
        const int ny[4] = {y, y, y - 1, y + 1};
        for (int k = 0; k < 4; ++k) {
          if (!fb.inside(nx[k], ny[k])) continue;
          const double o = u.at(nx[k], ny[k]);
          if (std::isfinite(o)) grad = std::max(grad, std::abs(o - here));
        }
        const double v = here * style.isolineCount;
        const double frac = std::abs(v - std::round(v));
        if (grad > 0.0 && frac / (grad * style.isolineCount) < 0.5 * style.isolineWidthPx) {
          c = style.isolineColor;
          alpha = std::max(alpha, std::min(1.0, 2.0 * style.opacity) * fogAlpha(t, 0.5 * style.fogFalloff));
        }
      }
      Rgba& dst = fb.color[i];
      dst.head<3>() = c * alpha + dst.head<3>() * (1.0 - alpha);
    }
  }
}

void paintSupportingAnchors(OverlayPainter& painter, const std::vector<SupportingAnchor>& anchors, const Rgb& color,
                            double widthPx) {
  const Rgba c(color.x(), color.y(), color.z(), 1.0);
  OverlayOptions opt;
  opt.depthBias = 0.5;
  for (const auto& a : anchors) {
    painter.line(a.position, a.foot, widthPx, c, opt);
    for (std::size_t k = 0; k + 1 < a.arc.size(); ++k) painter.line(a.arc[k], a.arc[k + 1], 2.0 * widthPx, c, opt);
    painter.disc(a.position, 1.5 * widthPx, c, opt);
  }
}

void paintSupportingLines(OverlayPainter& painter, const std::vector<SupportingLine>& lines, const Rgb& color,
                          double widthPx) {
  const Rgba c(color.x(), color.y(), color.z(), 1.0);
  OverlayOptions opt;
  opt.depthBias = 0.5;
  for (const auto& l : lines) {
    painter.line(l.point, l.foot, widthPx, c, opt);
    painter.disc(l.foot, 2.0 * widthPx, c, opt);
    painter.disc(l.point, 1.5 * widthPx, c, opt);
  }
}

}  // namespace vdk
