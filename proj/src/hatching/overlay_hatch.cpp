#include "vdk/hatching/overlay_hatch.hpp"

#include <cmath>
#include <queue>

#include <Eigen/Eigenvalues>

#include "vdk/core/error.hpp"
#include "vdk/render/rasterizer.hpp"

namespace vdk {

double overlayAlpha(double nDotV) {
  const double t = 1.0 - clamp01(nDotV);
  return t * t;
}

TriMesh offsetAlongNormals(const TriMesh& mesh, double distance) {
  std::vector<Vec3> v = mesh.vertices();
  const auto& n = mesh.vertexNormals();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += distance * n[i].normalized();
  return mesh.withVertices(std::move(v));
}

Vec3 principalAxis(const TriMesh& mesh) {
  const auto& V = mesh.vertices();
  if (V.empty()) return Vec3::UnitX();
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : V) mean += p;
  mean /= static_cast<double>(V.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Vec3& p : V) cov += (p - mean) * (p - mean).transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  Vec3 axis = es.eigenvectors().col(2).normalized();
  int big = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(axis[k]) > std::abs(axis[big])) big = k;
  }
  if (axis[big] < 0.0) axis = -axis;
  return axis;
}

std::vector<double> hatchCoordinate(const TriMesh& mesh) {
  const std::size_t n = mesh.vertexCount();
  const Vec3 axis = principalAxis(mesh);
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return axis.dot(mesh.vertex(a)) < axis.dot(mesh.vertex(b)); });
  using Item = std::pair<double, int>;
  for (int seed : order) {
    if (std::isfinite(dist[seed])) continue;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[seed] = 0.0;
    pq.push({0.0, seed});
    while (!pq.empty()) {
      const auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[v]) continue;
      for (int w : mesh.oneRing()[v]) {
        const double nd = d + (mesh.vertex(w) - mesh.vertex(v)).norm();
        if (nd < dist[w]) {
          dist[w] = nd;
          pq.push({nd, w});
        }
      }
    }
  }
  return dist;
}

HatchOverlay makeHatchOverlay(const TriMesh& base, const OverlayHatchParams& params) {
  HatchOverlay o;
  o.mesh = offsetAlongNormals(base, params.offset);
  o.coordinate = hatchCoordinate(base);
  return o;
}

HatchOverlay hatchOverlayFromMesh(TriMesh overlay) {
  HatchOverlay o;
  o.coordinate = hatchCoordinate(overlay);
  o.mesh = std::move(overlay);
  return o;
}

void compositeHatchOverlay(FrameBuffer& fb, const Scene& scene, const std::vector<HatchOverlay>& overlays,
                           const OverlayHatchParams& params) {
  if (overlays.empty()) throw Error(ErrorCode::MissingOverlay, "no hatch overlay supplied");
  Scene s;
  s.camera = scene.camera.withViewport(fb.width, fb.height);
  s.lights = scene.lights;
  for (const HatchOverlay& o : overlays) {
    if (o.empty()) throw Error(ErrorCode::MissingOverlay, "hatch overlay mesh is empty");
    MeshInstance inst;
    inst.name = "hatch-overlay";
    inst.mesh = std::shared_ptr<const TriMesh>(std::shared_ptr<const TriMesh>{}, &o.mesh);
    s.instances.push_back(std::move(inst));
  }
  const FrameBuffer g = rasterizeGeometry(s);
  // Hatch phase per pixel, then antialiased stripes from its screen gradient.
  ScalarImage phase(fb.width, fb.height, std::numeric_limits<double>::quiet_NaN());
  for (int y = 0; y < fb.height; ++y) {
    for (int x = 0; x < fb.width; ++x) {
      const std::size_t i = fb.index(x, y);
      if (!g.covered(i)) continue;
      const Fragment f = fragmentAt(g, s, x, y);
      const auto& coord = overlays[static_cast<std::size_t>(f.instance)].coordinate;
      phase.data[i] = f.interpolate<double>(coord) / params.spacing;
    }
  }
  for (int y = 0; y < fb.height; ++y) {
    for (int x = 0; x < fb.width; ++x) {
      const std::size_t i = fb.index(x, y);
      if (!g.covered(i) || g.viewDepth[i] > fb.viewDepth[i] + params.offset + 1e-6) continue;
      const double here = phase.data[i];
      double grad = 0.0;
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (!fb.inside(nx[k], ny[k])) continue;
        const double o = phase.at(nx[k], ny[k]);
        if (std::isfinite(o)) grad = std::max(grad, std::abs(o - here));
      }
      // Signed distance (in periods) to the stripe edge, converted to pixels.
      const double frac = here - std::floor(here);
      const double half = 0.5 * params.lineFraction;
      const double inside = half - std::abs(frac - 0.5);
      const double coverage = grad > 0.0 ? clamp01(inside / grad + 0.5) : (inside > 0.0 ? 1.0 : 0.0);
      const Vec3 view = (s.camera.position - g.position[i]).normalized();
      const double alpha = coverage * overlayAlpha(std::abs(g.worldNormal[i].dot(view)));
      Rgba& dst = fb.color[i];
      dst.head<3>() = params.ink * alpha + dst.head<3>() * (1.0 - alpha);
    }
  }
}

}  // namespace vdk
