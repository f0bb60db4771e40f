#include "vdk/render/shadow.hpp"

#include <queue>

namespace vdk {

Vec3 ShadowPlane::cellCenter(int u, int v) const {
  return origin + uAxis.normalized() * ((u + 0.5) * cellU()) + vAxis() * ((v + 0.5) * cellV());
}

ShadowPlane fitShadowPlane(const Scene& scene, const Vec3& normal, double gap, double margin, int resolution) {
  ShadowPlane plane;
  plane.normal = normal.normalized();
  Vec3 u = std::abs(plane.normal.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  u = (u - u.dot(plane.normal) * plane.normal).normalized();
  plane.uAxis = u;
  const Vec3 v = plane.vAxis();
  const BoundingBox box = scene.bounds();
  double lo = std::numeric_limits<double>::infinity();
  double minU = lo, minV = lo, maxU = -lo, maxV = -lo;
  for (const Vec3& c : box.corners()) {
    lo = std::min(lo, plane.normal.dot(c));
    minU = std::min(minU, u.dot(c));
    maxU = std::max(maxU, u.dot(c));
    minV = std::min(minV, v.dot(c));
    maxV = std::max(maxV, v.dot(c));
  }
  plane.origin = plane.normal * (lo - gap) + u * (minU - margin) + v * (minV - margin);
  plane.extentU = maxU - minU + 2.0 * margin;
  plane.extentV = maxV - minV + 2.0 * margin;
  const double cell = std::max(plane.extentU, plane.extentV) / resolution;
  plane.resolutionU = std::max(1, static_cast<int>(std::ceil(plane.extentU / cell)));
  plane.resolutionV = std::max(1, static_cast<int>(std::ceil(plane.extentV / cell)));
  plane.extentU = plane.resolutionU * cell;
  plane.extentV = plane.resolutionV * cell;
  return plane;
}

ShadowMask shadowProject(const Scene& scene, const ShadowPlane& plane) {
  ShadowMask mask;
  mask.plane = plane;
  const int W = plane.resolutionU, H = plane.resolutionV;
  mask.labels.assign(static_cast<std::size_t>(W) * H, 0);
  std::vector<double> top(mask.labels.size(), -std::numeric_limits<double>::infinity());
  const Vec3 u = plane.uAxis.normalized();
  const Vec3 v = plane.vAxis();
  bool below = false;
  for (std::size_t i = 0; i < scene.instances.size(); ++i) {
    const TriMesh& mesh = *scene.instances[i].mesh;
    std::vector<Vec3> proj(mesh.vertexCount());  // (cell u, cell v, height)
    for (std::size_t k = 0; k < mesh.vertexCount(); ++k) {
      const Vec3 d = mesh.vertices()[k] - plane.origin;
      proj[k] = Vec3(u.dot(d) / plane.cellU(), v.dot(d) / plane.cellV(), plane.normal.dot(d));
      below = below || proj[k].z() < 0.0;
    }
    for (const Face& f : mesh.faces()) {
      const Vec3 &a = proj[f[0]], &b = proj[f[1]], &c = proj[f[2]];
      const double area = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
      if (area == 0.0) continue;
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.x(), b.x(), c.x()}) - 0.5)));
      const int x1 = std::min(W - 1, static_cast<int>(std::ceil(std::max({a.x(), b.x(), c.x()}) - 0.5)));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.y(), b.y(), c.y()}) - 0.5)));
      const int y1 = std::min(H - 1, static_cast<int>(std::ceil(std::max({a.y(), b.y(), c.y()}) - 0.5)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double px = x + 0.5, py = y + 0.5;
          const double w0 = ((b.x() - px) * (c.y() - py) - (b.y() - py) * (c.x() - px)) / area;
          const double w1 = ((c.x() - px) * (a.y() - py) - (c.y() - py) * (a.x() - px)) / area;
          const double w2 = 1.0 - w0 - w1;
          if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
          const double h = w0 * a.z() + w1 * b.z() + w2 * c.z();
          const std::size_t idx = static_cast<std::size_t>(y) * W + x;
          if (h > top[idx]) {
            top[idx] = h;
            mask.labels[idx] = static_cast<int>(i) + 1;
          }
        }
      }
    }
  }
  if (below) mask.warnings.push_back("plane intersects mesh");
  return mask;
}

int ShadowMask::componentCount() const {
  const int W = plane.resolutionU, H = plane.resolutionV;
  std::vector<char> seen(labels.size(), 0);
  int count = 0;
  for (int s = 0; s < W * H; ++s) {
    if (!labels[static_cast<std::size_t>(s)] || seen[static_cast<std::size_t>(s)]) continue;
    ++count;
    std::queue<int> q;
    q.push(s);
    seen[static_cast<std::size_t>(s)] = 1;
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      const int cx = c % W, cy = c / W;
      const int nb[4][2] = {{cx - 1, cy}, {cx + 1, cy}, {cx, cy - 1}, {cx, cy + 1}};
      for (const auto& n : nb) {
        if (n[0] < 0 || n[1] < 0 || n[0] >= W || n[1] >= H) continue;
        const int ni = n[1] * W + n[0];
        if (!labels[static_cast<std::size_t>(ni)] || seen[static_cast<std::size_t>(ni)]) continue;
        seen[static_cast<std::size_t>(ni)] = 1;
        q.push(ni);
      }
    }
  }
  return count;
}

}  // namespace vdk
