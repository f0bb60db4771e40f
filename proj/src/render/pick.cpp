#include "vdk/render/pick.hpp"

namespace vdk {

std::optional<Vec3> intersectTriangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                                      const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-300) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = origin - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = dir.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (!(t > 0.0)) return std::nullopt;
  return Vec3(t, u, v);
}

std::optional<PickResult> pick(const Scene& scene, int x, int y) {
  const Camera& cam = scene.camera;
  if (x < 0 || y < 0 || x >= cam.width || y >= cam.height) return std::nullopt;
  const Vec3 origin = cam.position;
  const Vec3 dir = cam.pixelRay(x, y);
  const double cosAxis = dir.dot(cam.forward());
  std::optional<PickResult> best;
  double bestT = std::numeric_limits<double>::infinity();
  Vec3 bestUv = Vec3::Zero();
  for (std::size_t i = 0; i < scene.instances.size(); ++i) {
    const TriMesh& mesh = *scene.instances[i].mesh;
    const auto& F = mesh.faces();
    for (std::size_t f = 0; f < F.size(); ++f) {
      const auto hit = intersectTriangle(origin, dir, mesh.vertex(F[f][0]), mesh.vertex(F[f][1]), mesh.vertex(F[f][2]));
      if (!hit) continue;
      const double t = hit->x();
      const double viewDepth = t * cosAxis;
      if (viewDepth < cam.nearPlane || viewDepth > cam.farPlane) continue;
      if (t < bestT) {
        bestT = t;
        bestUv = *hit;
        best = PickResult{static_cast<int>(i), static_cast<int>(f), -1, Vec3::Zero(), 1.0, t};
      }
    }
  }
  if (!best) return best;
  const TriMesh& mesh = *scene.instances[static_cast<std::size_t>(best->instance)].mesh;
  const Face& f = mesh.faces()[static_cast<std::size_t>(best->face)];
  const double u = bestUv.y(), v = bestUv.z();
  best->worldPosition = mesh.vertex(f[0]) * (1.0 - u - v) + mesh.vertex(f[1]) * u + mesh.vertex(f[2]) * v;
  best->depth = cam.linearDepth(bestT * cosAxis);
  double nearest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double d = (mesh.vertex(f[k]) - best->worldPosition).squaredNorm();
    if (d < nearest) {
      nearest = d;
      best->vertexIndex = f[k];
    }
  }
  return best;
}

}  // namespace vdk
