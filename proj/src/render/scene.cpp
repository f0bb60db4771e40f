#include "vdk/render/scene.hpp"

#include "vdk/core/error.hpp"

namespace vdk {

std::string toString(MeshRole role) {
  switch (role) {
    case MeshRole::Vessel: return "vessel";
    case MeshRole::Tumor: return "tumor";
    case MeshRole::Organ: return "organ";
  }
  return "vessel";
}

MeshRole meshRoleFromString(const std::string& name) {
  if (name == "vessel") return MeshRole::Vessel;
  if (name == "tumor") return MeshRole::Tumor;
  if (name == "organ") return MeshRole::Organ;
  throw Error(ErrorCode::InvalidArgument, "unknown mesh role '" + name + "'");
}

BoundingBox Scene::bounds() const {
  BoundingBox box;
  for (const auto& inst : instances) box.extend(inst.mesh->boundingBox());
  return box;
}

BoundingBox Scene::bounds(MeshRole role) const {
  BoundingBox box;
  for (const auto& inst : instances) {
    if (inst.role == role) box.extend(inst.mesh->boundingBox());
  }
  return box;
}

Vec3 Scene::lightDirection(const Light& light) const {
  const Vec3 d = light.cameraRelative ? camera.directionFromView(light.direction) : light.direction;
  return d.normalized();
}

Vec3 Scene::keyLightDirection() const { return lightDirection(lights.empty() ? Light{} : lights.front()); }

std::pair<double, double> viewDepthRange(const Camera& camera, const BoundingBox& box) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const Vec3 f = camera.forward();
  for (const Vec3& c : box.corners()) {
    const double d = f.dot(c - camera.position);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

}  // namespace vdk
