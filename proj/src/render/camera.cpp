#include "vdk/render/camera.hpp"

#include "vdk/core/error.hpp"

namespace vdk {

void Camera::validate() const {
  if (!(nearPlane > 0.0) || !(farPlane > nearPlane)) throw Error(ErrorCode::InvalidArgument, "camera needs 0 < near < far");
  if (!(verticalFov > 0.0 && verticalFov < 180.0)) throw Error(ErrorCode::InvalidArgument, "camera FOV must be in (0, 180)");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "viewport must be positive");
  const Vec3 f = lookAt - position;
  if (!(f.norm() > 0.0)) throw Error(ErrorCode::InvalidArgument, "camera position equals lookAt");
  if (!(f.normalized().cross(up).norm() > 1e-9)) {
    throw Error(ErrorCode::InvalidArgument, "camera up is parallel to the view direction");
  }
  if (!position.allFinite() || !lookAt.allFinite() || !up.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "camera vectors must be finite");
  }
}

Vec3 Camera::forward() const { return (lookAt - position).normalized(); }
Vec3 Camera::right() const { return forward().cross(up).normalized(); }
Vec3 Camera::trueUp() const { return right().cross(forward()); }

Vec3 Camera::toView(const Vec3& world) const {
  const Vec3 d = world - position;
  return Vec3(right().dot(d), trueUp().dot(d), forward().dot(d));
}

Vec3 Camera::directionToView(const Vec3& dir) const {
  return Vec3(right().dot(dir), trueUp().dot(dir), -forward().dot(dir));
}

Vec3 Camera::directionFromView(const Vec3& dir) const {
  return right() * dir.x() + trueUp() * dir.y() - forward() * dir.z();
}

double Camera::tanHalfFov() const { return std::tan(0.5 * degToRad(verticalFov)); }

Vec3 Camera::project(const Vec3& world) const {
  const Vec3 v = toView(world);
  const double t = tanHalfFov();
  const double nx = v.x() / (v.z() * t * aspect());
  const double ny = v.y() / (v.z() * t);
  return Vec3((nx + 1.0) * 0.5 * width, (1.0 - ny) * 0.5 * height, v.z());
}

Vec3 Camera::rayDirection(double sx, double sy) const {
  const double t = tanHalfFov();
  const double nx = 2.0 * sx / width - 1.0;
  const double ny = 1.0 - 2.0 * sy / height;
  return (forward() + right() * (nx * t * aspect()) + trueUp() * (ny * t)).normalized();
}

double Camera::linearDepth(double viewDepth) const {
  return clamp01((viewDepth - nearPlane) / (farPlane - nearPlane));
}

Camera Camera::withViewport(int w, int h) const {
  Camera c = *this;
  c.width = w;
  c.height = h;
  return c;
}

double linearDepth(const Camera& camera, const Vec3& world) {
  return camera.linearDepth(camera.forward().dot(world - camera.position));
}

}  // namespace vdk
