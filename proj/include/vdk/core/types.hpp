#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>

namespace vdk {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Linear-light RGB. Components are not clamped until PNG encoding.
using Rgb = Eigen::Vector3d;
/// Linear-light RGB plus coverage/opacity.
using Rgba = Eigen::Vector4d;

using Face = std::array<int, 3>;

inline constexpr double kPi = 3.14159265358979323846;

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

template <class T>
T lerp(const T& a, const T& b, double t) {
  return a + (b - a) * t;
}

inline Rgba withAlpha(const Rgb& c, double a) { return Rgba(c.x(), c.y(), c.z(), a); }

inline double degToRad(double deg) { return deg * kPi / 180.0; }
inline double radToDeg(double rad) { return rad * 180.0 / kPi; }

/// Axis-aligned box, millimetres.
struct BoundingBox {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool empty() const { return (max.array() < min.array()).any(); }
  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const BoundingBox& b) {
    if (b.empty()) return;
    extend(b.min);
    extend(b.max);
  }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
  std::array<Vec3, 8> corners() const {
    std::array<Vec3, 8> out;
    for (int i = 0; i < 8; ++i) {
      out[i] = Vec3((i & 1) ? max.x() : min.x(), (i & 2) ? max.y() : min.y(),
                    (i & 4) ? max.z() : min.z());
    }
    return out;
  }
};

}  // namespace vdk
