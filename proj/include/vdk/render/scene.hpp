#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "vdk/mesh/tri_mesh.hpp"
#include "vdk/render/camera.hpp"

namespace vdk {

enum class MeshRole { Vessel, Tumor, Organ };

std::string toString(MeshRole role);
MeshRole meshRoleFromString(const std::string& name);

/// A mesh placed in the scene. Geometry is stored in world coordinates.
struct MeshInstance {
  std::string name;
  std::shared_ptr<const TriMesh> mesh;
  MeshRole role = MeshRole::Vessel;
  Rgb color{0.8, 0.1, 0.1};
  /// Optional per-vertex scalar field (same length as the vertex list).
  std::vector<double> scalars;
};

/// Directional light. `direction` points from the surface toward the light;
/// in camera-relative mode it is given in view space (+x right, +y up, +z
/// toward the viewer).
struct Light {
  Vec3 direction{0.3, 0.5, 1.0};
  bool cameraRelative = true;
};

struct Scene {
  Camera camera;
  std::vector<Light> lights;
  std::vector<MeshInstance> instances;
  std::vector<Vec3> tumorPositions;
  Rgb background{1.0, 1.0, 1.0};
  std::uint64_t seed = 0;

  BoundingBox bounds() const;
  /// Bounds of instances with the given role (empty box when none).
  BoundingBox bounds(MeshRole role) const;
  /// Key light in world space (first light, or the default headlight).
  Vec3 keyLightDirection() const;
  Vec3 lightDirection(const Light& light) const;
};

/// [min, max] of view depth over the eight corners of the box.
std::pair<double, double> viewDepthRange(const Camera& camera, const BoundingBox& box);

}  // namespace vdk
