#pragma once

#include <functional>
#include <span>

#include "vdk/render/framebuffer.hpp"
#include "vdk/render/scene.hpp"

namespace vdk {

/// Visible surface sample handed to fragment shaders.
struct Fragment {
  int x = 0;
  int y = 0;
  int instance = kNoObject;
  int face = -1;
  Vec3 bary = Vec3::Zero();  ///< perspective-correct weights of the face's vertices
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::Zero();      ///< unit shading normal (world), flipped toward the viewer on back faces
  Vec3 faceNormal = Vec3::Zero();  ///< geometric normal (world), same flip
  Vec3 viewDir = Vec3::Zero();     ///< unit vector from the surface point to the camera
  double depth = 1.0;              ///< linear depth
  double viewDepth = 0.0;
  bool backFacing = false;
  const MeshInstance* mesh = nullptr;

  /// Barycentric interpolation of a per-vertex attribute.
  template <class T>
  T interpolate(std::span<const T> values) const {
    const Face& f = mesh->mesh->faces()[static_cast<std::size_t>(face)];
    return values[f[0]] * bary[0] + values[f[1]] * bary[1] + values[f[2]] * bary[2];
  }
};

/// Returns linear RGBA; alpha composites over the scene background.
using FragmentShader = std::function<Rgba(const Fragment&)>;

/// Z-buffered visibility pass. Fills every geometric channel; colour is set
/// to the opaque background. Coverage uses 1/256-pixel fixed point edge
/// functions with a top-left rule; the nearest sample wins with ties broken
/// by (instance, face) so submission order does not matter. Throws
/// EmptyScene when there are no instances.
FrameBuffer rasterizeGeometry(const Scene& scene);

/// Runs the shader on every covered pixel and composites over the background.
void shadeFrameBuffer(FrameBuffer& fb, const Scene& scene, const FragmentShader& shader);

FrameBuffer rasterize(const Scene& scene, const FragmentShader& shader);

/// Reconstructs the fragment stored at a covered pixel.
Fragment fragmentAt(const FrameBuffer& fb, const Scene& scene, int x, int y);

}  // namespace vdk
