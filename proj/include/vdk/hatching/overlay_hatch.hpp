#pragma once

#include <vector>

#include "vdk/mesh/tri_mesh.hpp"
#include "vdk/render/framebuffer.hpp"
#include "vdk/render/scene.hpp"

namespace vdk {

/// (1 - clamp(N.V, 0, 1))^2: opaque at silhouettes, clear where facing.
double overlayAlpha(double nDotV);

/// Copy of the mesh with every vertex moved `distance` along its normal.
TriMesh offsetAlongNormals(const TriMesh& mesh, double distance);

/// Dominant axis of the vertex cloud (unit, sign fixed to a positive
/// largest component).
Vec3 principalAxis(const TriMesh& mesh);

/// Edge-path (Dijkstra) distance from the vertex with the smallest
/// coordinate along the principal axis, per connected component. Its level
/// sets form rings around tubular parts.
std::vector<double> hatchCoordinate(const TriMesh& mesh);

struct OverlayHatchParams {
  double offset = 1.0;        ///< mm along the normal
  double spacing = 1.6;       ///< mm between hatch lines
  double lineFraction = 0.4;  ///< inked share of each period
  Rgb ink{0.05, 0.05, 0.05};
};

/// Hatch overlay: offset mesh plus the per-vertex coordinate whose level
/// sets are the hatch lines.
struct HatchOverlay {
  TriMesh mesh;
  std::vector<double> coordinate;

  bool empty() const { return mesh.faceCount() == 0 || coordinate.size() != mesh.vertexCount(); }
};

/// Offsets the base mesh and computes the coordinate on the base topology.
HatchOverlay makeHatchOverlay(const TriMesh& base, const OverlayHatchParams& params = {});

/// Wraps a precomputed overlay mesh (e.g. loaded from OBJ).
HatchOverlay hatchOverlayFromMesh(TriMesh overlay);

/// Draws the overlays over an already shaded frame; hidden overlay parts are
/// depth tested against fb. Throws MissingOverlay when an overlay is empty or
/// none is given.
void compositeHatchOverlay(FrameBuffer& fb, const Scene& scene, const std::vector<HatchOverlay>& overlays,
                           const OverlayHatchParams& params = {});

}  // namespace vdk
