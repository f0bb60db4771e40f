#pragma once

#include <vector>

#include "vdk/glyphs/overlay.hpp"
#include "vdk/mesh/tri_mesh.hpp"
#include "vdk/render/scene.hpp"
#include "vdk/render/shadow.hpp"

namespace vdk {

/// Surface points marked for auxiliary glyphs, usually skeleton endpoints.
struct AnchorSet {
  std::vector<int> anchorVertices;
  std::vector<Vec3> worldPositions;

  std::size_t size() const { return worldPositions.size(); }
};

/// Validates the indices against the mesh and drops duplicates (first
/// occurrence kept). Throws InvalidArgument on an out-of-range index.
AnchorSet makeAnchorSet(const TriMesh& mesh, const std::vector<int>& vertices);

struct SupportingLine {
  Vec3 point;
  Vec3 foot;
  double length = 0.0;
};

/// Drops each selection orthogonally onto the shadow plane. Throws
/// SelectionBelowPlane when a point lies below the plane.
std::vector<SupportingLine> supportingLines(const ShadowPlane& plane, const std::vector<Vec3>& selections);

/// Open cylinder centred on the camera axis. Surface points are
/// camera.position + forward*depth + radius*(cos a * right + sin a * up).
struct AnchorCylinder {
  Vec3 origin = Vec3::Zero();
  Vec3 axis = -Vec3::UnitZ();
  Vec3 right = Vec3::UnitX();
  Vec3 up = Vec3::UnitY();
  double radius = 1.0;
  double nearDepth = 0.0;
  double farDepth = 1.0;

  Vec3 axisPoint(double depth) const { return origin + axis * depth; }
  Vec3 surfacePoint(double angle, double depth) const;
};

/// Radius 0.6 x bounding-sphere radius of the scene, spanning the scene's
/// view-depth range.
AnchorCylinder fitAnchorCylinder(const Scene& scene, double radiusFactor = 0.6);

/// Open tube mesh of the cylinder for rendering.
TriMesh anchorCylinderMesh(const AnchorCylinder& cylinder, int segments = 96, int rings = 24);

struct AnchorOptions {
  double binDegrees = 10.0;
  double arcDegrees = 14.0;  ///< total angular extent of each arc
  int arcSegments = 8;
  bool thin = true;
};

struct SupportingAnchor {
  int vertex = -1;
  Vec3 position;
  Vec3 foot;               ///< closest cylinder point (after clamping)
  double angle = 0.0;      ///< radians in [0, 2pi), 0 = camera right, +pi/2 = camera up
  double depth = 0.0;      ///< view depth of the anchor
  bool clamped = false;    ///< anchor depth was outside the cylinder and moved to the rim
  std::vector<Vec3> arc;   ///< polyline at constant depth centred on foot
};

/// Indices of the anchors kept by angular thinning: per bin of binDegrees the
/// anchor with the smallest depth (ties to the lower index), in input order.
std::vector<std::size_t> thinByAngle(const std::vector<double>& angles, const std::vector<double>& depths,
                                     double binDegrees);

std::vector<SupportingAnchor> supportingAnchors(const AnchorCylinder& cylinder, const AnchorSet& anchors,
                                                const AnchorOptions& options = {});

struct CylinderStyle {
  Rgb color{0.55, 0.6, 0.7};
  double opacity = 0.6;
  double fogFalloff = 2.0;
  int isolineCount = 8;
  double isolineWidthPx = 1.2;
  Rgb isolineColor{0.15, 0.15, 0.2};
};

/// Composites the cylinder wall with depth fog and isolines wherever it is in
/// front of the frame content.
void paintAnchorCylinder(FrameBuffer& fb, const Camera& camera, const AnchorCylinder& cylinder,
                         const CylinderStyle& style = {});

/// Connectors and arcs.
void paintSupportingAnchors(OverlayPainter& painter, const std::vector<SupportingAnchor>& anchors,
                            const Rgb& color = Rgb(0.1, 0.1, 0.1), double widthPx = 1.5);

/// Vertical lines and foot markers.
void paintSupportingLines(OverlayPainter& painter, const std::vector<SupportingLine>& lines,
                          const Rgb& color = Rgb(0.1, 0.1, 0.1), double widthPx = 1.5);

}  // namespace vdk
