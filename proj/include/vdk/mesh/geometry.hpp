#pragma once

#include <vector>

#include "vdk/mesh/tri_mesh.hpp"

namespace vdk {

struct VolumeEstimate {
  double volume = 0.0;  ///< mm³, signed
  bool closed = false;  ///< false: divergence-theorem estimate on an open mesh
};

/// Sum of signed tetrahedra (origin, v0, v1, v2) / 6. Positive for closed,
/// outward-oriented meshes.
VolumeEstimate meshVolume(const TriMesh& mesh);

/// Signed volume for new positions over fixed faces (no validation).
double signedVolume(std::span<const Vec3> vertices, std::span<const Face> faces);

/// Per-vertex principal curvatures and directions.
struct CurvatureField {
  std::vector<double> kappa1;  ///< max principal curvature, 1/mm
  std::vector<double> kappa2;  ///< min principal curvature, 1/mm
  std::vector<Vec3> dir1;
  std::vector<Vec3> dir2;
  std::vector<double> meanCurvature;
  /// Vertices without incident faces; their curvature is zeroed.
  std::vector<int> isolated;
};

/// Per-face second fundamental form fitted from normal differences along the
/// three edges, accumulated into vertex frames with Voronoi corner weights,
/// then diagonalized.
CurvatureField estimateCurvature(const TriMesh& mesh);

/// Normals weighted by Max's edge-length rule (exact for vertices sampled
/// from a sphere). Used as the curvature estimator's input.
std::vector<Vec3> maxWeightedNormals(const TriMesh& mesh);

/// Mixed Voronoi area of every face corner; row f holds corners 0..2.
std::vector<std::array<double, 3>> cornerAreas(const TriMesh& mesh);

/// Any unit vector orthogonal to n.
Vec3 anyPerpendicular(const Vec3& n);

}  // namespace vdk
