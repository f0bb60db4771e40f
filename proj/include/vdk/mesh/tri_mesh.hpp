#pragma once

#include <span>
#include <string>
#include <vector>

#include "vdk/core/types.hpp"

namespace vdk {

/// Indexed triangle mesh in millimetres with derived per-vertex data.
///
/// Immutable after construction: every constructor path validates indices,
/// rejects faces with area below 1e-12 mm² and fills normals, areas, one-rings
/// and the bounding box. Safe to share between threads.
class TriMesh {
 public:
  static constexpr double kMinFaceArea = 1e-12;

  TriMesh() = default;
  /// Throws Error{DegenerateGeometry} or Error{InvalidArgument}.
  TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  std::size_t vertexCount() const { return vertices_.size(); }
  std::size_t faceCount() const { return faces_.size(); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Vec3>& vertexNormals() const { return vertexNormals_; }
  const std::vector<Vec3>& faceNormals() const { return faceNormals_; }
  const std::vector<double>& faceAreas() const { return faceAreas_; }
  /// Sorted, de-duplicated neighbour lists.
  const std::vector<std::vector<int>>& oneRing() const { return oneRing_; }
  const std::vector<std::vector<int>>& vertexFaces() const { return vertexFaces_; }
  const BoundingBox& boundingBox() const { return bbox_; }

  const Vec3& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }

  /// Vertices with no incident face; their normal defaults to +Z.
  const std::vector<int>& isolatedVertices() const { return isolated_; }

  double totalArea() const;
  double meanFaceArea() const;

  /// True when every undirected edge has exactly two incident faces.
  bool isClosed() const;
  /// Edges shared by more than two faces.
  std::size_t nonManifoldEdgeCount() const;

  /// Same connectivity with new positions (derived data recomputed).
  TriMesh withVertices(std::vector<Vec3> vertices) const;
  /// Applies p -> R p + t to positions.
  TriMesh transformed(const Eigen::Affine3d& transform) const;
  /// Flips every face orientation.
  TriMesh inverted() const;

 private:
  void computeDerived();

  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Vec3> vertexNormals_;
  std::vector<Vec3> faceNormals_;
  std::vector<double> faceAreas_;
  std::vector<std::vector<int>> oneRing_;
  std::vector<std::vector<int>> vertexFaces_;
  std::vector<int> isolated_;
  BoundingBox bbox_;
};

/// Area-weighted vertex normals for arbitrary positions over fixed faces.
std::vector<Vec3> computeVertexNormals(std::span<const Vec3> vertices, std::span<const Face> faces);

/// Undirected edge (a < b) with its incident faces.
struct EdgeRecord {
  int a = 0;
  int b = 0;
  std::vector<int> faces;
};

/// All undirected edges in deterministic (a, b) order.
std::vector<EdgeRecord> buildEdges(std::span<const Face> faces);

/// Vertices within k graph hops (excluding the centre), ascending.
std::vector<int> kRing(const TriMesh& mesh, int vertex, int k);

/// SHA-256 over the little-endian vertex doubles and face indices.
std::string meshHash(const TriMesh& mesh);

}  // namespace vdk
