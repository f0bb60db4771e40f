#include "vdk/mesh/tri_mesh.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "vdk/core/error.hpp"
#include "vdk/core/hash.hpp"

namespace vdk {

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int n = static_cast<int>(vertices_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    for (int idx : faces_[f]) {
      if (idx < 0 || idx >= n) {
        throw Error(ErrorCode::InvalidArgument,
                    "face " + std::to_string(f) + " references vertex " + std::to_string(idx) +
                        " (vertex count " + std::to_string(n) + ")");
      }
    }
  }
  for (const Vec3& p : vertices_) {
    if (!p.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite vertex position");
  }
  computeDerived();
}

void TriMesh::computeDerived() {
  const std::size_t n = vertices_.size();
  faceNormals_.assign(faces_.size(), Vec3::Zero());
  faceAreas_.assign(faces_.size(), 0.0);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& [a, b, c] = faces_[f];
    const Vec3 cross = (vertices_[b] - vertices_[a]).cross(vertices_[c] - vertices_[a]);
    const double area = 0.5 * cross.norm();
    if (!(area >= kMinFaceArea)) {
      throw Error(ErrorCode::DegenerateGeometry,
                  "face " + std::to_string(f) + " has area " + std::to_string(area) + " mm^2");
    }
    faceAreas_[f] = area;
    faceNormals_[f] = cross / (2.0 * area);
  }
  vertexNormals_ = computeVertexNormals(vertices_, faces_);

  vertexFaces_.assign(n, {});
  oneRing_.assign(n, {});
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const int v = faces_[f][k];
      vertexFaces_[v].push_back(static_cast<int>(f));
      oneRing_[v].push_back(faces_[f][(k + 1) % 3]);
      oneRing_[v].push_back(faces_[f][(k + 2) % 3]);
    }
  }
  isolated_.clear();
  for (std::size_t v = 0; v < n; ++v) {
    auto& ring = oneRing_[v];
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
    if (vertexFaces_[v].empty()) isolated_.push_back(static_cast<int>(v));
  }
  bbox_ = BoundingBox{};
  for (const Vec3& p : vertices_) bbox_.extend(p);
}

std::vector<Vec3> computeVertexNormals(std::span<const Vec3> vertices, std::span<const Face> faces) {
  std::vector<Vec3> normals(vertices.size(), Vec3::Zero());
  for (const Face& f : faces) {
    // Unnormalized cross product = 2 * area * unit normal.
    const Vec3 cross = (vertices[f[1]] - vertices[f[0]]).cross(vertices[f[2]] - vertices[f[0]]);
    for (int v : f) normals[v] += cross;
  }
  for (Vec3& nrm : normals) {
    const double len = nrm.norm();
    nrm = len > 0.0 ? Vec3(nrm / len) : Vec3::UnitZ();
  }
  return normals;
}

double TriMesh::totalArea() const { return std::accumulate(faceAreas_.begin(), faceAreas_.end(), 0.0); }

double TriMesh::meanFaceArea() const { return faces_.empty() ? 0.0 : totalArea() / static_cast<double>(faces_.size()); }

std::vector<EdgeRecord> buildEdges(std::span<const Face> faces) {
  std::map<std::pair<int, int>, std::vector<int>> edges;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      int a = faces[f][k];
      int b = faces[f][(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edges[{a, b}].push_back(static_cast<int>(f));
    }
  }
  std::vector<EdgeRecord> out;
  out.reserve(edges.size());
  for (auto& [key, fs] : edges) out.push_back(EdgeRecord{key.first, key.second, std::move(fs)});
  return out;
}

bool TriMesh::isClosed() const {
  if (faces_.empty()) return false;
  for (const auto& e : buildEdges(faces_)) {
    if (e.faces.size() != 2) return false;
  }
  return true;
}

std::size_t TriMesh::nonManifoldEdgeCount() const {
  std::size_t count = 0;
  for (const auto& e : buildEdges(faces_)) {
    if (e.faces.size() > 2) ++count;
  }
  return count;
}

TriMesh TriMesh::withVertices(std::vector<Vec3> vertices) const {
  return TriMesh(std::move(vertices), faces_);
}

TriMesh TriMesh::transformed(const Eigen::Affine3d& transform) const {
  std::vector<Vec3> moved;
  moved.reserve(vertices_.size());
  for (const Vec3& p : vertices_) moved.push_back(transform * p);
  return TriMesh(std::move(moved), faces_);
}

TriMesh TriMesh::inverted() const {
  std::vector<Face> flipped = faces_;
  for (Face& f : flipped) std::swap(f[1], f[2]);
  return TriMesh(vertices_, std::move(flipped));
}

std::vector<int> kRing(const TriMesh& mesh, int vertex, int k) {
  std::vector<int> visited{vertex};
  std::vector<int> frontier{vertex};
  for (int hop = 0; hop < k; ++hop) {
    std::vector<int> next;
    for (int v : frontier) {
      for (int u : mesh.oneRing()[v]) {
        if (std::find(visited.begin(), visited.end(), u) == visited.end()) {
          visited.push_back(u);
          next.push_back(u);
        }
      }
    }
    frontier = std::move(next);
  }
  visited.erase(visited.begin());
  std::sort(visited.begin(), visited.end());
  return visited;
}

std::string meshHash(const TriMesh& mesh) {
  ByteWriter w;
  w.bytes("vdk-mesh-v1");
  w.u64(mesh.vertexCount());
  w.u64(mesh.faceCount());
  for (const Vec3& p : mesh.vertices()) {
    w.f64(p.x());
    w.f64(p.y());
    w.f64(p.z());
  }
  for (const Face& f : mesh.faces()) {
    for (int i : f) w.u32(static_cast<std::uint32_t>(i));
  }
  return sha256Hex(std::span(w.data()));
}

}  // namespace vdk
