#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vdk/mesh/tri_mesh.hpp"

namespace vdk {

enum class MeshFormat { Auto, Obj, Ply };

struct MeshLoadOptions {
  /// Fan-triangulate polygons instead of raising NonTriangulated.
  bool triangulate = false;
};

/// Non-fatal findings (ignored texture coordinates, non-manifold edges).
struct MeshLoadReport {
  std::vector<std::string> warnings;
};

/// OBJ (v/f records, 1-based or negative indices) and PLY (ascii or
/// binary_little_endian). Vertex order is preserved from the file.
TriMesh loadMesh(const std::filesystem::path& path, MeshFormat format = MeshFormat::Auto,
                 const MeshLoadOptions& options = {}, MeshLoadReport* report = nullptr);

TriMesh parseObj(std::string_view text, const MeshLoadOptions& options = {}, MeshLoadReport* report = nullptr);
TriMesh parsePly(std::string_view bytes, const MeshLoadOptions& options = {}, MeshLoadReport* report = nullptr);

/// Writes positions with 17 significant digits so reloads are exact.
void saveObj(const TriMesh& mesh, const std::filesystem::path& path);
void saveBinaryPly(const TriMesh& mesh, const std::filesystem::path& path);

}  // namespace vdk
