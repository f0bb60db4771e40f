#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "vdk/render/scene.hpp"
#include "vdk/scene/registry.hpp"

namespace vdk {

inline constexpr int kSceneSchemaVersion = 1;

/// One mesh entry: a file (OBJ/PLY, relative to the scene's base directory)
/// or a built-in generator.
struct MeshSpec {
  std::string id;
  std::filesystem::path path;  ///< resolved; empty when a generator is used
  nlohmann::json generator;    ///< {kind, ...} or null
  MeshRole role = MeshRole::Vessel;
  Eigen::Affine3d transform = Eigen::Affine3d::Identity();
  Rgb color{0.8, 0.1, 0.1};
  std::filesystem::path scalars;  ///< optional per-vertex field file
};

struct CameraSpec {
  Camera camera;
  std::optional<Vec3> position;
  std::optional<Vec3> lookAt;
  double azimuthDeg = 0.0;  ///< auto framing when position is absent
  double elevationDeg = 0.0;
  double distanceFactor = 1.0;  ///< 1 fits the bounding sphere in view
  bool autoNear = true;
  bool autoFar = true;
};

struct AnchorRef {
  int mesh = 0;
  int vertex = 0;
};

struct LayerSpec {
  const TechniqueDescriptor* technique = nullptr;
  nlohmann::json params;  ///< resolved, defaults filled
};

struct SceneSpec {
  std::vector<MeshSpec> meshes;
  CameraSpec camera;
  std::vector<Light> lights;
  std::optional<std::vector<Vec3>> tumorPositions;
  std::optional<std::vector<AnchorRef>> anchors;
  std::vector<LayerSpec> layers;  ///< technique first, then the layers list
  std::uint64_t seed = 0;
  Rgb background{1.0, 1.0, 1.0};
  nlohmann::json source;  ///< validated input document
};

/// Strict parse: unknown fields, wrong types and out-of-range values raise
/// SchemaError with the dotted field path; unknown technique names raise
/// UnknownTechnique.
SceneSpec parseScene(const nlohmann::json& document, const std::filesystem::path& baseDir);
SceneSpec parseSceneText(const std::string& text, const std::filesystem::path& baseDir);
SceneSpec loadSceneFile(const std::filesystem::path& path);

/// Builds a mesh from a generator object {kind, ...}. Throws SchemaError
/// under `path`.
TriMesh generateMesh(const nlohmann::json& generator, const std::string& path);

/// Shared immutable meshes keyed by file (path, size, mtime) or generator.
class MeshCache {
 public:
  std::shared_ptr<const TriMesh> get(const MeshSpec& spec);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const TriMesh>> meshes_;
};

/// Scene ready for rendering.
struct PreparedScene {
  Scene scene;
  std::vector<LayerSpec> layers;
  std::vector<std::string> meshIds;
  std::vector<std::filesystem::path> meshPaths;
  std::vector<std::shared_ptr<const TriMesh>> baseMeshes;  ///< before transforms
  std::optional<std::vector<AnchorRef>> anchors;
  std::string hash;  ///< SHA-256 of the document, mesh hashes and size
};

/// Loads meshes, applies transforms and roles, frames the camera and sets
/// the output size (0 keeps the scene's camera size).
PreparedScene prepareScene(const SceneSpec& spec, MeshCache& cache, int width = 0, int height = 0);

}  // namespace vdk
