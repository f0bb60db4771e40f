#pragma once

#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "vdk/scene/scene_file.hpp"
#include "vdk/skeleton/endpoints.hpp"

namespace vdk {

/// Batch manifest:
///   { "scenes": ["a.json", ...],              // relative to the manifest
///     "sweep": { "technique.params.fogFalloff": [0.5, 1, 2], ... },
///     "width": 512, "height": 512 }
/// Sweep keys are dotted paths into the scene document; every combination of
/// values is rendered for every scene. "technique.name": "*" expands to all
/// registry techniques and resets technique.params before other overrides.
struct BatchManifest {
  std::vector<std::filesystem::path> scenes;
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> sweep;
  int width = 0;
  int height = 0;
};

BatchManifest parseManifest(const nlohmann::json& document, const std::filesystem::path& baseDir);
BatchManifest loadManifest(const std::filesystem::path& path);

/// One row per combination; `file` is empty on failure.
struct BatchRow {
  std::string file;
  nlohmann::json record;
  bool ok() const { return !file.empty(); }
};

struct BatchReport {
  std::vector<BatchRow> rows;
  std::size_t failures() const;
};

/// Writes the images and `index.json` ({rows: [...]}) into outDir.
BatchReport runBatch(const BatchManifest& manifest, const std::filesystem::path& outDir, MeshCache& cache,
                     std::ostream* log = nullptr);

/// Sets a dotted path ("technique.params.x", "meshes.0.color") in a document.
void setDottedPath(nlohmann::json& document, const std::string& path, const nlohmann::json& value);

enum class EndpointCacheStatus { Hit, Computed };

/// Loads the mesh and writes its endpoint cache unless `out` already holds a
/// cache whose mesh hash matches. Progress lines go to `log`.
EndpointCacheStatus updateEndpointCache(const std::filesystem::path& meshPath, const std::filesystem::path& out,
                                        std::ostream* log = nullptr, SkeletonResult* result = nullptr);

}  // namespace vdk
