#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vdk/glyphs/supporting.hpp"
#include "vdk/render/image_io.hpp"
#include "vdk/scene/scene_file.hpp"

namespace vdk {

/// Data directory holding shipped look-up tables: $VDK_DATA_DIR when set,
/// otherwise the source tree's data/.
std::filesystem::path dataDirectory();

/// Endpoint cache written next to a mesh file.
std::filesystem::path endpointCachePath(const std::filesystem::path& meshPath);

/// Anchors for glyph techniques: the scene's list, else the endpoint cache
/// of the first vessel mesh, else `fallbackCount` farthest-point samples of
/// that mesh. World positions are after the mesh transform.
struct ResolvedAnchors {
  AnchorSet set;
  std::vector<int> instances;  ///< per anchor
  std::string source;          ///< "scene", "endpoints" or "sampled"
};
ResolvedAnchors resolveAnchors(const PreparedScene& prepared, int fallbackCount = 8);

/// Deterministic farthest-point sampling starting at the vertex farthest
/// from the centroid.
std::vector<int> farthestPointSamples(const TriMesh& mesh, int count);

/// Renders the layer list: surface techniques chain per fragment in list
/// order over a Phong base, then overlay techniques paint in order. Full-frame
/// techniques (hatching-hz, vector-field) must come first.
FrameBuffer renderLayers(const PreparedScene& prepared);

struct RenderOutput {
  Image8 image;
  std::vector<std::uint8_t> png;
  std::string sceneHash;
  std::uint64_t seed = 0;
};

/// The single render path shared by the CLI and the HTTP service. The PNG
/// carries a veSSceNe text chunk "scene=<hash>;seed=<seed>". Failures other
/// than SchemaError and UnknownTechnique surface as RenderError.
RenderOutput renderScene(const SceneSpec& spec, MeshCache& cache, int width = 0, int height = 0);

/// Writes bytes atomically (temporary file, then rename).
void writeBytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

std::string sceneTextValue(const std::string& hash, std::uint64_t seed);

}  // namespace vdk
