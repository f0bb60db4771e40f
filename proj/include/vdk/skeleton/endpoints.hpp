#pragma once

#include <filesystem>
#include <vector>

#include "vdk/mesh/geometry.hpp"
#include "vdk/skeleton/contraction.hpp"

namespace vdk {

struct EndpointOptions {
  int vicinityRings = 2;
  /// Every unit offset must satisfy dot(u, d) > minAlignment. A bare half-space
  /// test (0) flags the convex side of any curved skeleton segment, where the
  /// offsets to both neighbours lean slightly inward.
  double minAlignment = 0.1;
};

/// Vertices whose k-ring neighbours on the contracted mesh all lie on one side
/// of the mean offset direction d. Neighbours that coincide with the vertex
/// after contraction carry no direction and are skipped.
std::vector<int> detectEndpoints(const TriMesh& mesh, std::span<const Vec3> contracted,
                                 const EndpointOptions& options = {});
std::vector<int> detectEndpoints(const TriMesh& mesh, const ContractionState& contracted,
                                 const EndpointOptions& options = {});

/// Smallest dot(normalize(u - v), d) over the vicinity of v; -1 when v has no
/// usable neighbours.
double endpointAlignment(const TriMesh& mesh, std::span<const Vec3> contracted, int v, int rings = 2);

/// argmin |meanCurvature| over endpoints, ties to the lowest index.
/// Throws EmptyEndpoints.
int selectRoot(const TriMesh& mesh, const CurvatureField& curvature, std::span<const int> endpoints);

struct SkeletonResult {
  std::string meshHash;
  std::vector<int> endpoints;
  int root = -1;
  std::vector<Vec3> contractedPositions;
  int iterations = 0;
  double elapsedSeconds = 0.0;
  ContractionStop stop = ContractionStop::IterationCap;
  std::vector<ContractionIterationLog> log;

  bool operator==(const SkeletonResult& other) const {
    return meshHash == other.meshHash && endpoints == other.endpoints && root == other.root &&
           contractedPositions == other.contractedPositions && iterations == other.iterations &&
           elapsedSeconds == other.elapsedSeconds;
  }
};

/// Contraction, endpoint detection and root selection in one call. When no
/// endpoints are found (loops) root stays -1.
SkeletonResult computeSkeleton(const TriMesh& mesh, const ContractionOptions& options = {},
                               const EndpointOptions& endpointOptions = {}, const ContractionProgress& progress = {},
                               std::stop_token stop = {});

/// JSON cache: { meshHash, endpoints, root, contractedPositions, iterations, elapsedSeconds }.
void saveEndpoints(const std::filesystem::path& path, const SkeletonResult& result);

/// Throws IOError when unreadable, SchemaMismatch on missing fields, wrong
/// types or out-of-range indices. When `expectedMesh` is given the stored hash
/// and vertex count must match it.
SkeletonResult loadEndpoints(const std::filesystem::path& path, const TriMesh* expectedMesh = nullptr);

std::string toString(ContractionStop stop);

}  // namespace vdk
