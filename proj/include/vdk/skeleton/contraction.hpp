#pragma once

#include <Eigen/SparseCore>

#include <functional>
#include <optional>
#include <stop_token>
#include <vector>

#include "vdk/mesh/tri_mesh.hpp"

namespace vdk {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Cotangent weights are clamped to this range so sliver triangles produced by
/// contraction keep the system finite.
inline constexpr double kMinCotWeight = 1e-6;
inline constexpr double kMaxCotWeight = 1e6;

/// Symmetric cotangent Laplacian over the mesh connectivity evaluated at
/// `positions`: L_ij = (cot a + cot b) / 2 (clamped), L_ii = -sum_j L_ij.
/// Boundary edges use their single opposite angle. Throws NonManifold when an
/// edge has more than two incident faces.
SparseMatrix cotangentLaplacian(std::span<const Vec3> positions, std::span<const Face> faces);
SparseMatrix cotangentLaplacian(const TriMesh& mesh);

/// Implicit Laplacian contraction state for one mesh.
struct ContractionState {
  std::vector<Vec3> positions;       ///< current contracted positions p'
  double wL = 0.0;                   ///< global Laplacian weight
  std::vector<double> wH;            ///< per-vertex attraction weights
  std::vector<double> initialAreas;  ///< one-ring areas A0 on the input mesh
  double initialVolume = 0.0;
  double volumeRatio = 1.0;  ///< current / original volume
  double residual = 0.0;     ///< relative residual of the last solve
  int iteration = 0;
};

struct ContractionOptions {
  /// wL0 = laplacianWeightScale * sqrt(mean face area).
  double laplacianWeightScale = 1e-3;
  double attractionWeight = 1.0;  ///< wH0
  double laplacianGrowth = 2.0;   ///< sL
  int maxIterations = 20;
  double volumeRatioStop = 1e-4;
  double residualLimit = 0.01;
  /// Relative slack allowed when checking that volume does not grow.
  double volumeSlack = 1e-9;
};

/// Initial state: p' = p, wL = wL0, wH = wH0.
ContractionState initialContractionState(const TriMesh& mesh, const ContractionOptions& options = {});

/// One implicit step: solves (wL^2 L^T L + diag(wH^2)) p' = diag(wH^2) p with
/// an LDL^T factorization, then grows wL by sL and resets
/// wH_i = wH0 * sqrt(A0_i / A_i). Throws SolverFailure or NumericalCollapse.
ContractionState contractOnce(const TriMesh& mesh, const ContractionState& state,
                              const ContractionOptions& options = {});

enum class ContractionStop { VolumeConverged, ResidualExceeded, IterationCap, Cancelled };

struct ContractionIterationLog {
  int iteration = 0;
  double volumeRatio = 0.0;
  double residual = 0.0;
  double wL = 0.0;
  bool accepted = false;
};

struct ContractionResult {
  ContractionState state;  ///< last accepted state
  ContractionStop stop = ContractionStop::IterationCap;
  std::vector<ContractionIterationLog> log;
  int rejected = 0;  ///< steps discarded because the volume grew
  bool iterationCapReached() const { return stop == ContractionStop::IterationCap; }
};

/// Progress callback receives each attempted iteration.
using ContractionProgress = std::function<void(const ContractionIterationLog&)>;

/// Iterates contractOnce until the volume ratio falls below volumeRatioStop,
/// the solve residual exceeds residualLimit, or the iteration cap is hit.
/// A step that grows the volume is discarded (positions and wH kept) while wL
/// still advances; it counts toward the cap.
/// Requires a closed edge-manifold mesh (NonManifold otherwise).
ContractionResult contractToSkeleton(const TriMesh& mesh, const ContractionOptions& options = {},
                                     const ContractionProgress& progress = {}, std::stop_token stop = {});

/// Sum of incident face areas per vertex for the given positions.
std::vector<double> oneRingAreas(std::span<const Vec3> positions, std::span<const Face> faces);

}  // namespace vdk
