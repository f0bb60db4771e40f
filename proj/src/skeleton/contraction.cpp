#include "vdk/skeleton/contraction.hpp"

#include <Eigen/SparseCholesky>

#include "vdk/core/error.hpp"
#include "vdk/mesh/geometry.hpp"

namespace vdk {
namespace {

double cotangent(const Vec3& a, const Vec3& b) {
  const double cross = a.cross(b).norm();
  const double dot = a.dot(b);
  if (cross <= 1e-300) return dot >= 0.0 ? kMaxCotWeight : -kMaxCotWeight;
  return dot / cross;
}

}  // namespace

SparseMatrix cotangentLaplacian(std::span<const Vec3> positions, std::span<const Face> faces) {
  const auto edges = buildEdges(faces);
  const int n = static_cast<int>(positions.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(edges.size() * 2 + positions.size());
  std::vector<double> diag(positions.size(), 0.0);
  for (const auto& e : edges) {
    if (e.faces.size() > 2) {
      throw Error(ErrorCode::NonManifold, "edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) + ") has " +
                                               std::to_string(e.faces.size()) + " incident faces");
    }
    double w = 0.0;
    for (int f : e.faces) {
      const Face& tri = faces[f];
      int opposite = tri[0];
      for (int v : tri) {
        if (v != e.a && v != e.b) opposite = v;
      }
      const Vec3& o = positions[opposite];
      w += 0.5 * cotangent(positions[e.a] - o, positions[e.b] - o);
    }
    w = std::clamp(w, kMinCotWeight, kMaxCotWeight);
    triplets.emplace_back(e.a, e.b, w);
    triplets.emplace_back(e.b, e.a, w);
    diag[e.a] -= w;
    diag[e.b] -= w;
  }
  for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, diag[i]);
  SparseMatrix L(n, n);
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

SparseMatrix cotangentLaplacian(const TriMesh& mesh) { return cotangentLaplacian(mesh.vertices(), mesh.faces()); }

std::vector<double> oneRingAreas(std::span<const Vec3> positions, std::span<const Face> faces) {
  std::vector<double> area(positions.size(), 0.0);
  for (const Face& f : faces) {
    const double a = 0.5 * (positions[f[1]] - positions[f[0]]).cross(positions[f[2]] - positions[f[0]]).norm();
    for (int v : f) area[v] += a;
  }
  return area;
}

ContractionState initialContractionState(const TriMesh& mesh, const ContractionOptions& options) {
  ContractionState s;
  s.positions = mesh.vertices();
  s.wL = options.laplacianWeightScale * std::sqrt(mesh.meanFaceArea());
  s.wH.assign(mesh.vertexCount(), options.attractionWeight);
  s.initialAreas = oneRingAreas(mesh.vertices(), mesh.faces());
  s.initialVolume = signedVolume(mesh.vertices(), mesh.faces());
  s.volumeRatio = 1.0;
  return s;
}

ContractionState contractOnce(const TriMesh& mesh, const ContractionState& state, const ContractionOptions& options) {
  const auto n = static_cast<Eigen::Index>(mesh.vertexCount());
  const SparseMatrix L = cotangentLaplacian(state.positions, mesh.faces());

  Eigen::VectorXd wH2(n);
  Eigen::MatrixXd p(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    wH2(i) = state.wH[static_cast<std::size_t>(i)] * state.wH[static_cast<std::size_t>(i)];
    p.row(i) = state.positions[static_cast<std::size_t>(i)].transpose();
  }
  SparseMatrix A = (state.wL * state.wL) * SparseMatrix(L.transpose() * L);
  for (Eigen::Index i = 0; i < n; ++i) A.coeffRef(i, i) += wH2(i);
  A.makeCompressed();
  const Eigen::MatrixXd b = wH2.asDiagonal() * p;

  Eigen::SimplicialLDLT<SparseMatrix> solver;
  solver.compute(A);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "LDLT factorization failed");
  const Eigen::MatrixXd x = solver.solve(b);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "LDLT solve failed");
  if (!x.allFinite()) throw Error(ErrorCode::NumericalCollapse, "contracted positions are not finite");

  ContractionState next;
  next.initialAreas = state.initialAreas;
  next.initialVolume = state.initialVolume;
  next.iteration = state.iteration + 1;
  const double bnorm = b.norm();
  next.residual = bnorm > 0.0 ? (A * x - b).norm() / bnorm : 0.0;
  next.positions.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) next.positions[static_cast<std::size_t>(i)] = x.row(i).transpose();
  next.volumeRatio = state.initialVolume != 0.0 ? signedVolume(next.positions, mesh.faces()) / state.initialVolume : 0.0;

  next.wL = options.laplacianGrowth * state.wL;
  const auto areas = oneRingAreas(next.positions, mesh.faces());
  next.wH.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < next.wH.size(); ++i) {
    const double a0 = state.initialAreas[i];
    // Floor keeps wH finite (<= 1e6 * wH0) once a ring collapses completely.
    const double a = std::max(areas[i], 1e-12 * a0);
    next.wH[i] = a0 > 0.0 ? options.attractionWeight * std::sqrt(a0 / a) : options.attractionWeight;
  }
  return next;
}

ContractionResult contractToSkeleton(const TriMesh& mesh, const ContractionOptions& options,
                                     const ContractionProgress& progress, std::stop_token stop) {
  if (!mesh.isClosed()) throw Error(ErrorCode::NonManifold, "contraction requires a closed edge-manifold mesh");
  ContractionResult result;
  result.state = initialContractionState(mesh, options);
  for (int it = 0; it < options.maxIterations; ++it) {
    if (stop.stop_requested()) {
      result.stop = ContractionStop::Cancelled;
      return result;
    }
    ContractionState next = contractOnce(mesh, result.state, options);
    ContractionIterationLog entry{next.iteration, next.volumeRatio, next.residual, result.state.wL, false};
    if (next.residual > options.residualLimit) {
      result.log.push_back(entry);
      if (progress) progress(entry);
      result.stop = ContractionStop::ResidualExceeded;
      return result;
    }
    const double prev = result.state.volumeRatio;
    if (next.volumeRatio > prev + options.volumeSlack * std::abs(prev)) {
      // Keep the previous positions and retry with the stiffer Laplacian.
      result.log.push_back(entry);
      if (progress) progress(entry);
      ++result.rejected;
      result.state.wL = next.wL;
      result.state.iteration = next.iteration;
      continue;
    }
    entry.accepted = true;
    result.log.push_back(entry);
    if (progress) progress(entry);
    result.state = std::move(next);
    if (result.state.volumeRatio < options.volumeRatioStop) {
      result.stop = ContractionStop::VolumeConverged;
      return result;
    }
  }
  result.stop = ContractionStop::IterationCap;
  return result;
}

}  // namespace vdk
