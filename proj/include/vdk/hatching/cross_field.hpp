#pragma once

#include <vector>

#include "vdk/hatching/lbfgs.hpp"
#include "vdk/mesh/geometry.hpp"
#include "vdk/mesh/tri_mesh.hpp"

namespace vdk {

/// Orthonormal tangent basis at a vertex; (t1, t2, normal) is right-handed.
struct TangentFrame {
  Vec3 t1;
  Vec3 t2;
  Vec3 normal;
};

/// Per-vertex frames: t1 is the projection of the coordinate axis least
/// aligned with the normal.
std::vector<TangentFrame> tangentFrames(const TriMesh& mesh);

/// Angle in frame j of frame i's t1 after minimal-rotation transport from
/// the tangent plane of i to that of j. A direction at angle a in frame i
/// matches angle a + transportAngle(i, j) in frame j.
double transportAngle(const TangentFrame& fi, const TangentFrame& fj);

/// (k1 - k2)^2 / (k1^2 + k2^2 + 1e-9).
double anisotropyConfidence(double kappa1, double kappa2);

/// Wraps into [0, pi/2).
double wrapQuarter(double angle);

struct CrossField {
  std::vector<double> theta;       ///< in [0, pi/2)
  std::vector<double> confidence;  ///< in [0, 1]
  std::vector<TangentFrame> tangentFrames;
  std::vector<double> initialTheta;
  /// Angle of the max-curvature direction in each frame (not wrapped); picks
  /// the hatching family among the four branches.
  std::vector<double> principalAngle;
  double initialEnergy = 0.0;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;

  /// World-space unit direction of the first cross branch at a vertex.
  Vec3 direction(int v) const;
  /// Branch closest to the principal direction (sign ambiguous).
  Vec3 familyDirection(int v) const;
};

struct CrossFieldOptions {
  double lambda = 1.0;
  LbfgsOptions solver;
  /// Vertices held at their initial angle.
  std::vector<int> fixedVertices;
};

/// Smoothness plus data energy over edges (i < j) with unit weights:
/// sum [1 - cos 4(theta_i - theta_j + transport_ij)] + lambda sum c_i [1 - cos 4(theta_i - theta0_i)].
class CrossFieldEnergy {
 public:
  CrossFieldEnergy(const TriMesh& mesh, std::vector<TangentFrame> frames, std::vector<double> theta0,
                   std::vector<double> confidence, double lambda);

  double operator()(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const;
  double value(const Eigen::VectorXd& theta) const;

  const std::vector<TangentFrame>& frames() const { return frames_; }

 private:
  struct Edge {
    int i, j;
    double transport;
  };
  std::vector<Edge> edges_;
  std::vector<TangentFrame> frames_;
  std::vector<double> theta0_;
  std::vector<double> confidence_;
  double lambda_;
};

/// Initial angles from the max-curvature direction projected into each frame.
std::vector<double> initialCrossAngles(const std::vector<TangentFrame>& frames, const CurvatureField& curvature);

/// Full optimization from principal directions.
CrossField optimizeCrossField(const TriMesh& mesh, const CurvatureField& curvature,
                              const CrossFieldOptions& options = {});

/// Optimization from explicit initial angles and confidences.
CrossField optimizeCrossField(const TriMesh& mesh, std::vector<double> theta0, std::vector<double> confidence,
                              const CrossFieldOptions& options = {});

}  // namespace vdk
