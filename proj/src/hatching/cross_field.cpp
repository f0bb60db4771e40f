#include "vdk/hatching/cross_field.hpp"

#include <cmath>

#include "vdk/core/error.hpp"

namespace vdk {

std::vector<TangentFrame> tangentFrames(const TriMesh& mesh) {
  std::vector<TangentFrame> frames(mesh.vertexCount());
  const auto& normals = mesh.vertexNormals();
  for (std::size_t v = 0; v < frames.size(); ++v) {
    const Vec3 n = normals[v].normalized();
    int axis = 0;
    for (int k = 1; k < 3; ++k) {
      if (std::abs(n[k]) < std::abs(n[axis])) axis = k;
    }
    Vec3 e = Vec3::Zero();
    e[axis] = 1.0;
    const Vec3 t1 = (e - n * n.dot(e)).normalized();
    frames[v] = {t1, n.cross(t1), n};
  }
  return frames;
}

double transportAngle(const TangentFrame& fi, const TangentFrame& fj) {
  const Eigen::Quaterniond q = Eigen::Quaterniond::FromTwoVectors(fi.normal, fj.normal);
  const Vec3 t = q * fi.t1;
  return std::atan2(t.dot(fj.t2), t.dot(fj.t1));
}

double anisotropyConfidence(double kappa1, double kappa2) {
  const double d = kappa1 - kappa2;
  return clamp01(d * d / (kappa1 * kappa1 + kappa2 * kappa2 + 1e-9));
}

double wrapQuarter(double angle) {
  const double q = 0.5 * kPi;
  double a = std::fmod(angle, q);
  if (a < 0.0) a += q;
  if (a >= q) a = 0.0;
  return a;
}

Vec3 CrossField::direction(int v) const {
  const TangentFrame& f = tangentFrames[static_cast<std::size_t>(v)];
  const double t = theta[static_cast<std::size_t>(v)];
  return std::cos(t) * f.t1 + std::sin(t) * f.t2;
}

Vec3 CrossField::familyDirection(int v) const {
  const std::size_t i = static_cast<std::size_t>(v);
  const TangentFrame& f = tangentFrames[i];
  double t = theta[i];
  if (i < principalAngle.size()) {
    const double q = 0.5 * kPi;
    t += q * std::round((principalAngle[i] - t) / q);
  }
  return std::cos(t) * f.t1 + std::sin(t) * f.t2;
}

CrossFieldEnergy::CrossFieldEnergy(const TriMesh& mesh, std::vector<TangentFrame> frames, std::vector<double> theta0,
                                   std::vector<double> confidence, double lambda)
    : frames_(std::move(frames)), theta0_(std::move(theta0)), confidence_(std::move(confidence)), lambda_(lambda) {
  for (const EdgeRecord& e : buildEdges(mesh.faces())) {
    edges_.push_back({e.a, e.b, transportAngle(frames_[e.a], frames_[e.b])});
  }
}

double CrossFieldEnergy::operator()(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
  grad.setZero(theta.size());
  double e = 0.0;
  for (const Edge& ed : edges_) {
    const double a = 4.0 * (theta[ed.i] - theta[ed.j] + ed.transport);
    const double h = std::sin(0.5 * a);
    e += 2.0 * h * h;
    const double s = 4.0 * std::sin(a);
    grad[ed.i] += s;
    grad[ed.j] -= s;
  }
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double c = lambda_ * confidence_[i];
    if (c == 0.0) continue;
    const double a = 4.0 * (theta[i] - theta0_[i]);
    const double h = std::sin(0.5 * a);
    e += c * 2.0 * h * h;
    grad[i] += c * 4.0 * std::sin(a);
  }
  return e;
}

double CrossFieldEnergy::value(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd g;
  return (*this)(theta, g);
}

std::vector<double> initialCrossAngles(const std::vector<TangentFrame>& frames, const CurvatureField& curvature) {
  std::vector<double> theta(frames.size(), 0.0);
  for (std::size_t v = 0; v < frames.size(); ++v) {
    const Vec3& d = curvature.dir1[v];
    theta[v] = wrapQuarter(std::atan2(d.dot(frames[v].t2), d.dot(frames[v].t1)));
  }
  return theta;
}

CrossField optimizeCrossField(const TriMesh& mesh, const CurvatureField& curvature, const CrossFieldOptions& options) {
  if (curvature.dir1.size() != mesh.vertexCount()) {
    throw Error(ErrorCode::LengthMismatch, "curvature field does not match the mesh");
  }
  std::vector<double> conf(mesh.vertexCount());
  for (std::size_t v = 0; v < conf.size(); ++v) conf[v] = anisotropyConfidence(curvature.kappa1[v], curvature.kappa2[v]);
  const std::vector<TangentFrame> frames = tangentFrames(mesh);
  CrossField field = optimizeCrossField(mesh, initialCrossAngles(frames, curvature), std::move(conf), options);
  field.principalAngle.resize(frames.size());
  for (std::size_t v = 0; v < frames.size(); ++v) {
    const Vec3& d = curvature.dir1[v];
    field.principalAngle[v] = std::atan2(d.dot(frames[v].t2), d.dot(frames[v].t1));
  }
  return field;
}

CrossField optimizeCrossField(const TriMesh& mesh, std::vector<double> theta0, std::vector<double> confidence,
                              const CrossFieldOptions& options) {
  const std::size_t n = mesh.vertexCount();
  if (theta0.size() != n || confidence.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "cross field inputs do not match the mesh");
  }
  CrossField field;
  field.tangentFrames = tangentFrames(mesh);
  field.confidence = confidence;
  field.initialTheta = theta0;
  field.principalAngle = theta0;
  const CrossFieldEnergy energy(mesh, field.tangentFrames, theta0, std::move(confidence), options.lambda);

  std::vector<char> fixed(n, 0);
  for (int v : options.fixedVertices) {
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw Error(ErrorCode::InvalidArgument, "fixed vertex out of range");
    fixed[static_cast<std::size_t>(v)] = 1;
  }
  // Free variables only; fixed vertices keep their initial angle.
  std::vector<int> freeIndex;
  for (std::size_t v = 0; v < n; ++v) {
    if (!fixed[v]) freeIndex.push_back(static_cast<int>(v));
  }
  Eigen::VectorXd full = Eigen::Map<const Eigen::VectorXd>(theta0.data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd x0(static_cast<Eigen::Index>(freeIndex.size()));
  for (std::size_t k = 0; k < freeIndex.size(); ++k) x0[static_cast<Eigen::Index>(k)] = full[freeIndex[k]];
  Eigen::VectorXd fullGrad;
  const bool allFree = freeIndex.size() == n;
  const Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    if (allFree) return energy(x, g);
    Eigen::VectorXd t = full;
    for (std::size_t k = 0; k < freeIndex.size(); ++k) t[freeIndex[k]] = x[static_cast<Eigen::Index>(k)];
    const double e = energy(t, fullGrad);
    g.resize(x.size());
    for (std::size_t k = 0; k < freeIndex.size(); ++k) g[static_cast<Eigen::Index>(k)] = fullGrad[freeIndex[k]];
    return e;
  };
  field.initialEnergy = energy.value(full);
  const LbfgsResult r = minimizeLbfgs(objective, x0, options.solver);
  for (std::size_t k = 0; k < freeIndex.size(); ++k) full[freeIndex[k]] = r.x[static_cast<Eigen::Index>(k)];
  field.energy = r.value;
  field.iterations = r.iterations;
  field.converged = r.converged;
  field.theta.resize(n);
  for (std::size_t v = 0; v < n; ++v) field.theta[v] = wrapQuarter(full[static_cast<Eigen::Index>(v)]);
  return field;
}

}  // namespace vdk
