#include "vdk/mesh/geometry.hpp"

#include <Eigen/Dense>

namespace vdk {

double signedVolume(std::span<const Vec3> vertices, std::span<const Face> faces) {
  double sum = 0.0;
  for (const Face& f : faces) sum += vertices[f[0]].dot(vertices[f[1]].cross(vertices[f[2]]));
  return sum / 6.0;
}

VolumeEstimate meshVolume(const TriMesh& mesh) {
  return {signedVolume(mesh.vertices(), mesh.faces()), mesh.isClosed()};
}

Vec3 anyPerpendicular(const Vec3& n) {
  const Vec3 axis = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return n.cross(axis).normalized();
}

std::vector<std::array<double, 3>> cornerAreas(const TriMesh& mesh) {
  std::vector<std::array<double, 3>> out(mesh.faceCount());
  const auto& V = mesh.vertices();
  for (std::size_t i = 0; i < mesh.faceCount(); ++i) {
    const Face& f = mesh.faces()[i];
    const std::array<Vec3, 3> e = {V[f[2]] - V[f[1]], V[f[0]] - V[f[2]], V[f[1]] - V[f[0]]};
    const double area = mesh.faceAreas()[i];
    const std::array<double, 3> l2 = {e[0].squaredNorm(), e[1].squaredNorm(), e[2].squaredNorm()};
    const std::array<double, 3> ew = {l2[0] * (l2[1] + l2[2] - l2[0]), l2[1] * (l2[2] + l2[0] - l2[1]),
                                      l2[2] * (l2[0] + l2[1] - l2[2])};
    auto& c = out[i];
    if (ew[0] <= 0.0) {
      c[1] = -0.25 * l2[2] * area / e[0].dot(e[2]);
      c[2] = -0.25 * l2[1] * area / e[0].dot(e[1]);
      c[0] = area - c[1] - c[2];
    } else if (ew[1] <= 0.0) {
      c[2] = -0.25 * l2[0] * area / e[1].dot(e[0]);
      c[0] = -0.25 * l2[2] * area / e[1].dot(e[2]);
      c[1] = area - c[2] - c[0];
    } else if (ew[2] <= 0.0) {
      c[0] = -0.25 * l2[1] * area / e[2].dot(e[1]);
      c[1] = -0.25 * l2[0] * area / e[2].dot(e[0]);
      c[2] = area - c[0] - c[1];
    } else {
      const double scale = 0.5 * area / (ew[0] + ew[1] + ew[2]);
      for (int j = 0; j < 3; ++j) c[j] = scale * (ew[(j + 1) % 3] + ew[(j + 2) % 3]);
    }
  }
  return out;
}

namespace {

// Rotates the frame (u, v) about the axis that carries its normal onto newNormal.
void rotateFrame(Vec3& u, Vec3& v, const Vec3& newNormal) {
  const Vec3 oldNormal = u.cross(v);
  const double ndot = oldNormal.dot(newNormal);
  if (ndot <= -1.0) {
    u = -u;
    v = -v;
    return;
  }
  const Vec3 perpOld = newNormal - ndot * oldNormal;
  const Vec3 dperp = (oldNormal + newNormal) / (1.0 + ndot);
  u -= dperp * u.dot(perpOld);
  v -= dperp * v.dot(perpOld);
}

}  // namespace

std::vector<Vec3> maxWeightedNormals(const TriMesh& mesh) {
  const auto& V = mesh.vertices();
  std::vector<Vec3> normals(V.size(), Vec3::Zero());
  for (const Face& f : mesh.faces()) {
    for (int j = 0; j < 3; ++j) {
      const Vec3 a = V[f[(j + 1) % 3]] - V[f[j]];
      const Vec3 b = V[f[(j + 2) % 3]] - V[f[j]];
      normals[f[j]] += a.cross(b) / (a.squaredNorm() * b.squaredNorm());
    }
  }
  for (std::size_t v = 0; v < normals.size(); ++v) {
    const double len = normals[v].norm();
    normals[v] = len > 0.0 ? Vec3(normals[v] / len) : mesh.vertexNormals()[v];
  }
  return normals;
}

CurvatureField estimateCurvature(const TriMesh& mesh) {
  const std::size_t n = mesh.vertexCount();
  const auto& V = mesh.vertices();
  const std::vector<Vec3> N = maxWeightedNormals(mesh);
  CurvatureField out;
  out.kappa1.assign(n, 0.0);
  out.kappa2.assign(n, 0.0);
  out.dir1.assign(n, Vec3::Zero());
  out.dir2.assign(n, Vec3::Zero());
  out.meanCurvature.assign(n, 0.0);
  out.isolated = mesh.isolatedVertices();

  // Vertex tangent frames.
  std::vector<Vec3> frameU(n), frameV(n);
  for (std::size_t v = 0; v < n; ++v) {
    frameU[v] = anyPerpendicular(N[v]);
    frameV[v] = N[v].cross(frameU[v]);
  }

  const auto corners = cornerAreas(mesh);
  std::vector<double> pointArea(n, 0.0);
  for (std::size_t i = 0; i < mesh.faceCount(); ++i) {
    for (int j = 0; j < 3; ++j) pointArea[mesh.faces()[i][j]] += corners[i][j];
  }

  // Second fundamental form per vertex as (ku, kuv, kv) in the vertex frame.
  std::vector<Eigen::Vector3d> form(n, Eigen::Vector3d::Zero());
  for (std::size_t i = 0; i < mesh.faceCount(); ++i) {
    const Face& f = mesh.faces()[i];
    const std::array<Vec3, 3> e = {V[f[2]] - V[f[1]], V[f[0]] - V[f[2]], V[f[1]] - V[f[0]]};
    const Vec3 t = e[0].normalized();
    const Vec3 faceN = e[0].cross(e[1]);
    const Vec3 b = faceN.cross(t).normalized();

    Eigen::Matrix3d w = Eigen::Matrix3d::Zero();
    Eigen::Vector3d m = Eigen::Vector3d::Zero();
    for (int j = 0; j < 3; ++j) {
      const double u = e[j].dot(t);
      const double v = e[j].dot(b);
      w(0, 0) += u * u;
      w(0, 1) += u * v;
      w(2, 2) += v * v;
      const Vec3 dn = N[f[(j + 2) % 3]] - N[f[(j + 1) % 3]];
      const double dnu = dn.dot(t);
      const double dnv = dn.dot(b);
      m(0) += dnu * u;
      m(1) += dnu * v + dnv * u;
      m(2) += dnv * v;
    }
    w(1, 1) = w(0, 0) + w(2, 2);
    w(1, 2) = w(0, 1);
    w(1, 0) = w(0, 1);
    w(2, 1) = w(1, 2);
    const Eigen::Vector3d sff = w.ldlt().solve(m);

    for (int j = 0; j < 3; ++j) {
      const int vj = f[j];
      Vec3 ru = frameU[vj];
      Vec3 rv = frameV[vj];
      rotateFrame(ru, rv, faceN.normalized());
      const double u1 = ru.dot(t), v1 = ru.dot(b);
      const double u2 = rv.dot(t), v2 = rv.dot(b);
      const double ku = sff(0) * u1 * u1 + sff(1) * (2.0 * u1 * v1) + sff(2) * v1 * v1;
      const double kuv = sff(0) * u1 * u2 + sff(1) * (u1 * v2 + u2 * v1) + sff(2) * v1 * v2;
      const double kv = sff(0) * u2 * u2 + sff(1) * (2.0 * u2 * v2) + sff(2) * v2 * v2;
      const double wt = corners[i][j] / pointArea[vj];
      form[vj] += wt * Eigen::Vector3d(ku, kuv, kv);
    }
  }

  for (std::size_t v = 0; v < n; ++v) {
    if (mesh.vertexFaces()[v].empty()) {
      out.dir1[v] = frameU[v];
      out.dir2[v] = frameV[v];
      continue;
    }
    const double ku = form[v](0), kuv = form[v](1), kv = form[v](2);
    // Closed-form eigen-decomposition of [[ku, kuv], [kuv, kv]].
    const double mean = 0.5 * (ku + kv);
    const double dev = std::hypot(0.5 * (ku - kv), kuv);
    const double k1 = mean + dev;
    const double k2 = mean - dev;
    const double angle = 0.5 * std::atan2(2.0 * kuv, ku - kv);
    Vec3 d1 = (std::cos(angle) * frameU[v] + std::sin(angle) * frameV[v]).normalized();
    Vec3 d2 = N[v].cross(d1);
    // Report directions in the tangent plane of the mesh's own vertex normal.
    rotateFrame(d1, d2, mesh.vertexNormals()[v]);
    out.kappa1[v] = k1;
    out.kappa2[v] = k2;
    out.dir1[v] = d1.normalized();
    out.dir2[v] = mesh.vertexNormals()[v].cross(out.dir1[v]);
    out.meanCurvature[v] = 0.5 * (k1 + k2);
  }
  return out;
}

}  // namespace vdk
