#include "vdk/mesh/primitives.hpp"

#include <map>
#include <unordered_map>

#include "vdk/core/error.hpp"

namespace vdk::primitives {

TriMesh icosphere(double radius, int subdivisions, const Vec3& center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                         {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                         {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoints;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      if (auto it = midpoints.find(key); it != midpoints.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int idx = static_cast<int>(v.size()) - 1;
      midpoints.emplace(key, idx);
      return idx;
    };
    std::vector<Face> next;
    next.reserve(f.size() * 4);
    for (const Face& tri : f) {
      const int ab = mid(tri[0], tri[1]), bc = mid(tri[1], tri[2]), ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (Vec3& p : v) p = center + radius * p;
  return TriMesh(std::move(v), std::move(f));
}

TriMesh cube(double lo, double hi) {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) v.emplace_back((i & 1) ? hi : lo, (i & 2) ? hi : lo, (i & 4) ? hi : lo);
  std::vector<Face> f = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                         {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return TriMesh(std::move(v), std::move(f));
}

TriMesh gridPatch(int nx, int ny, double sx, double sy) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) v.emplace_back(sx * i / nx, sy * j / ny, 0.0);
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh hexPatch(double edge) {
  std::vector<Vec3> v = {Vec3::Zero()};
  for (int k = 0; k < 6; ++k) {
    const double a = kPi / 3.0 * k;
    v.emplace_back(edge * std::cos(a), edge * std::sin(a), 0.0);
  }
  std::vector<Face> f;
  for (int k = 0; k < 6; ++k) f.push_back({0, 1 + k, 1 + (k + 1) % 6});
  return TriMesh(std::move(v), std::move(f));
}

TriMesh openCylinder(double radius, double length, int segments, int rings) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  for (int r = 0; r < rings; ++r) {
    const double z = length * r / (rings - 1);
    for (int s = 0; s < segments; ++s) {
      const double a = 2.0 * kPi * s / segments;
      v.emplace_back(radius * std::cos(a), radius * std::sin(a), z);
    }
  }
  for (int r = 0; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      const int a = r * segments + s, b = r * segments + (s + 1) % segments;
      const int c = a + segments, d = b + segments;
      f.push_back({a, b, d});
      f.push_back({a, d, c});
    }
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh revolve(const std::vector<Vec2>& profile, int segments) {
  if (profile.size() < 3 || profile.front().y() != 0.0 || profile.back().y() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "revolve profile must start and end on the axis");
  }
  std::vector<Vec3> v;
  std::vector<Face> f;
  v.emplace_back(0.0, 0.0, profile.front().x());
  const int rings = static_cast<int>(profile.size()) - 2;
  for (int r = 0; r < rings; ++r) {
    const Vec2& p = profile[static_cast<std::size_t>(r) + 1];
    for (int s = 0; s < segments; ++s) {
      const double a = 2.0 * kPi * s / segments;
      v.emplace_back(p.y() * std::cos(a), p.y() * std::sin(a), p.x());
    }
  }
  v.emplace_back(0.0, 0.0, profile.back().x());
  const int last = static_cast<int>(v.size()) - 1;
  auto id = [segments](int r, int s) { return 1 + r * segments + (s % segments); };
  // Profile runs toward +z, so (s, s+1) winding with the lower pole first keeps normals outward.
  for (int s = 0; s < segments; ++s) f.push_back({0, id(0, s + 1), id(0, s)});
  for (int r = 0; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      f.push_back({id(r, s), id(r, s + 1), id(r + 1, s + 1)});
      f.push_back({id(r, s), id(r + 1, s + 1), id(r + 1, s)});
    }
  }
  for (int s = 0; s < segments; ++s) f.push_back({last, id(rings - 1, s), id(rings - 1, s + 1)});
  return TriMesh(std::move(v), std::move(f));
}

TriMesh roundedTube(double length, double r0, double r1, int segments, double profileStep) {
  // Tangent line between circles (0, r0) and (length, r1) in the (z, r) plane.
  const double sinPhi = (r0 - r1) / length;  // cone half-angle
  const double phi = std::asin(std::clamp(sinPhi, -1.0, 1.0));
  // Contact polar angle measured from +z axis on each sphere.
  const double contact = kPi / 2.0 + phi;
  std::vector<Vec2> profile;
  auto arc = [&](double cz, double r, double a0, double a1) {
    const int n = std::max(2, static_cast<int>(std::ceil(std::abs(a1 - a0) * r / profileStep)));
    for (int i = 0; i < n; ++i) {
      const double a = a0 + (a1 - a0) * i / n;
      profile.emplace_back(cz + r * std::cos(a), std::abs(r * std::sin(a)));
    }
  };
  // Lower cap from the pole (angle pi) up to the contact angle.
  arc(0.0, r0, kPi, contact);
  const Vec2 p0(r0 * std::cos(contact), r0 * std::sin(contact));
  const Vec2 p1(length + r1 * std::cos(contact), r1 * std::sin(contact));
  const int nLine = std::max(2, static_cast<int>(std::ceil((p1 - p0).norm() / profileStep)));
  for (int i = 0; i < nLine; ++i) profile.push_back(p0 + (p1 - p0) * (static_cast<double>(i) / nLine));
  arc(length, r1, contact, 0.0);
  profile.emplace_back(length + r1, 0.0);
  profile.front().y() = 0.0;
  return revolve(profile, segments);
}

TriMesh torus(double majorRadius, double minorRadius, int majorSegments, int minorSegments) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  for (int i = 0; i < majorSegments; ++i) {
    const double u = 2.0 * kPi * i / majorSegments;
    for (int j = 0; j < minorSegments; ++j) {
      const double w = 2.0 * kPi * j / minorSegments;
      const double rr = majorRadius + minorRadius * std::cos(w);
      v.emplace_back(rr * std::cos(u), rr * std::sin(u), minorRadius * std::sin(w));
    }
  }
  auto id = [&](int i, int j) { return (i % majorSegments) * minorSegments + (j % minorSegments); };
  for (int i = 0; i < majorSegments; ++i) {
    for (int j = 0; j < minorSegments; ++j) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh polygonize(const std::function<double(const Vec3&)>& sdf, const BoundingBox& box, double cell) {
  const Vec3 ext = box.extent();
  const int nx = static_cast<int>(std::ceil(ext.x() / cell)) + 1;
  const int ny = static_cast<int>(std::ceil(ext.y() / cell)) + 1;
  const int nz = static_cast<int>(std::ceil(ext.z() / cell)) + 1;
  auto gid = [&](int i, int j, int k) -> std::int64_t {
    return (static_cast<std::int64_t>(k) * ny + j) * nx + i;
  };
  auto gpos = [&](std::int64_t id) {
    const auto i = id % nx, j = (id / nx) % ny, k = id / (static_cast<std::int64_t>(nx) * ny);
    return Vec3(box.min.x() + cell * static_cast<double>(i), box.min.y() + cell * static_cast<double>(j),
                box.min.z() + cell * static_cast<double>(k));
  };
  std::vector<double> value(static_cast<std::size_t>(nx) * ny * nz);
  const double nudge = 1e-4 * cell;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        double d = sdf(gpos(gid(i, j, k)));
        // Keep the surface off grid nodes so no triangle degenerates.
        if (std::abs(d) < nudge) d = nudge;
        value[static_cast<std::size_t>(gid(i, j, k))] = d;
      }
    }
  }

  std::vector<Vec3> verts;
  std::vector<Face> faces;
  std::unordered_map<std::uint64_t, int> edgeVertex;
  const std::uint64_t total = static_cast<std::uint64_t>(nx) * ny * nz;
  auto vertexOn = [&](std::int64_t a, std::int64_t b) {
    if (a > b) std::swap(a, b);
    const std::uint64_t key = static_cast<std::uint64_t>(a) * total + static_cast<std::uint64_t>(b);
    if (auto it = edgeVertex.find(key); it != edgeVertex.end()) return it->second;
    const double fa = value[static_cast<std::size_t>(a)], fb = value[static_cast<std::size_t>(b)];
    const double t = fa / (fa - fb);
    verts.push_back(gpos(a) + t * (gpos(b) - gpos(a)));
    const int idx = static_cast<int>(verts.size()) - 1;
    edgeVertex.emplace(key, idx);
    return idx;
  };
  auto emit = [&](int a, int b, int c, const Vec3& outward) {
    const Vec3 nrm = (verts[b] - verts[a]).cross(verts[c] - verts[a]);
    if (nrm.dot(outward) < 0.0) std::swap(b, c);
    faces.push_back({a, b, c});
  };

  // Freudenthal split: six tetrahedra along the diagonal 0 -> 7, corner bits
  // x = 1, y = 2, z = 4. The split is identical in every cell, so shared faces match.
  static constexpr int kTets[6][4] = {{0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7},
                                      {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}};
  for (int k = 0; k + 1 < nz; ++k) {
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i + 1 < nx; ++i) {
        std::array<std::int64_t, 8> c{};
        for (int q = 0; q < 8; ++q) c[q] = gid(i + (q & 1), j + ((q >> 1) & 1), k + ((q >> 2) & 1));
        for (const auto& tet : kTets) {
          std::array<std::int64_t, 4> ids{c[tet[0]], c[tet[1]], c[tet[2]], c[tet[3]]};
          std::vector<std::int64_t> in, out;
          for (auto id : ids) (value[static_cast<std::size_t>(id)] < 0.0 ? in : out).push_back(id);
          if (in.empty() || out.empty()) continue;
          Vec3 inC = Vec3::Zero(), outC = Vec3::Zero();
          for (auto id : in) inC += gpos(id);
          for (auto id : out) outC += gpos(id);
          const Vec3 outward = outC / static_cast<double>(out.size()) - inC / static_cast<double>(in.size());
          if (in.size() == 1 || out.size() == 1) {
            const bool single = in.size() == 1;
            const auto apex = single ? in[0] : out[0];
            const auto& others = single ? out : in;
            emit(vertexOn(apex, others[0]), vertexOn(apex, others[1]), vertexOn(apex, others[2]), outward);
          } else {
            const int a = vertexOn(in[0], out[0]), b = vertexOn(in[0], out[1]);
            const int c2 = vertexOn(in[1], out[1]), d = vertexOn(in[1], out[0]);
            emit(a, b, c2, outward);
            emit(a, c2, d, outward);
          }
        }
      }
    }
  }
  return TriMesh(std::move(verts), std::move(faces));
}

double roundConeSdf(const Vec3& p, const Vec3& a, const Vec3& b, double ra, double rb) {
  // Exact distance to a tapered capsule (sphere-swept cone).
  const Vec3 ba = b - a;
  const double l2 = ba.squaredNorm();
  const double rr = ra - rb;
  const double a2 = l2 - rr * rr;
  const double il2 = 1.0 / l2;
  const Vec3 pa = p - a;
  const double y = pa.dot(ba);
  const double z = y - l2;
  const double x2 = (pa * l2 - ba * y).squaredNorm();
  const double y2 = y * y * l2;
  const double z2 = z * z * l2;
  const double k = (rr > 0 ? 1.0 : -1.0) * rr * rr * x2;
  if ((z > 0 ? 1.0 : -1.0) * a2 * z2 > k) return std::sqrt(x2 + z2) * il2 - rb;
  if ((y > 0 ? 1.0 : -1.0) * a2 * y2 < k) return std::sqrt(x2 + y2) * il2 - ra;
  return (std::sqrt(x2 * a2 * il2) + y * rr) * il2 - ra;
}

double smoothMin(double a, double b, double k) {
  const double h = std::max(k - std::abs(a - b), 0.0) / k;
  return std::min(a, b) - h * h * k * 0.25;
}

double branchesSdf(const Vec3& p, const std::vector<Branch>& branches, double blend) {
  double d = std::numeric_limits<double>::infinity();
  for (const Branch& br : branches) {
    const double bd = roundConeSdf(p, br.from, br.to, br.radiusFrom, br.radiusTo);
    d = std::isinf(d) ? bd : smoothMin(d, bd, blend);
  }
  return d;
}

TriMesh yBranch(double armLength, double radius, double cell, std::vector<Vec3>* tips) {
  std::vector<Branch> arms;
  BoundingBox box;
  for (int k = 0; k < 3; ++k) {
    const double a = kPi / 2.0 + 2.0 * kPi * k / 3.0;
    const Vec3 dir(std::cos(a), std::sin(a), 0.0);
    arms.push_back({Vec3::Zero(), armLength * dir, radius, radius});
    if (tips) tips->push_back((armLength + radius) * dir);
    box.extend((armLength + radius) * dir);
  }
  const double pad = radius + 2.0 * cell;
  box.min -= Vec3::Constant(pad);
  box.max += Vec3::Constant(pad);
  return polygonize([&](const Vec3& p) { return branchesSdf(p, arms, 0.5 * radius); }, box, cell);
}

std::vector<Branch> vesselTreeBranches() {
  // Hand-placed portal-vein-like tree, millimetres. Root enters at the left.
  const Vec3 root(-55, -5, 0), j1(-25, 0, 2), j2(5, 12, -4), j3(0, -18, 6), j4(30, 25, 3), j5(28, -5, -10);
  return {
      {root, j1, 6.0, 5.0},
      {j1, j2, 5.0, 4.0},
      {j1, j3, 4.2, 3.4},
      {j2, j4, 4.0, 3.0},
      {j2, j5, 3.6, 2.8},
      {j4, Vec3(52, 38, 10), 3.0, 2.0},
      {j4, Vec3(45, 20, -14), 2.8, 1.9},
      {j5, Vec3(52, -12, -2), 2.8, 1.9},
      {j5, Vec3(36, 6, -28), 2.6, 1.8},
      {j3, Vec3(20, -38, 14), 3.4, 2.2},
      {j3, Vec3(-18, -40, -6), 3.0, 2.0},
      {j2, Vec3(-6, 38, 8), 2.6, 1.8},
  };
}

TriMesh vesselTree(double cell) {
  const auto branches = vesselTreeBranches();
  BoundingBox box;
  double rmax = 0.0;
  for (const auto& b : branches) {
    box.extend(b.from);
    box.extend(b.to);
    rmax = std::max({rmax, b.radiusFrom, b.radiusTo});
  }
  const double pad = rmax + 2.0 * cell;
  box.min -= Vec3::Constant(pad);
  box.max += Vec3::Constant(pad);
  return polygonize([&](const Vec3& p) { return branchesSdf(p, branches, 2.0); }, box, cell);
}

}  // namespace vdk::primitives
