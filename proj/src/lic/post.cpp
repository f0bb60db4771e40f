#include "vdk/lic/post.hpp"

#include <cmath>

#include "vdk/core/error.hpp"
#include "vdk/core/parallel.hpp"
#include "vdk/core/random.hpp"
#include "vdk/mesh/geometry.hpp"

namespace vdk {

namespace {

double radicalInverse(unsigned k, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (k > 0) {
    r += f * (k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

bool sameObject(const FrameBuffer& fb, std::size_t a, int x, int y) {
  return fb.inside(x, y) && fb.objectMask[fb.index(x, y)] == fb.objectMask[a];
}

}  // namespace

ScalarImage computeSsao(const FrameBuffer& fb, const Camera& camera, double radius, int samples,
                        std::uint64_t seed) {
  ScalarImage raw(fb.width, fb.height, 0.0);
  if (samples <= 0 || radius <= 0.0) return raw;
  const Camera cam = camera.withViewport(fb.width, fb.height);
  // Hemisphere kernel in (t1, t2, n) coordinates: cosine-weighted with the
  // elevation kept above ~11 degrees, lengths from 0.2 to 1 radius.
  Random rng(seed ^ 0x55A0ull);
  const double du = rng.uniform(), dv = rng.uniform(), dw = rng.uniform();
  std::vector<Vec3> kernel;
  for (int k = 0; k < samples; ++k) {
    const double u = std::fmod((k + 0.5) / samples + du, 1.0);
    const double v = std::fmod(radicalInverse(static_cast<unsigned>(k), 2) + dv, 1.0);
    const double w = std::fmod(radicalInverse(static_cast<unsigned>(k), 3) + dw, 1.0);
    const double cosTheta = std::sqrt(0.04 + 0.96 * u);
    const double sinTheta = std::sqrt(1.0 - cosTheta * cosTheta);
    const double phi = 2.0 * kPi * v;
    const double len = 0.2 + 0.8 * w * w;
    kernel.emplace_back(len * sinTheta * std::cos(phi), len * sinTheta * std::sin(phi), len * cosTheta);
  }
  const double bias = 0.025 * radius;
  parallelFor(0, static_cast<std::size_t>(fb.height), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < fb.width; ++x) {
      const std::size_t i = fb.index(x, y);
      if (!fb.covered(i)) continue;
      const Vec3 n = fb.worldNormal[i].normalized();
      const Vec3 t1 = anyPerpendicular(n);
      const Vec3 t2 = n.cross(t1);
      const double rot = 2.0 * kPi * ((x & 3) * 4 + (y & 3)) / 16.0;
      const double c = std::cos(rot), s = std::sin(rot);
      int occluded = 0;
      for (const Vec3& k : kernel) {
        const double kx = c * k.x() - s * k.y(), ky = s * k.x() + c * k.y();
        const Vec3 q = fb.position[i] + radius * (kx * t1 + ky * t2 + k.z() * n);
        const Vec3 sq = cam.project(q);
        if (sq.z() <= 0.0) continue;
        const int px = static_cast<int>(std::floor(sq.x())), py = static_cast<int>(std::floor(sq.y()));
        if (!fb.inside(px, py)) continue;
        const double b = fb.viewDepth[fb.index(px, py)];
        if (b < sq.z() - bias && sq.z() - b < radius) ++occluded;
      }
      raw.data[i] = static_cast<double>(occluded) / samples;
    }
  });
  ScalarImage out(fb.width, fb.height, 0.0);
  for (int y = 0; y < fb.height; ++y) {
    for (int x = 0; x < fb.width; ++x) {
      const std::size_t i = fb.index(x, y);
      if (!fb.covered(i)) continue;
      double sum = 0.0;
      int n = 0;
      for (int dy = -2; dy < 2; ++dy) {
        for (int dx = -2; dx < 2; ++dx) {
          if (!sameObject(fb, i, x + dx, y + dy)) continue;
          sum += raw.at(x + dx, y + dy);
          ++n;
        }
      }
      out.data[i] = sum / n;
    }
  }
  return out;
}

VectorImage illuminationGradient(const FrameBuffer& fb, bool rotate) {
  VectorImage g(fb.width, fb.height);
  for (int y = 0; y < fb.height; ++y) {
    for (int x = 0; x < fb.width; ++x) {
      const std::size_t i = fb.index(x, y);
      if (!fb.covered(i)) continue;
      if (!sameObject(fb, i, x - 1, y) || !sameObject(fb, i, x + 1, y) || !sameObject(fb, i, x, y - 1) ||
          !sameObject(fb, i, x, y + 1)) {
        continue;
      }
      const double gx = 0.5 * (fb.illum[fb.index(x + 1, y)] - fb.illum[fb.index(x - 1, y)]);
      const double gy = 0.5 * (fb.illum[fb.index(x, y + 1)] - fb.illum[fb.index(x, y - 1)]);
      g.at(x, y) = rotate ? Vec2(-gy, gx) : Vec2(gx, gy);
    }
  }
  return g;
}

ScalarImage magnitude(const VectorImage& field) {
  ScalarImage m(field.width, field.height);
  for (std::size_t i = 0; i < field.data.size(); ++i) m.data[i] = field.data[i].norm();
  return m;
}

VectorImage projectDirectionField(const FrameBuffer& fb, const Scene& scene,
                                  const std::vector<std::vector<Vec3>>& directions) {
  const Camera cam = scene.camera.withViewport(fb.width, fb.height);
  VectorImage out(fb.width, fb.height);
  for (int y = 0; y < fb.height; ++y) {
    for (int x = 0; x < fb.width; ++x) {
      const std::size_t i = fb.index(x, y);
      if (!fb.covered(i)) continue;
      const auto inst = static_cast<std::size_t>(fb.objectMask[i]);
      if (inst >= directions.size() || directions[inst].empty()) continue;
      const Face& f = scene.instances[inst].mesh->faces()[static_cast<std::size_t>(fb.face[i])];
      const Vec3& p = fb.position[i];
      const Vec3 ps = cam.project(p);
      const double eps = 1e-3 * std::max(1.0, ps.z());
      Vec2 sum = Vec2::Zero(), ref = Vec2::Zero();
      for (int k = 0; k < 3; ++k) {
        const Vec3 q = cam.project(p + eps * directions[inst][static_cast<std::size_t>(f[k])]);
        Vec2 d(q.x() - ps.x(), q.y() - ps.y());
        if (d.squaredNorm() < 1e-24) continue;
        d.normalize();
        if (ref.squaredNorm() == 0.0) ref = d;
        if (d.dot(ref) < 0.0) d = -d;
        sum += fb.bary[i][k] * d;
      }
      if (sum.squaredNorm() > 1e-24) out.data[i] = sum.normalized();
    }
  }
  return out;
}

ScalarImage modulatedNoise(const FrameBuffer& fb, std::uint64_t seed, double cellSize) {
  if (!(cellSize > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise cell size must be positive");
  ScalarImage out(fb.width, fb.height, 0.0);
  for (std::size_t i = 0; i < fb.size(); ++i) {
    if (!fb.covered(i) || fb.illum[i] == 0.0) continue;
    const Vec3& p = fb.position[i];
    std::uint64_t h = mix64(seed) ^ mix64(static_cast<std::uint64_t>(fb.objectMask[i]) + 0x1234);
    for (int k = 0; k < 3; ++k) {
      const auto q = static_cast<std::int64_t>(std::floor(p[k] / cellSize));
      h = mix64(h ^ static_cast<std::uint64_t>(q));
    }
    out.data[i] = hashToUnit(h) * fb.illum[i];
  }
  return out;
}

BinaryImage detectEdges(const FrameBuffer& fb, double depthRange, double depthThreshold, double normalAngleDeg) {
  BinaryImage e(fb.width, fb.height);
  const double cosLimit = std::cos(degToRad(normalAngleDeg));
  const double jump = depthThreshold * depthRange;
  auto differs = [&](std::size_t a, std::size_t b) {
    if (fb.covered(a) != fb.covered(b)) return true;
    if (!fb.covered(a)) return false;
    if (std::abs(fb.viewDepth[a] - fb.viewDepth[b]) > jump) return true;
    return fb.normal[a].dot(fb.normal[b]) < cosLimit;
  };
  for (int y = 0; y < fb.height; ++y) {
    for (int x = 0; x < fb.width; ++x) {
      const std::size_t i = fb.index(x, y);
      if (x + 1 < fb.width && differs(i, i + 1)) e.data[i] = e.data[i + 1] = 1;
      if (y + 1 < fb.height && differs(i, i + fb.width)) e.data[i] = e.data[i + fb.width] = 1;
    }
  }
  return e;
}

ScalarImage licConvolve(const ScalarImage& noise, const VectorImage& field, int halfLength, const BinaryImage& edges,
                        std::vector<int>* counts) {
  if (halfLength < 0) throw Error(ErrorCode::InvalidArgument, "lic half length must be >= 0");
  if (field.width != noise.width || field.height != noise.height) {
    throw Error(ErrorCode::InvalidArgument, "lic field and noise differ in size");
  }
  const bool masked = !edges.empty();
  if (masked && (edges.width != noise.width || edges.height != noise.height)) {
    throw Error(ErrorCode::InvalidArgument, "edge mask differs in size");
  }
  const int w = noise.width, h = noise.height;
  ScalarImage out(w, h);
  if (counts) counts->assign(noise.data.size(), 1);
  auto inside = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h; };
  auto edge = [&](int x, int y) { return masked && edges.at(x, y); };
  auto fieldAt = [&](const Vec2& p, Vec2& v) {
    const int x = static_cast<int>(std::floor(p.x())), y = static_cast<int>(std::floor(p.y()));
    if (!inside(x, y)) return false;
    v = field.at(x, y);
    const double n = v.norm();
    if (!(n > 1e-12)) return false;
    v /= n;
    return true;
  };
  parallelFor(0, static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y0 = static_cast<int>(row);
    for (int x0 = 0; x0 < w; ++x0) {
      double sum = noise.at(x0, y0);
      int n = 1;
      Vec2 start;
      if (halfLength > 0 && !edge(x0, y0) && fieldAt(Vec2(x0 + 0.5, y0 + 0.5), start)) {
        for (const double dir : {1.0, -1.0}) {
          Vec2 p(x0 + 0.5, y0 + 0.5), prev = dir * start;
          int px = x0, py = y0;
          for (int step = 0; step < halfLength; ++step) {
            Vec2 v1, v2;
            if (!fieldAt(p, v1)) break;
            if (v1.dot(prev) < 0.0) v1 = -v1;
            if (!fieldAt(p + 0.5 * v1, v2)) break;
            if (v2.dot(v1) < 0.0) v2 = -v2;
            const Vec2 q = p + v2;
            const int qx = static_cast<int>(std::floor(q.x())), qy = static_cast<int>(std::floor(q.y()));
            if (!inside(qx, qy) || edge(qx, qy)) break;
            if (qx != px && qy != py && (edge(qx, py) || edge(px, qy))) break;
            Vec2 vq;
            if (!fieldAt(q, vq)) break;
            sum += noise.at(qx, qy);
            ++n;
            p = q;
            px = qx;
            py = qy;
            prev = v2;
          }
        }
      }
      out.at(x0, y0) = sum / n;
      if (counts) (*counts)[static_cast<std::size_t>(y0) * w + x0] = n;
    }
  });
  return out;
}

}  // namespace vdk
