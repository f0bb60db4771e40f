#include "vdk/render/rasterizer.hpp"

#include <cmath>

#include "vdk/core/error.hpp"
#include "vdk/core/parallel.hpp"

namespace vdk {
namespace {

constexpr double kSubpixel = 256.0;
constexpr double kGuardBand = 1e9;
constexpr int kTile = 32;

struct ScreenTri {
  int instance = 0;
  int face = 0;
  double sx[3];
  double sy[3];
  double invDepth[3];
  Vec3 source[3];  // barycentric position of each vertex within the original face
  long long X[3];
  long long Y[3];
  int x0, x1, y0, y1;  // inclusive pixel bounds
};

struct ClipVertex {
  Vec3 view;  // (right, up, depth)
  Vec3 source;
};

long long snap(double v) { return std::llround(std::clamp(v, -kGuardBand, kGuardBand) * kSubpixel); }

__int128 edge(long long ax, long long ay, long long bx, long long by, long long px, long long py) {
  return static_cast<__int128>(bx - ax) * (py - ay) - static_cast<__int128>(by - ay) * (px - ax);
}

// Edges with zero edge function are owned by one of the two triangles that
// share them: the one traversing the edge downward, or leftward when flat.
bool ownsEdge(long long ax, long long ay, long long bx, long long by) {
  const long long dy = by - ay;
  return dy > 0 || (dy == 0 && bx - ax < 0);
}

void emitTriangle(const Camera& cam, const ClipVertex& a, const ClipVertex& b, const ClipVertex& c, int instance,
                  int face, std::vector<ScreenTri>& out) {
  ScreenTri t;
  t.instance = instance;
  t.face = face;
  const ClipVertex* v[3] = {&a, &b, &c};
  const double th = cam.tanHalfFov();
  for (int k = 0; k < 3; ++k) {
    const Vec3& p = v[k]->view;
    const double nx = p.x() / (p.z() * th * cam.aspect());
    const double ny = p.y() / (p.z() * th);
    t.sx[k] = std::clamp((nx + 1.0) * 0.5 * cam.width, -kGuardBand, kGuardBand);
    t.sy[k] = std::clamp((1.0 - ny) * 0.5 * cam.height, -kGuardBand, kGuardBand);
    t.invDepth[k] = 1.0 / p.z();
    t.source[k] = v[k]->source;
    t.X[k] = snap(t.sx[k]);
    t.Y[k] = snap(t.sy[k]);
  }
  const __int128 area = edge(t.X[0], t.Y[0], t.X[1], t.Y[1], t.X[2], t.Y[2]);
  if (area == 0) return;
  if (area < 0) {
    std::swap(t.sx[1], t.sx[2]);
    std::swap(t.sy[1], t.sy[2]);
    std::swap(t.invDepth[1], t.invDepth[2]);
    std::swap(t.source[1], t.source[2]);
    std::swap(t.X[1], t.X[2]);
    std::swap(t.Y[1], t.Y[2]);
  }
  const double minx = std::min({t.sx[0], t.sx[1], t.sx[2]});
  const double maxx = std::max({t.sx[0], t.sx[1], t.sx[2]});
  const double miny = std::min({t.sy[0], t.sy[1], t.sy[2]});
  const double maxy = std::max({t.sy[0], t.sy[1], t.sy[2]});
  t.x0 = std::max(0, static_cast<int>(std::floor(minx - 0.5)));
  t.x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(maxx - 0.5)));
  t.y0 = std::max(0, static_cast<int>(std::floor(miny - 0.5)));
  t.y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(maxy - 0.5)));
  if (t.x0 > t.x1 || t.y0 > t.y1) return;
  out.push_back(t);
}

// Clips one face against the near plane and appends its screen triangles.
void setupFace(const Camera& cam, const Vec3 world[3], int instance, int face, std::vector<ScreenTri>& out) {
  ClipVertex in[3];
  bool allFar = true;
  for (int k = 0; k < 3; ++k) {
    in[k].view = cam.toView(world[k]);
    in[k].source = Vec3::Unit(k);
    allFar = allFar && in[k].view.z() > cam.farPlane;
  }
  if (allFar) return;
  ClipVertex poly[4];
  int n = 0;
  const double nearZ = cam.nearPlane;
  for (int k = 0; k < 3; ++k) {
    const ClipVertex& cur = in[k];
    const ClipVertex& nxt = in[(k + 1) % 3];
    const bool curIn = cur.view.z() >= nearZ;
    const bool nxtIn = nxt.view.z() >= nearZ;
    if (curIn) poly[n++] = cur;
    if (curIn != nxtIn) {
      const double t = (nearZ - cur.view.z()) / (nxt.view.z() - cur.view.z());
      ClipVertex c;
      c.view = cur.view + t * (nxt.view - cur.view);
      c.view.z() = nearZ;
      c.source = cur.source + t * (nxt.source - cur.source);
      poly[n++] = c;
    }
  }
  for (int k = 1; k + 1 < n; ++k) emitTriangle(cam, poly[0], poly[k], poly[k + 1], instance, face, out);
}

}  // namespace

FrameBuffer rasterizeGeometry(const Scene& scene) {
  if (scene.instances.empty()) throw Error(ErrorCode::EmptyScene, "scene has no mesh instances");
  const Camera& cam = scene.camera;
  cam.validate();
  FrameBuffer fb(cam.width, cam.height);
  for (auto& c : fb.color) c = withAlpha(scene.background, 1.0);

  std::vector<ScreenTri> tris;
  for (std::size_t i = 0; i < scene.instances.size(); ++i) {
    const TriMesh& mesh = *scene.instances[i].mesh;
    const auto& V = mesh.vertices();
    const auto& F = mesh.faces();
    for (std::size_t f = 0; f < F.size(); ++f) {
      const Vec3 world[3] = {V[F[f][0]], V[F[f][1]], V[F[f][2]]};
      setupFace(cam, world, static_cast<int>(i), static_cast<int>(f), tris);
    }
  }

  const int tilesX = (cam.width + kTile - 1) / kTile;
  const int tilesY = (cam.height + kTile - 1) / kTile;
  std::vector<std::vector<int>> bins(static_cast<std::size_t>(tilesX) * tilesY);
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const ScreenTri& s = tris[t];
    for (int ty = s.y0 / kTile; ty <= s.y1 / kTile; ++ty) {
      for (int tx = s.x0 / kTile; tx <= s.x1 / kTile; ++tx) {
        bins[static_cast<std::size_t>(ty) * tilesX + tx].push_back(static_cast<int>(t));
      }
    }
  }

  parallelFor(0, bins.size(), [&](std::size_t b) {
    const int tx = static_cast<int>(b) % tilesX;
    const int ty = static_cast<int>(b) / tilesX;
    const int px0 = tx * kTile, py0 = ty * kTile;
    const int px1 = std::min(cam.width, px0 + kTile) - 1;
    const int py1 = std::min(cam.height, py0 + kTile) - 1;
    for (int ti : bins[b]) {
      const ScreenTri& s = tris[static_cast<std::size_t>(ti)];
      const double area = (s.sx[1] - s.sx[0]) * (s.sy[2] - s.sy[0]) - (s.sy[1] - s.sy[0]) * (s.sx[2] - s.sx[0]);
      for (int y = std::max(py0, s.y0); y <= std::min(py1, s.y1); ++y) {
        const long long PY = static_cast<long long>(y) * 256 + 128;
        for (int x = std::max(px0, s.x0); x <= std::min(px1, s.x1); ++x) {
          const long long PX = static_cast<long long>(x) * 256 + 128;
          bool inside = true;
          for (int k = 0; k < 3 && inside; ++k) {
            const int a = (k + 1) % 3, c = (k + 2) % 3;
            const __int128 e = edge(s.X[a], s.Y[a], s.X[c], s.Y[c], PX, PY);
            inside = e > 0 || (e == 0 && ownsEdge(s.X[a], s.Y[a], s.X[c], s.Y[c]));
          }
          if (!inside) continue;
          const double px = x + 0.5, py = y + 0.5;
          double w[3];
          double sum = 0.0;
          for (int k = 0; k < 3; ++k) {
            const int a = (k + 1) % 3, c = (k + 2) % 3;
            const double e = (s.sx[c] - s.sx[a]) * (py - s.sy[a]) - (s.sy[c] - s.sy[a]) * (px - s.sx[a]);
            w[k] = e / area * s.invDepth[k];
            sum += w[k];
          }
          if (!(sum > 0.0)) continue;
          const double viewDepth = 1.0 / sum;
          if (viewDepth > cam.farPlane || viewDepth < cam.nearPlane * (1.0 - 1e-12)) continue;
          const std::size_t idx = fb.index(x, y);
          const int cur = fb.objectMask[idx];
          const bool closer = cur == kNoObject || viewDepth < fb.viewDepth[idx] ||
                              (viewDepth == fb.viewDepth[idx] &&
                               (s.instance < cur || (s.instance == cur && s.face < fb.face[idx])));
          if (!closer) continue;
          const Vec3 bary = (s.source[0] * w[0] + s.source[1] * w[1] + s.source[2] * w[2]) / sum;
          fb.viewDepth[idx] = viewDepth;
          fb.objectMask[idx] = s.instance;
          fb.face[idx] = s.face;
          fb.bary[idx] = bary;
        }
      }
    }
  });

  const Vec3 light = scene.keyLightDirection();
  parallelFor(0, static_cast<std::size_t>(cam.height), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < cam.width; ++x) {
      const std::size_t idx = fb.index(x, y);
      if (fb.objectMask[idx] == kNoObject) continue;
      const TriMesh& mesh = *scene.instances[static_cast<std::size_t>(fb.objectMask[idx])].mesh;
      const Face& f = mesh.faces()[static_cast<std::size_t>(fb.face[idx])];
      const Vec3& b = fb.bary[idx];
      const Vec3 p = mesh.vertex(f[0]) * b[0] + mesh.vertex(f[1]) * b[1] + mesh.vertex(f[2]) * b[2];
      const auto& N = mesh.vertexNormals();
      Vec3 n = N[f[0]] * b[0] + N[f[1]] * b[1] + N[f[2]] * b[2];
      n = n.norm() > 0.0 ? n.normalized() : mesh.faceNormals()[static_cast<std::size_t>(fb.face[idx])];
      const Vec3 toCam = cam.position - p;
      if (mesh.faceNormals()[static_cast<std::size_t>(fb.face[idx])].dot(toCam) < 0.0) n = -n;
      fb.position[idx] = p;
      fb.worldNormal[idx] = n;
      fb.normal[idx] = cam.directionToView(n);
      fb.depth[idx] = cam.linearDepth(fb.viewDepth[idx]);
      fb.illum[idx] = std::max(0.0, n.dot(light));
    }
  });
  return fb;
}

Fragment fragmentAt(const FrameBuffer& fb, const Scene& scene, int x, int y) {
  Fragment frag;
  frag.x = x;
  frag.y = y;
  const std::size_t idx = fb.index(x, y);
  frag.instance = fb.objectMask[idx];
  if (frag.instance == kNoObject) return frag;
  frag.mesh = &scene.instances[static_cast<std::size_t>(frag.instance)];
  frag.face = fb.face[idx];
  frag.bary = fb.bary[idx];
  frag.position = fb.position[idx];
  frag.normal = fb.worldNormal[idx];
  frag.viewDir = (scene.camera.position - frag.position).normalized();
  frag.faceNormal = frag.mesh->mesh->faceNormals()[static_cast<std::size_t>(frag.face)];
  frag.backFacing = frag.faceNormal.dot(frag.viewDir) < 0.0;
  if (frag.backFacing) frag.faceNormal = -frag.faceNormal;
  frag.depth = fb.depth[idx];
  frag.viewDepth = fb.viewDepth[idx];
  return frag;
}

void shadeFrameBuffer(FrameBuffer& fb, const Scene& scene, const FragmentShader& shader) {
  parallelFor(0, static_cast<std::size_t>(fb.height), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < fb.width; ++x) {
      const std::size_t idx = fb.index(x, y);
      if (fb.objectMask[idx] == kNoObject) continue;
      const Rgba c = shader(fragmentAt(fb, scene, x, y));
      const double a = clamp01(c.w());
      fb.color[idx] = withAlpha(c.head<3>() * a + scene.background * (1.0 - a), 1.0);
    }
  });
}

FrameBuffer rasterize(const Scene& scene, const FragmentShader& shader) {
  FrameBuffer fb = rasterizeGeometry(scene);
  shadeFrameBuffer(fb, scene, shader);
  return fb;
}

}  // namespace vdk
