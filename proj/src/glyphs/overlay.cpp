#include "vdk/glyphs/overlay.hpp"

namespace vdk {

bool OverlayPainter::visible(int x, int y, double viewDepth, const OverlayOptions& opt) const {
  if (!fb_.inside(x, y)) return false;
  if (viewDepth < cam_.nearPlane || viewDepth > cam_.farPlane) return false;
  if (!opt.depthTest) return true;
  return viewDepth - opt.depthBias <= fb_.viewDepth[fb_.index(x, y)];
}

void OverlayPainter::blend(int x, int y, const Rgba& c) {
  const double a = clamp01(c.w());
  if (a <= 0.0) return;
  Rgba& dst = fb_.color[fb_.index(x, y)];
  dst.head<3>() = c.head<3>() * a + dst.head<3>() * (1.0 - a);
  dst.w() = a + dst.w() * (1.0 - a);
  ++written_;
}

void OverlayPainter::line(const Vec3& a, const Vec3& b, double widthPx, const Rgba& color, const OverlayOptions& opt) {
  const Vec3 pa = cam_.project(a), pb = cam_.project(b);
  if (pa.z() <= 0.0 || pb.z() <= 0.0) return;
  const double r = 0.5 * widthPx;
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min(pa.x(), pb.x()) - r)));
  const int x1 = std::min(fb_.width - 1, static_cast<int>(std::ceil(std::max(pa.x(), pb.x()) + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min(pa.y(), pb.y()) - r)));
  const int y1 = std::min(fb_.height - 1, static_cast<int>(std::ceil(std::max(pa.y(), pb.y()) + r)));
  const Vec2 A(pa.x(), pa.y()), B(pb.x(), pb.y());
  const Vec2 AB = B - A;
  const double len2 = AB.squaredNorm();
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 P(x + 0.5, y + 0.5);
      const double t = len2 > 0.0 ? clamp01((P - A).dot(AB) / len2) : 0.0;
      if ((A + t * AB - P).norm() > r) continue;
      const double depth = 1.0 / ((1.0 - t) / pa.z() + t / pb.z());
      if (!visible(x, y, depth, opt)) continue;
      blend(x, y, color);
    }
  }
}

void OverlayPainter::disc(const Vec3& center, double radiusPx, const Rgba& color, const OverlayOptions& opt) {
  billboard(center, radiusPx, [&](const Vec2& p) { return p.squaredNorm() <= 1.0 ? color : Rgba(0, 0, 0, 0); }, opt);
}

void OverlayPainter::billboard(const Vec3& center, double radiusPx, const std::function<Rgba(const Vec2&)>& shade,
                               const OverlayOptions& opt) {
  const Vec3 pc = cam_.project(center);
  if (pc.z() <= 0.0 || !(radiusPx > 0.0)) return;
  const int x0 = std::max(0, static_cast<int>(std::floor(pc.x() - radiusPx)));
  const int x1 = std::min(fb_.width - 1, static_cast<int>(std::ceil(pc.x() + radiusPx)));
  const int y0 = std::max(0, static_cast<int>(std::floor(pc.y() - radiusPx)));
  const int y1 = std::min(fb_.height - 1, static_cast<int>(std::ceil(pc.y() + radiusPx)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 local((x + 0.5 - pc.x()) / radiusPx, (pc.y() - (y + 0.5)) / radiusPx);
      if (std::abs(local.x()) > 1.0 || std::abs(local.y()) > 1.0) continue;
      if (!visible(x, y, pc.z(), opt)) continue;
      blend(x, y, shade(local));
    }
  }
}

void OverlayPainter::triangle(const Vec3 world[3], const Vec2 uv[3], const std::function<Rgba(const Vec2&)>& shade,
                              const OverlayOptions& opt) {
  Vec3 p[3];
  for (int k = 0; k < 3; ++k) {
    p[k] = cam_.project(world[k]);
    if (p[k].z() < cam_.nearPlane) return;
  }
  // Fixed-point coverage with edge ownership so quads sharing a diagonal
  // blend each pixel once.
  long long X[3], Y[3];
  for (int k = 0; k < 3; ++k) {
    X[k] = std::llround(p[k].x() * 256.0);
    Y[k] = std::llround(p[k].y() * 256.0);
  }
  auto edge = [](long long ax, long long ay, long long bx, long long by, long long px, long long py) {
    return static_cast<__int128>(bx - ax) * (py - ay) - static_cast<__int128>(by - ay) * (px - ax);
  };
  int order[3] = {0, 1, 2};
  const __int128 area = edge(X[0], Y[0], X[1], Y[1], X[2], Y[2]);
  if (area == 0) return;
  if (area < 0) std::swap(order[1], order[2]);
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min({p[0].x(), p[1].x(), p[2].x()}))));
  const int x1 = std::min(fb_.width - 1, static_cast<int>(std::ceil(std::max({p[0].x(), p[1].x(), p[2].x()}))));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min({p[0].y(), p[1].y(), p[2].y()}))));
  const int y1 = std::min(fb_.height - 1, static_cast<int>(std::ceil(std::max({p[0].y(), p[1].y(), p[2].y()}))));
  const double fa = (p[order[1]].x() - p[order[0]].x()) * (p[order[2]].y() - p[order[0]].y()) -
                    (p[order[1]].y() - p[order[0]].y()) * (p[order[2]].x() - p[order[0]].x());
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const long long PX = static_cast<long long>(x) * 256 + 128, PY = static_cast<long long>(y) * 256 + 128;
      bool inside = true;
      double w[3];
      double sum = 0.0;
      for (int k = 0; k < 3 && inside; ++k) {
        const int a = order[(k + 1) % 3], c = order[(k + 2) % 3];
        const __int128 e = edge(X[a], Y[a], X[c], Y[c], PX, PY);
        const long long dy = Y[c] - Y[a];
        inside = e > 0 || (e == 0 && (dy > 0 || (dy == 0 && X[c] - X[a] < 0)));
        const double ef = (p[c].x() - p[a].x()) * (y + 0.5 - p[a].y()) - (p[c].y() - p[a].y()) * (x + 0.5 - p[a].x());
        w[k] = ef / fa / p[order[k]].z();
        sum += w[k];
      }
      if (!inside || !(sum > 0.0)) continue;
      const double depth = 1.0 / sum;
      if (!visible(x, y, depth, opt)) continue;
      Vec2 t = Vec2::Zero();
      for (int k = 0; k < 3; ++k) t += uv[order[k]] * (w[k] / sum);
      blend(x, y, shade(t));
    }
  }
}

void OverlayPainter::quad(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                          const std::function<Rgba(const Vec2&)>& shade, const OverlayOptions& opt) {
  const Vec3 t1[3] = {a, b, c};
  const Vec2 u1[3] = {{0, 0}, {1, 0}, {1, 1}};
  const Vec3 t2[3] = {a, c, d};
  const Vec2 u2[3] = {{0, 0}, {1, 1}, {0, 1}};
  triangle(t1, u1, shade, opt);
  triangle(t2, u2, shade, opt);
}

}  // namespace vdk
