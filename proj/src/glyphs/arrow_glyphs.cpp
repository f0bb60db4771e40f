#include "vdk/glyphs/arrow_glyphs.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "vdk/core/error.hpp"
#include "vdk/core/random.hpp"

namespace vdk {

void GlyphStyle::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be > 0");
  };
  positive(maxLength, "maxLength");
  positive(switchingDistance, "switchingDistance");
  positive(thickness, "thickness");
  positive(tickSpacing, "tickSpacing");
  positive(denseSpacing, "denseSpacing");
  positive(sparseSpacing, "sparseSpacing");
  if (!(denseSpacing < sparseSpacing)) {
    throw Error(ErrorCode::InvalidArgument, "denseSpacing must be smaller than sparseSpacing");
  }
  if (glyphTexture && (glyphTexture->width <= 0 || glyphTexture->height <= 0)) {
    throw Error(ErrorCode::InvalidArgument, "glyphTexture is empty");
  }
}

namespace {

struct CellKey {
  long long x, y, z;
  bool operator==(const CellKey& o) const { return x == o.x && y == o.y && z == o.z; }
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    return static_cast<std::size_t>(mix64(static_cast<std::uint64_t>(k.x) * 73856093ull ^
                                          static_cast<std::uint64_t>(k.y) * 19349663ull ^
                                          static_cast<std::uint64_t>(k.z) * 83492791ull));
  }
};

}  // namespace

std::vector<SurfacePoint> poissonSurfaceSamples(const TriMesh& mesh, const std::function<double(const Vec3&)>& radius,
                                                std::uint64_t seed, int candidatesPerMinDisc) {
  const auto& V = mesh.vertices();
  const auto& F = mesh.faces();
  const auto& fn = mesh.faceNormals();
  std::vector<double> cdf(F.size());
  double total = 0.0;
  for (std::size_t f = 0; f < F.size(); ++f) {
    const Vec3& a = V[F[f][0]];
    total += 0.5 * (V[F[f][1]] - a).cross(V[F[f][2]] - a).norm();
    cdf[f] = total;
  }
  std::vector<SurfacePoint> out;
  if (!(total > 0.0)) return out;

  // Probe the radius field at vertices to size the grid and candidate budget.
  double rMin = std::numeric_limits<double>::infinity(), rMax = 0.0;
  for (const Vec3& v : V) {
    const double r = radius(v);
    rMin = std::min(rMin, r);
    rMax = std::max(rMax, r);
  }
  if (!(rMin > 0.0)) throw Error(ErrorCode::InvalidArgument, "sampling radius must be positive");
  const long long budget = std::min<long long>(
      2000000, static_cast<long long>(std::ceil(candidatesPerMinDisc * total / (kPi * rMin * rMin))) + 1);

  const double cell = rMax;
  std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
  auto keyOf = [&](const Vec3& p) {
    return CellKey{static_cast<long long>(std::floor(p.x() / cell)), static_cast<long long>(std::floor(p.y() / cell)),
                   static_cast<long long>(std::floor(p.z() / cell))};
  };
  std::vector<double> radii;
  Random rng(seed);
  for (long long n = 0; n < budget; ++n) {
    const double pick = rng.uniform() * total;
    const std::size_t f = std::min<std::size_t>(
        F.size() - 1, static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), pick) - cdf.begin()));
    double s = rng.uniform(), t = rng.uniform();
    if (s + t > 1.0) {
      s = 1.0 - s;
      t = 1.0 - t;
    }
    const Vec3& a = V[F[f][0]];
    const Vec3 p = a + s * (V[F[f][1]] - a) + t * (V[F[f][2]] - a);
    const double r = radius(p);
    const CellKey k = keyOf(p);
    bool ok = true;
    for (long long dx = -1; dx <= 1 && ok; ++dx) {
      for (long long dy = -1; dy <= 1 && ok; ++dy) {
        for (long long dz = -1; dz <= 1 && ok; ++dz) {
          auto it = grid.find({k.x + dx, k.y + dy, k.z + dz});
          if (it == grid.end()) continue;
          for (int j : it->second) {
            const double need = 0.5 * (r + radii[j]);
            if ((out[j].position - p).squaredNorm() < need * need) {
              ok = false;
              break;
            }
          }
        }
      }
    }
    if (!ok) continue;
    grid[k].push_back(static_cast<int>(out.size()));
    out.push_back({p, fn[f], static_cast<int>(f)});
    radii.push_back(r);
  }
  return out;
}

std::vector<SurfacePoint> arrowSamplePoints(const TriMesh& mesh, const std::vector<Vec3>& tumorPositions,
                                            const GlyphStyle& style, std::uint64_t seed) {
  style.validate();
  if (tumorPositions.empty()) throw Error(ErrorCode::NoTumor, "arrow glyphs need a tumor position");
  return poissonSurfaceSamples(
      mesh,
      [&](const Vec3& p) {
        return tumorDistance(p, tumorPositions) <= style.switchingDistance ? style.denseSpacing : style.sparseSpacing;
      },
      seed);
}

int tickCount(double length, double spacing) {
  if (!(spacing > 0.0) || !(length > 0.0)) return 0;
  return static_cast<int>(std::floor(length / spacing + 1e-9));
}

double arrowOpacity(const Vec3& direction, const Vec3& normal) {
  const double d = direction.norm() * normal.norm();
  if (!(d > 0.0)) return 0.0;
  return std::max(0.0, direction.dot(normal) / d);
}

std::vector<ArrowGlyph> arrowGlyphs(const std::vector<SurfacePoint>& samples, const std::vector<Vec3>& tumorPositions,
                                    const GlyphStyle& style, const DistanceParams& colors) {
  style.validate();
  if (tumorPositions.empty()) throw Error(ErrorCode::NoTumor, "arrow glyphs need a tumor position");
  std::vector<ArrowGlyph> out;
  double far = 0.0;
  for (const auto& s : samples) far = std::max(far, tumorDistance(s.position, tumorPositions));
  for (const auto& s : samples) {
    const Vec3* nearest = &tumorPositions.front();
    for (const Vec3& t : tumorPositions) {
      if ((t - s.position).squaredNorm() < (*nearest - s.position).squaredNorm()) nearest = &t;
    }
    const Vec3 toTumor = *nearest - s.position;
    const double d = toTumor.norm();
    if (!(d > 0.0)) continue;
    ArrowGlyph g;
    g.base = s.position;
    g.direction = toTumor / d;
    g.tumorDistance = d;
    g.dense = d <= style.switchingDistance;
    g.length = std::min(d, g.dense ? 0.5 * style.maxLength : style.maxLength);
    g.thickness = g.dense ? style.thickness : 1.5 * style.thickness;
    g.tip = g.base + g.direction * g.length;
    g.opacity = arrowOpacity(g.direction, s.normal);
    for (int k = 1; k <= tickCount(g.length, style.tickSpacing); ++k) {
      g.ticks.push_back(g.base + g.direction * (k * style.tickSpacing));
    }
    g.color = pcdRamp(far > 0.0 ? d / far : 0.0, colors);
    out.push_back(std::move(g));
  }
  return out;
}

Image8 defaultArrowTexture(int width, int height) {
  Image8 img;
  img.width = width;
  img.height = height;
  img.rgba.assign(static_cast<std::size_t>(width) * height * 4, 0);
  const double headStart = 0.68;
  for (int y = 0; y < height; ++y) {
    // Row 0 is the top of the bitmap, i.e. the arrow head (v = 1).
    const double v = 1.0 - (y + 0.5) / height;
    for (int x = 0; x < width; ++x) {
      const double u = (x + 0.5) / width;
      const double off = std::abs(u - 0.5);
      const bool on = v < headStart ? off <= 0.17 : off <= 0.5 * (1.0 - v) / (1.0 - headStart);
      if (!on) continue;
      const bool edge = v < headStart ? off > 0.11 : off > 0.5 * (1.0 - v) / (1.0 - headStart) - 0.08;
      std::uint8_t* px = &img.rgba[(static_cast<std::size_t>(y) * width + x) * 4];
      const std::uint8_t g = edge ? 60 : 255;
      px[0] = px[1] = px[2] = g;
      px[3] = 255;
    }
  }
  return img;
}

namespace {

Rgba sampleTexture(const Image8& tex, const Vec2& uv) {
  const int x = std::clamp(static_cast<int>(uv.x() * tex.width), 0, tex.width - 1);
  const int y = std::clamp(static_cast<int>((1.0 - uv.y()) * tex.height), 0, tex.height - 1);
  const std::uint8_t* p = &tex.rgba[(static_cast<std::size_t>(y) * tex.width + x) * 4];
  return Rgba(p[0] / 255.0, p[1] / 255.0, p[2] / 255.0, p[3] / 255.0);
}

}  // namespace

void paintArrowGlyphs(OverlayPainter& painter, const Camera& camera, const std::vector<ArrowGlyph>& glyphs,
                      const Image8& texture) {
  std::vector<std::size_t> order(glyphs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const Vec3 eye = camera.position;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return (glyphs[a].base - eye).squaredNorm() > (glyphs[b].base - eye).squaredNorm();
  });
  OverlayOptions opt;
  opt.depthBias = 1.0;
  for (std::size_t i : order) {
    const ArrowGlyph& g = glyphs[i];
    if (g.opacity <= 0.0) continue;
    const Vec3 mid = 0.5 * (g.base + g.tip);
    Vec3 side = g.direction.cross(mid - eye);
    if (side.norm() < 1e-12) continue;
    side = side.normalized() * (1.5 * g.thickness);
    const Rgb col = g.color;
    painter.quad(g.base - side, g.base + side, g.tip + side, g.tip - side,
                 [&](const Vec2& uv) {
                   const Rgba t = sampleTexture(texture, uv);
                   return Rgba(col.x() * t.x(), col.y() * t.y(), col.z() * t.z(), t.w() * g.opacity);
                 },
                 opt);
    for (const Vec3& tick : g.ticks) {
      const double depth = camera.toView(tick).z();
      const double px = 0.35 * g.thickness * camera.height / (2.0 * std::max(depth, 1e-9) * camera.tanHalfFov());
      painter.disc(tick, std::max(1.0, px), Rgba(1.0, 1.0, 1.0, g.opacity), opt);
    }
  }
}

}  // namespace vdk
