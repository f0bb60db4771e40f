// Acceptance checks: one PASS/FAIL line per criterion.
//   vdk_acceptance [--write-goldens]
// Goldens are written only on request and audited by eye before commit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vdk/glyphs/void_space.hpp"
#include "vdk/hatching/streamlines.hpp"
#include "vdk/lic/post.hpp"
#include "vdk/mesh/geometry.hpp"
#include "vdk/mesh/primitives.hpp"
#include "vdk/render/image_io.hpp"
#include "vdk/render/rasterizer.hpp"
#include "vdk/scene/registry.hpp"
#include "vdk/scene/render.hpp"
#include "vdk/scene/serve.hpp"
#include "vdk/shading/shading.hpp"
#include "vdk/skeleton/contraction.hpp"
#include "vdk/skeleton/endpoints.hpp"

// After Eigen: <resolv.h> defines a _res macro that collides with Eigen.
#include <httplib.h>

namespace {

using namespace vdk;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const fs::path kSource = VDK_SOURCE_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

double seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------------------
// Endpoints

/// Each tip matched by exactly one endpoint within `tol`.
bool tipsMatched(const TriMesh& m, const std::vector<int>& endpoints, const std::vector<Vec3>& tips, double tol) {
  if (endpoints.size() != tips.size()) return false;
  std::vector<int> hits(tips.size(), 0);
  for (int e : endpoints) {
    for (std::size_t k = 0; k < tips.size(); ++k) {
      if ((m.vertex(e) - tips[k]).norm() <= tol) ++hits[k];
    }
  }
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

Outcome endpointPipeline() {
  std::ostringstream d;
  bool ok = true;
  struct Case {
    std::string name;
    TriMesh mesh;
    std::vector<Vec3> tips;
  };
  std::vector<Case> cases;
  // Two cap radii: 2 mm at z = 0 and 6 mm at z = 40.
  cases.push_back({"tube", primitives::roundedTube(40, 2.0, 6.0, 48, 0.45), {Vec3(0, 0, -2), Vec3(0, 0, 46)}});
  std::vector<Vec3> ytips;
  TriMesh y = primitives::yBranch(25, 3.5, 1.0, &ytips);
  cases.push_back({"Y", std::move(y), ytips});
  cases.push_back({"torus", primitives::torus(20, 4, 160, 40), {}});
  for (const Case& c : cases) {
    const auto t0 = Clock::now();
    const SkeletonResult r = computeSkeleton(c.mesh);
    const double t = seconds(t0);
    const bool count = r.endpoints.size() == c.tips.size();
    const bool near = tipsMatched(c.mesh, r.endpoints, c.tips, 2.0);
    const bool big = c.mesh.vertexCount() >= 5000;
    bool root = true;
    if (c.name == "tube") root = r.root >= 0 && (c.mesh.vertex(r.root) - c.tips[1]).norm() <= 2.0;
    if (c.name == "torus") root = r.root == -1;
    const bool fast = t < 30.0;
    ok = ok && count && near && big && root && fast;
    d << c.name << ": " << c.mesh.vertexCount() << " verts, " << r.endpoints.size() << " endpoints (want "
      << c.tips.size() << ")" << (near ? "" : " tips-off") << (root ? "" : " root-wrong") << ", " << fmt("%.1fs", t)
      << "; ";
  }
  return {ok, d.str()};
}

Outcome endpointTiming() {
  const TriMesh m = primitives::vesselTree(1.0);
  const auto t0 = Clock::now();
  const SkeletonResult r = computeSkeleton(m);
  const double t = seconds(t0);
  const char* threads = std::getenv("VDK_THREADS");
  std::ostringstream d;
  d << m.vertexCount() << " verts, " << r.endpoints.size() << " endpoints, " << fmt("%.1f s", t)
    << " (limit 120 s), VDK_THREADS=" << (threads ? threads : "unset");
  return {t <= 120.0 && m.vertexCount() >= 25000, d.str()};
}

/// Signed volume by the divergence theorem (oracle).
double oracleVolume(const std::vector<Vec3>& p, const std::vector<Face>& faces) {
  double v = 0.0;
  for (const Face& f : faces) {
    const Vec3& a = p[f[0]];
    const Vec3& b = p[f[1]];
    const Vec3& c = p[f[2]];
    v += a.x() * (b.y() * c.z() - b.z() * c.y()) - a.y() * (b.x() * c.z() - b.z() * c.x()) +
         a.z() * (b.x() * c.y() - b.y() * c.x());
  }
  return v / 6.0;
}

Outcome volumeMonotonicity() {
  std::ostringstream d;
  bool ok = true;
  std::vector<std::pair<std::string, TriMesh>> meshes;
  meshes.emplace_back("tube", primitives::roundedTube(40, 2.0, 6.0, 48, 0.45));
  meshes.emplace_back("Y", primitives::yBranch(25, 3.5, 1.0));
  meshes.emplace_back("torus", primitives::torus(20, 4, 160, 40));
  meshes.emplace_back("sphere", primitives::icosphere(5.0, 4));
  meshes.emplace_back("vessels", primitives::vesselTree(1.0));
  const double slack = 1e-9;
  for (const auto& [name, m] : meshes) {
    const ContractionOptions opt;
    // Replay the driver step by step and measure every emitted state.
    const ContractionResult r = contractToSkeleton(m, opt);
    ContractionState s = initialContractionState(m, opt);
    double previous = oracleVolume(s.positions, m.faces());
    const double v0 = previous;
    int violations = 0, checked = 0;
    for (const auto& entry : r.log) {
      ContractionState next = contractOnce(m, s, opt);
      const double v = oracleVolume(next.positions, m.faces());
      if (entry.accepted) {
        if (v > previous + slack * std::abs(previous)) ++violations;
        if (std::abs(v / v0 - entry.volumeRatio) > 1e-9) ++violations;
        previous = v;
        s = std::move(next);
        ++checked;
      } else {
        // Discarded step: positions and attraction weights stay, wL advances.
        s.wL = next.wL;
        s.iteration = next.iteration;
      }
    }
    const double final = oracleVolume(r.state.positions, m.faces()) / v0;
    if (std::abs(final - r.state.volumeRatio) > 1e-9) ++violations;
    ok = ok && violations == 0;
    d << name << ": " << checked << " accepted, " << r.rejected << " discarded, final ratio "
      << fmt("%.2e", final) << (violations ? " VIOLATION" : "") << "; ";
  }
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// Shading formulas against straight-line re-implementations

struct V3 {
  double x, y, z;
};
double dot3(V3 a, V3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
V3 toV3(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
double maxDiff(const Rgb& a, V3 b) {
  return std::max({std::abs(a.x() - b.x), std::abs(a.y() - b.y), std::abs(a.z() - b.z)});
}

Outcome shadingSuite() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  auto unit = [&] {
    Vec3 v(g(rng), g(rng), g(rng));
    return Vec3(v.normalized());
  };
  auto color = [&] { return Rgb(u(rng), u(rng), u(rng)); };
  constexpr int kCases = 10000;
  const double tol = 1e-6;
  double worst[7] = {0, 0, 0, 0, 0, 0, 0};
  const char* names[7] = {"phong", "toon", "fresnel", "heatmap", "isolines", "pcd", "fog"};

  for (int i = 0; i < kCases; ++i) {
    SurfaceSample s{unit(), unit(), unit()};
    // Bias half the cases toward the lit, visible hemisphere.
    if (i % 2 == 0) {
      s.light = Vec3((s.normal + 0.8 * s.light).normalized());
      s.view = Vec3((s.normal + 0.8 * s.view).normalized());
    }
    ShadingParams p;
    p.baseColor = color();
    p.ambientColor = 0.2 * color();
    p.specularColor = color();
    p.rimColor = color();
    p.shininess = 1.0 + 127.0 * u(rng);
    p.toonBands = 2 + static_cast<int>(u(rng) * 7);
    p.rimAmount = u(rng);
    p.rimThreshold = u(rng);
    p.fresnelExponent = 0.5 + 7.5 * u(rng);
    const V3 n = toV3(s.normal), l = toV3(s.light), v = toV3(s.view);
    const double nl = dot3(n, l), nv = dot3(n, v);
    const V3 r{2 * nl * n.x - l.x, 2 * nl * n.y - l.y, 2 * nl * n.z - l.z};
    const double rv = dot3(r, v);
    const double diff = nl > 0 ? nl : 0;
    const double spec = std::pow(rv > 0 ? rv : 0, p.shininess);
    const V3 a = toV3(p.ambientColor), b = toV3(p.baseColor), sc = toV3(p.specularColor), rc = toV3(p.rimColor);

    // Phong: ambient + diffuse max(0, N.L) + specular max(0, R.V)^shininess.
    const V3 ph{a.x + b.x * diff + sc.x * spec, a.y + b.y * diff + sc.y * spec, a.z + b.z * diff + sc.z * spec};
    worst[0] = std::max(worst[0], maxDiff(phong(s, p), ph));

    // Toon: floor(i bands)/(bands-1) clamped; specular on above the threshold; rim where 1 - N.V > amount.
    double level = std::floor(diff * p.toonBands) / (p.toonBands - 1);
    level = level < 0 ? 0 : (level > 1 ? 1 : level);
    V3 tn{a.x + b.x * level, a.y + b.y * level, a.z + b.z * level};
    if (spec > p.rimThreshold) tn = {tn.x + sc.x, tn.y + sc.y, tn.z + sc.z};
    if (1.0 - nv > p.rimAmount) tn = {tn.x + rc.x, tn.y + rc.y, tn.z + rc.z};
    worst[1] = std::max(worst[1], maxDiff(toon(s, p), tn));

    // Fresnel: w = (1 - max(0, N.V))^e; lerp(base diffuse, rim, w).
    const double w = std::pow(1.0 - (nv > 0 ? nv : 0), p.fresnelExponent);
    const V3 fr{b.x * diff * (1 - w) + rc.x * w, b.y * diff * (1 - w) + rc.y * w, b.z * diff * (1 - w) + rc.z * w};
    worst[2] = std::max(worst[2], maxDiff(fresnel(s, p), fr));

    // Distance techniques.
    DistanceParams dp;
    const int tumors = 1 + static_cast<int>(u(rng) * 3);
    for (int k = 0; k < tumors; ++k) dp.tumorPositions.emplace_back(100 * u(rng) - 50, 100 * u(rng) - 50, 100 * u(rng) - 50);
    dp.heatRadius = 5 + 60 * u(rng);
    dp.heatColor = color();
    dp.isolineCount = 1 + static_cast<int>(u(rng) * 6);
    dp.isolineRadius = 10 + 50 * u(rng);
    dp.isolineThickness = (0.05 + 0.9 * u(rng)) * dp.isolineRadius / dp.isolineCount;
    const Vec3 pos(100 * u(rng) - 50, 100 * u(rng) - 50, 100 * u(rng) - 50);
    const Rgb surface = color();
    double dist = std::numeric_limits<double>::infinity();
    for (const Vec3& t : dp.tumorPositions) {
      const double dx = pos.x() - t.x(), dy = pos.y() - t.y(), dz = pos.z() - t.z();
      dist = std::min(dist, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    const V3 sf = toV3(surface), hc = toV3(dp.heatColor);
    V3 hm = sf;
    if (dist < dp.heatRadius) {
      const double f = dist / dp.heatRadius;
      hm = {hc.x + (sf.x - hc.x) * f, hc.y + (sf.y - hc.y) * f, hc.z + (sf.z - hc.z) * f};
    }
    worst[3] = std::max(worst[3], maxDiff(heatmap(pos, surface, dp), hm));

    // Isolines probed on a distance drawn across the band range.
    const double probe = u(rng) * 1.2 * dp.isolineRadius;
    bool black = false;
    for (int k = 1; k <= dp.isolineCount; ++k) {
      const double centre = k * dp.isolineRadius / dp.isolineCount;
      const double thick = (k % 2 == 1) ? dp.isolineThickness : dp.isolineThickness / 2;
      if (std::abs(probe - centre) < thick / 2) black = true;
    }
    const V3 iso = black ? V3{0, 0, 0} : sf;
    worst[4] = std::max(worst[4], maxDiff(isolines(probe, surface, dp), iso));
    worst[4] = std::max(worst[4], maxDiff(isolines(pos, surface, dp), [&] {
                          for (int k = 1; k <= dp.isolineCount; ++k) {
                            const double centre = k * dp.isolineRadius / dp.isolineCount;
                            const double thick = (k % 2 == 1) ? dp.isolineThickness : dp.isolineThickness / 2;
                            if (std::abs(dist - centre) < thick / 2) return V3{0, 0, 0};
                          }
                          return sf;
                        }()));

    // Pseudo-chromadepth: t from the bounding-box depth range, lerp red->blue, times (0.5 + 0.5 diffuse).
    const double lo = 100 * u(rng), hi = lo + 1 + 200 * u(rng);
    const double depth = lo - 10 + (hi - lo + 20) * u(rng);
    double t = (depth - lo) / (hi - lo);
    t = t < 0 ? 0 : (t > 1 ? 1 : t);
    const double shade = 0.5 + 0.5 * diff;
    const V3 pcd{(1 - t) * shade, 0, t * shade};
    worst[5] = std::max(worst[5], maxDiff(pseudoChromadepth(normalizedDepth(depth, lo, hi), diff, dp), pcd));

    // Fog: alpha = (1 - t)^falloff.
    const double falloff = 0.01 + 16 * u(rng);
    worst[6] = std::max(worst[6], std::abs(fogAlpha(t, falloff) - std::pow(1 - t, falloff)));
  }

  // Exact spot values.
  const DistanceParams dp;
  const bool pcdEnds = pcdRamp(0.0, dp) == Rgb(1, 0, 0) && pcdRamp(1.0, dp) == Rgb(0, 0, 1) &&
                       normalizedDepth(10, 10, 20) == 0.0 && normalizedDepth(20, 10, 20) == 1.0;
  const bool fogSpots = fogAlpha(0.5, 2) == 0.25 && fogAlpha(0.5, 4) == 0.0625 && fogAlpha(0, 3) == 1.0 &&
                        fogAlpha(1, 3) == 0.0;

  bool ok = pcdEnds && fogSpots;
  std::ostringstream d;
  d << kCases << " cases each, max |diff|:";
  for (int k = 0; k < 7; ++k) {
    ok = ok && worst[k] <= tol;
    d << ' ' << names[k] << '=' << fmt("%.1e", worst[k]);
  }
  d << "; PCD ends " << (pcdEnds ? "exact" : "WRONG") << ", fog spots " << (fogSpots ? "exact" : "WRONG");
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// Curvature

Outcome curvature() {
  std::ostringstream d;
  // Sphere radius 10: both curvatures within 5% of 1/R.
  const double R = 10.0;
  const TriMesh sphere = primitives::icosphere(R, 4);
  const CurvatureField cs = estimateCurvature(sphere);
  double sphereErr = 0.0;
  for (std::size_t v = 0; v < sphere.vertexCount(); ++v) {
    sphereErr = std::max({sphereErr, std::abs(cs.kappa1[v] * R - 1.0), std::abs(cs.kappa2[v] * R - 1.0)});
  }
  // Cylinder radius 5 (open): interior rings, kappa1 within 10% of 1/r, kappa2 within 10% of 1/r of zero.
  const double r = 5.0;
  const int segs = 48, rings = 40;
  const TriMesh cyl = primitives::openCylinder(r, 40.0, segs, rings);
  const CurvatureField cc = estimateCurvature(cyl);
  double cylErr = 0.0;
  for (int ring = 1; ring + 1 < rings; ++ring) {
    for (int s = 0; s < segs; ++s) {
      const auto v = static_cast<std::size_t>(ring * segs + s);
      cylErr = std::max({cylErr, std::abs(cc.kappa1[v] * r - 1.0), std::abs(cc.kappa2[v] * r)});
    }
  }
  // Plane: both curvatures within 1e-6.
  const TriMesh plane = primitives::gridPatch(20, 20, 10, 10);
  const CurvatureField cp = estimateCurvature(plane);
  double planeErr = 0.0;
  for (std::size_t v = 0; v < plane.vertexCount(); ++v) {
    planeErr = std::max({planeErr, std::abs(cp.kappa1[v]), std::abs(cp.kappa2[v])});
  }
  d << "sphere rel " << fmt("%.4f%%", 100 * sphereErr) << " (<=5%), cylinder rel " << fmt("%.4f%%", 100 * cylErr)
    << " (<=10%), plane abs " << fmt("%.1e", planeErr) << " (<=1e-6)";
  return {sphereErr <= 0.05 && cylErr <= 0.10 && planeErr <= 1e-6, d.str()};
}

// ---------------------------------------------------------------------------
// Streamline spacing

double segmentDistance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double vx = b.x() - a.x(), vy = b.y() - a.y();
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((p.x() - a.x()) * vx + (p.y() - a.y()) * vy) / len2 : 0.0;
  t = t < 0 ? 0 : (t > 1 ? 1 : t);
  const double dx = a.x() + t * vx - p.x(), dy = a.y() + t * vy - p.y();
  return std::sqrt(dx * dx + dy * dy);
}

/// For every stroke, the smallest and largest nearest-neighbour distance
/// over its vertices (other strokes only), via a uniform grid of segments.
struct SpacingStats {
  double minNearest = std::numeric_limits<double>::infinity();
  double maxNearest = 0.0;
};

SpacingStats strokeSpacing(const std::vector<std::vector<Vec2>>& strokes, int w, int h, double reach, double border) {
  const double cell = reach;
  const int gw = static_cast<int>(std::ceil(w / cell)) + 1, gh = static_cast<int>(std::ceil(h / cell)) + 1;
  std::vector<std::vector<std::pair<int, int>>> grid(static_cast<std::size_t>(gw * gh));
  auto cellOf = [&](const Vec2& p) {
    const int cx = std::clamp(static_cast<int>(p.x() / cell), 0, gw - 1);
    const int cy = std::clamp(static_cast<int>(p.y() / cell), 0, gh - 1);
    return std::pair(cx, cy);
  };
  for (int s = 0; s < static_cast<int>(strokes.size()); ++s) {
    for (int k = 0; k + 1 < static_cast<int>(strokes[static_cast<std::size_t>(s)].size()); ++k) {
      const auto& st = strokes[static_cast<std::size_t>(s)];
      const Vec2 mid = 0.5 * (st[static_cast<std::size_t>(k)] + st[static_cast<std::size_t>(k + 1)]);
      const auto [cx, cy] = cellOf(mid);
      grid[static_cast<std::size_t>(cy * gw + cx)].emplace_back(s, k);
    }
  }
  SpacingStats out;
  for (int s = 0; s < static_cast<int>(strokes.size()); ++s) {
    double strokeMin = std::numeric_limits<double>::infinity();
    for (const Vec2& p : strokes[static_cast<std::size_t>(s)]) {
      const auto [cx, cy] = cellOf(p);
      double best = std::numeric_limits<double>::infinity();
      for (int gy = std::max(0, cy - 2); gy <= std::min(gh - 1, cy + 2); ++gy) {
        for (int gx = std::max(0, cx - 2); gx <= std::min(gw - 1, cx + 2); ++gx) {
          for (const auto& [o, k] : grid[static_cast<std::size_t>(gy * gw + gx)]) {
            if (o == s) continue;
            const auto& st = strokes[static_cast<std::size_t>(o)];
            best = std::min(best, segmentDistance(p, st[static_cast<std::size_t>(k)], st[static_cast<std::size_t>(k + 1)]));
          }
        }
      }
      strokeMin = std::min(strokeMin, best);
      // Gap check away from the image border, where the neighbour may be missing.
      const bool interior = p.x() > border && p.y() > border && p.x() < w - border && p.y() < h - border;
      if (interior && std::isfinite(best)) out.maxNearest = std::max(out.maxNearest, best);
    }
    out.minNearest = std::min(out.minNearest, strokeMin);
  }
  return out;
}

Outcome streamlineSpacing() {
  const int W = 512, H = 512;
  StreamlineOptions opt;
  std::ostringstream d;
  bool ok = true;
  for (double angle : {0.0, 0.5}) {
    ScreenCrossField f(W, H);
    std::fill(f.mask.begin(), f.mask.end(), 1);
    std::fill(f.angle.begin(), f.angle.end(), angle);
    const HatchSet a = evenlySpacedStreamlines(f, opt);
    const HatchSet b = evenlySpacedStreamlines(f, opt);
    const bool same = a.strokes == b.strokes;
    const SpacingStats st = strokeSpacing(a.strokes, W, H, opt.dSep + 2.0, opt.dSep + 2.0);
    const bool inRange = a.size() > 20 && st.minNearest >= opt.dTest() - 1.0 && st.maxNearest <= opt.dSep + 1.0;
    ok = ok && same && inRange;
    d << "angle " << angle << ": " << a.size() << " strokes, nearest-neighbour distance in ["
      << fmt("%.2f", st.minNearest) << ", " << fmt("%.2f", st.maxNearest) << "] vs [" << opt.dTest() - 1.0 << ", "
      << opt.dSep + 1.0 << "], " << (same ? "deterministic" : "NOT deterministic") << "; ";
  }
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// LIC

double autocorrelation(const ScalarImage& img, int dx, int dy, int margin) {
  double mean = 0.0;
  long n = 0;
  for (int y = margin; y < img.height - margin; ++y) {
    for (int x = margin; x < img.width - margin; ++x) {
      mean += img.at(x, y);
      ++n;
    }
  }
  mean /= static_cast<double>(n);
  double cov = 0.0, var = 0.0;
  for (int y = margin; y < img.height - margin; ++y) {
    for (int x = margin; x < img.width - margin; ++x) {
      const double a = img.at(x, y) - mean;
      cov += a * (img.at(x + dx, y + dy) - mean);
      var += a * a;
    }
  }
  return cov / var;
}

Outcome licAnisotropy() {
  const int W = 256, H = 256;
  ScalarImage noise(W, H);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : noise.data) v = u(rng);
  std::ostringstream d;
  bool ok = true;
  for (const auto& [name, dir] : {std::pair("x", Vec2(1, 0)), std::pair("y", Vec2(0, 1))}) {
    VectorImage field(W, H);
    std::fill(field.data.begin(), field.data.end(), dir);
    const ScalarImage out = licConvolve(noise, field, 15);
    const int ax = static_cast<int>(dir.x()) * 4, ay = static_cast<int>(dir.y()) * 4;
    const double along = autocorrelation(out, ax, ay, 20);
    const double across = autocorrelation(out, ay, ax, 20);
    const double ratio = along / std::max(std::abs(across), 1e-12);
    ok = ok && along >= 3.0 * std::abs(across);
    d << "field " << name << ": along " << fmt("%.3f", along) << ", across " << fmt("%.3f", across) << " (ratio "
      << fmt("%.1f", ratio) << "); ";
    ok = ok && licConvolve(noise, field, 0).data == noise.data;
  }
  d << "L=0 identity " << (ok ? "exact" : "checked");
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// Void space

/// Contour = covered pixel with an uncovered 4-neighbour inside the image.
std::pair<double, double> contourDepthRange(const FrameBuffer& fb) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int y = 0; y < fb.height; ++y) {
    for (int x = 0; x < fb.width; ++x) {
      if (!fb.covered(x, y)) continue;
      const int nx[4] = {x - 1, x + 1, x, x}, ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] >= 0 && ny[k] >= 0 && nx[k] < fb.width && ny[k] < fb.height && !fb.covered(nx[k], ny[k])) {
          lo = std::min(lo, fb.depth[fb.index(x, y)]);
          hi = std::max(hi, fb.depth[fb.index(x, y)]);
          break;
        }
      }
    }
  }
  return {lo, hi};
}

Outcome voidSpace() {
  std::ostringstream d;
  long voidPixels = 0, outside = 0;
  auto check = [&](const FrameBuffer& fb) {
    const auto [lo, hi] = contourDepthRange(fb);
    const VoidSpaceResult r = voidSpaceSurfaces(fb);
    for (int y = 0; y < fb.height; ++y) {
      for (int x = 0; x < fb.width; ++x) {
        if (fb.covered(x, y)) continue;
        ++voidPixels;
        const double v = r.fill.at(x, y);
        if (!(v >= lo && v <= hi)) ++outside;
      }
    }
  };
  // Random sparse frames.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    FrameBuffer fb(64, 48);
    for (int k = 0; k < 80; ++k) {
      const std::size_t i = fb.index(static_cast<int>(u(rng) * 64), static_cast<int>(u(rng) * 48));
      fb.objectMask[i] = 0;
      fb.depth[i] = 0.1 + 0.8 * u(rng);
    }
    check(fb);
  }
  // A rendered vessel frame.
  MeshCache cache;
  const SceneSpec spec = loadSceneFile(kSource / "data/scenes/phong.json");
  const PreparedScene prepared = prepareScene(spec, cache, 256, 256);
  check(rasterizeGeometry(prepared.scene));

  // Symmetric two-contour configurations: fill at the centre column is the exact midpoint.
  double midErr = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int half = 2 + trial % 7, w = 2 * half + 1 + 2 * (trial % 3), h = 5 + trial % 4;
    FrameBuffer fb(w, h);
    const int cx = w / 2, left = cx - half, right = cx + half;
    const double a = u(rng), b = u(rng);
    const std::size_t il = fb.index(left, h / 2), ir = fb.index(right, h / 2);
    fb.objectMask[il] = fb.objectMask[ir] = 0;
    fb.depth[il] = a;
    fb.depth[ir] = b;
    const VoidSpaceResult r = voidSpaceSurfaces(fb);
    for (int y = 0; y < h; ++y) midErr = std::max(midErr, std::abs(r.fill.at(cx, y) - 0.5 * (a + b)));
  }
  d << voidPixels << " void pixels checked, " << outside << " outside contour depth range; symmetric midpoint max err "
    << fmt("%.1e", midErr);
  return {voidPixels > 0 && outside == 0 && midErr <= 1e-15, d.str()};
}

// ---------------------------------------------------------------------------
// Registry

Flag parseFlag(const std::string& s) {
  if (s == "yes") return Flag::Yes;
  if (s == "partial") return Flag::Partial;
  if (s == "no") return Flag::No;
  throw std::runtime_error("bad flag " + s);
}

Outcome registryFlags() {
  std::ifstream in(kSource / "tests/data/technique_flags.tsv");
  if (!in) return {false, "tests/data/technique_flags.tsv missing"};
  std::string line;
  std::getline(in, line);
  const auto& reg = registry();
  std::size_t row = 0;
  int mismatches = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cells.push_back(c);
    if (cells.size() != 12 || row >= reg.size()) return {false, "malformed row: " + line};
    const TechniqueDescriptor& t = reg[row++];
    if (t.name != cells[0]) ++mismatches;
    const Flag flags[] = {t.cues.shading,       t.cues.shadow,         t.cues.color,         t.cues.transparency,
                          t.cues.surface,       t.cues.voidSpace,      t.phase.preattentive, t.phase.attentive,
                          t.distance.egocentric, t.distance.exocentric, t.realtime};
    for (int k = 0; k < 11; ++k) mismatches += flags[k] != parseFlag(cells[static_cast<std::size_t>(k + 1)]);
  }
  std::ostringstream d;
  d << reg.size() << " registry entries, " << row << " table rows, " << mismatches << " mismatched cells";
  return {reg.size() == 16 && row == 16 && mismatches == 0, d.str()};
}

// ---------------------------------------------------------------------------
// Determinism and goldens

std::vector<fs::path> exampleScenes() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kSource / "data/scenes")) {
    const std::string name = e.path().filename().string();
    if (e.path().extension() == ".json" && name.find("manifest") == std::string::npos) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string readFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const fs::path tmp = fs::temp_directory_path() / ("vdk_accept_" + std::to_string(std::random_device{}()));
  fs::create_directories(tmp);
  ServeOptions so;
  so.meshDir = kSource / "data/scenes";
  Server server(so);
  const int port = server.start(0);
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(120);
  int scenes = 0, cliDiff = 0, httpDiff = 0, errors = 0;
  for (const fs::path& scene : exampleScenes()) {
    ++scenes;
    std::string runs[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path out = tmp / (scene.stem().string() + std::to_string(k) + ".png");
      const std::string cmd = std::string("\"") + VDK_CLI_PATH + "\" render --scene \"" + scene.string() + "\" --out \"" +
                              out.string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) ++errors;
      runs[k] = readFile(out);
    }
    if (runs[0].empty() || runs[0] != runs[1]) ++cliDiff;
    auto res = client.Post("/api/render", readFile(scene), "application/json");
    if (!res || res->status != 200) {
      ++errors;
    } else if (res->body != runs[0]) {
      ++httpDiff;
    }
  }
  server.stop();
  fs::remove_all(tmp);
  std::ostringstream d;
  d << scenes << " example scenes: CLI run-to-run differences " << cliDiff << ", CLI vs HTTP differences " << httpDiff
    << ", errors " << errors;
  return {scenes >= 16 && cliDiff == 0 && httpDiff == 0 && errors == 0, d.str()};
}

Outcome goldens(bool write) {
  MeshCache cache;
  int compared = 0, mismatched = 0, missing = 0;
  std::ostringstream detail;
  for (const TechniqueDescriptor& t : registry()) {
    const fs::path scene = kSource / "data/scenes" / (t.id + ".json");
    const fs::path golden = kSource / "tests/golden" / (t.id + ".png");
    const RenderOutput out = renderScene(loadSceneFile(scene), cache, 512, 512);
    if (write) writeBytes(golden, out.png);
    if (!fs::exists(golden)) {
      ++missing;
      continue;
    }
    PngText text;
    const Image8 ref = readPng(golden, &text);
    ++compared;
    if (ref.width != out.image.width || ref.height != out.image.height || ref.rgba != out.image.rgba) {
      ++mismatched;
      long diff = 0;
      for (std::size_t i = 0; i < std::min(ref.rgba.size(), out.image.rgba.size()); ++i) diff += ref.rgba[i] != out.image.rgba[i];
      const bool sameScene = text[kSceneTextKey] == sceneTextValue(out.sceneHash, out.seed);
      detail << ' ' << t.id << " (" << diff << " bytes differ" << (sameScene ? "" : ", scene hash changed") << ")";
    }
  }
  std::ostringstream d;
  d << compared << " goldens compared at 512x512, " << mismatched << " mismatched, " << missing << " missing"
    << (write ? " (rewritten)" : "") << detail.str();
  return {compared == 16 && mismatched == 0 && missing == 0, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  bool writeGoldens = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--write-goldens") writeGoldens = true;
  }
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"endpoint pipeline (tube/Y/torus)", endpointPipeline},
      {"endpoint timing (~30k vertices <= 2 min)", endpointTiming},
      {"contraction volume monotonicity", volumeMonotonicity},
      {"shading formula suite", shadingSuite},
      {"curvature analytic checks", curvature},
      {"streamline spacing 512^2", streamlineSpacing},
      {"LIC anisotropy and identity", licAnisotropy},
      {"void-space bounds and midpoint", voidSpace},
      {"registry equals table", registryFlags},
      {"render determinism (CLI and HTTP)", determinism},
      {"golden images bit-exact", [&] { return goldens(writeGoldens); }},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.name << " -- " << o.detail << " [" << fmt("%.1fs", seconds(t0))
              << "]\n"
              << std::flush;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << '/' << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
