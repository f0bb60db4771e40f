#include "vdk/hatching/contours.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace vdk {

std::vector<std::pair<int, int>> contourEdges(const TriMesh& mesh, const Vec3& eye) {
  const auto& V = mesh.vertices();
  const auto& F = mesh.faces();
  const auto& N = mesh.faceNormals();
  std::vector<char> front(F.size());
  for (std::size_t f = 0; f < F.size(); ++f) {
    const Vec3 c = (V[F[f][0]] + V[F[f][1]] + V[F[f][2]]) / 3.0;
    front[f] = N[f].dot(eye - c) > 0.0;
  }
  std::vector<std::pair<int, int>> out;
  for (const EdgeRecord& e : buildEdges(F)) {
    bool contour = e.faces.size() == 1;
    for (std::size_t k = 1; k < e.faces.size() && !contour; ++k) {
      contour = front[e.faces[k]] != front[e.faces[0]];
    }
    if (contour) out.emplace_back(e.a, e.b);
  }
  return out;
}

std::vector<std::pair<std::vector<int>, bool>> chainEdges(const std::vector<std::pair<int, int>>& edges) {
  std::map<int, std::vector<int>> incident;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    incident[edges[i].first].push_back(static_cast<int>(i));
    incident[edges[i].second].push_back(static_cast<int>(i));
  }
  std::vector<char> used(edges.size(), 0);
  std::vector<std::pair<std::vector<int>, bool>> chains;
  auto other = [&](int e, int v) { return edges[e].first == v ? edges[e].second : edges[e].first; };
  auto walk = [&](int start, int firstEdge) {
    std::vector<int> path{start};
    int v = start, e = firstEdge;
    while (true) {
      used[e] = 1;
      v = other(e, v);
      path.push_back(v);
      const auto& inc = incident[v];
      if (inc.size() != 2) break;
      const int next = inc[0] == e ? inc[1] : inc[0];
      if (used[next]) break;
      e = next;
    }
    return path;
  };
  for (const auto& [v, inc] : incident) {
    if (inc.size() == 2) continue;
    for (int e : inc) {
      if (!used[e]) chains.emplace_back(walk(v, e), false);
    }
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (used[e]) continue;
    std::vector<int> path = walk(edges[e].first, static_cast<int>(e));
    const bool closed = path.size() > 2 && path.front() == path.back();
    if (closed) path.pop_back();
    chains.emplace_back(std::move(path), closed);
  }
  return chains;
}

namespace {

double depthCeiling(const FrameBuffer& fb, const Vec2& p) {
  const int cx = static_cast<int>(std::floor(p.x())), cy = static_cast<int>(std::floor(p.y()));
  double m = -std::numeric_limits<double>::infinity();
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int x = cx + dx, y = cy + dy;
      if (!fb.inside(x, y)) {
        m = std::numeric_limits<double>::infinity();
        continue;
      }
      m = std::max(m, fb.viewDepth[fb.index(x, y)]);
    }
  }
  return m;
}

struct Sample {
  Vec3 world;
  Vec2 screen;
  bool visible;
};

// Parameter t on segment ab where it properly crosses segment cd.
bool crossing(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double& t) {
  const Vec2 r = b - a, s = d - c;
  const double den = r.x() * s.y() - r.y() * s.x();
  if (std::abs(den) < 1e-12) return false;
  const Vec2 ac = c - a;
  t = (ac.x() * s.y() - ac.y() * s.x()) / den;
  const double u = (ac.x() * r.y() - ac.y() * r.x()) / den;
  return t > 1e-9 && t < 1.0 - 1e-9 && u > 1e-9 && u < 1.0 - 1e-9;
}

std::vector<ContourPolyline> splitAtCrossings(std::vector<ContourPolyline> lines) {
  struct Seg {
    int line, index;
  };
  std::vector<Seg> segs;
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const auto& pts = lines[l].screen;
    const int n = static_cast<int>(pts.size());
    const int count = lines[l].closed ? n : n - 1;
    for (int i = 0; i < count; ++i) segs.push_back({static_cast<int>(l), i});
    for (const Vec2& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  if (segs.empty()) return lines;
  const double cell = 8.0;
  const int gw = static_cast<int>((hi.x() - lo.x()) / cell) + 1, gh = static_cast<int>((hi.y() - lo.y()) / cell) + 1;
  std::vector<std::vector<int>> grid(static_cast<std::size_t>(gw) * gh);
  auto endpoints = [&](const Seg& s) {
    const auto& pts = lines[s.line].screen;
    return std::pair<Vec2, Vec2>(pts[s.index], pts[(s.index + 1) % pts.size()]);
  };
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const auto [a, b] = endpoints(segs[k]);
    const int x0 = static_cast<int>((std::min(a.x(), b.x()) - lo.x()) / cell);
    const int x1 = static_cast<int>((std::max(a.x(), b.x()) - lo.x()) / cell);
    const int y0 = static_cast<int>((std::min(a.y(), b.y()) - lo.y()) / cell);
    const int y1 = static_cast<int>((std::max(a.y(), b.y()) - lo.y()) / cell);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) grid[static_cast<std::size_t>(y) * gw + x].push_back(static_cast<int>(k));
    }
  }
  // Split parameters per (line, segment).
  std::map<std::pair<int, int>, std::vector<double>> cuts;
  for (const auto& bucket : grid) {
    for (std::size_t p = 0; p < bucket.size(); ++p) {
      for (std::size_t q = p + 1; q < bucket.size(); ++q) {
        const Seg& s1 = segs[bucket[p]];
        const Seg& s2 = segs[bucket[q]];
        const auto [a, b] = endpoints(s1);
        const auto [c, d] = endpoints(s2);
        double t1 = 0.0, t2 = 0.0;
        if (!crossing(a, b, c, d, t1) || !crossing(c, d, a, b, t2)) continue;
        cuts[{s1.line, s1.index}].push_back(t1);
        cuts[{s2.line, s2.index}].push_back(t2);
      }
    }
  }
  if (cuts.empty()) return lines;
  std::vector<ContourPolyline> out;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const ContourPolyline& src = lines[l];
    const int n = static_cast<int>(src.screen.size());
    const int count = src.closed ? n : n - 1;
    // Walk segments, emitting a new piece at each cut. Loops start at the
    // first cut so the wrap-around joins into one piece.
    int start = 0;
    if (src.closed) {
      for (int i = 0; i < count; ++i) {
        if (cuts.count({static_cast<int>(l), i})) {
          start = i;
          break;
        }
      }
    }
    bool hasCut = false;
    for (int i = 0; i < count; ++i) hasCut = hasCut || cuts.count({static_cast<int>(l), i});
    if (!hasCut) {
      out.push_back(src);
      continue;
    }
    ContourPolyline cur;
    cur.instance = src.instance;
    auto push = [&](const Vec3& w, const Vec2& s) {
      cur.world.push_back(w);
      cur.screen.push_back(s);
    };
    auto flush = [&]() {
      if (cur.screen.size() >= 2) out.push_back(cur);
      cur.world.clear();
      cur.screen.clear();
    };
    for (int k = 0; k < count; ++k) {
      const int i = (start + k) % count;
      const int j = (i + 1) % n;
      auto it = cuts.find({static_cast<int>(l), i});
      if (k == 0 && src.closed && it != cuts.end()) {
        // Begin at the first cut point of the starting segment.
        std::vector<double> ts = it->second;
        std::sort(ts.begin(), ts.end());
        const double t = ts.front();
        push(src.world[i] + t * (src.world[j] - src.world[i]), src.screen[i] + t * (src.screen[j] - src.screen[i]));
        for (std::size_t m = 1; m < ts.size(); ++m) {
          const double tm = ts[m];
          push(src.world[i] + tm * (src.world[j] - src.world[i]), src.screen[i] + tm * (src.screen[j] - src.screen[i]));
          flush();
          push(src.world[i] + tm * (src.world[j] - src.world[i]), src.screen[i] + tm * (src.screen[j] - src.screen[i]));
        }
        continue;
      }
      push(src.world[i], src.screen[i]);
      if (it != cuts.end()) {
        std::vector<double> ts = it->second;
        std::sort(ts.begin(), ts.end());
        for (double t : ts) {
          const Vec3 w = src.world[i] + t * (src.world[j] - src.world[i]);
          const Vec2 s = src.screen[i] + t * (src.screen[j] - src.screen[i]);
          push(w, s);
          flush();
          push(w, s);
        }
      }
    }
    if (src.closed) {
      // Close at the starting cut point.
      const int i = start, j = (start + 1) % n;
      std::vector<double> ts = cuts[{static_cast<int>(l), start}];
      std::sort(ts.begin(), ts.end());
      push(src.world[i], src.screen[i]);
      push(src.world[i] + ts.front() * (src.world[j] - src.world[i]),
           src.screen[i] + ts.front() * (src.screen[j] - src.screen[i]));
    } else {
      push(src.world.back(), src.screen.back());
    }
    flush();
  }
  return out;
}

}  // namespace

std::vector<ContourPolyline> extractContours(const Scene& scene, const FrameBuffer& geometry,
                                             const ContourOptions& options) {
  const Camera cam = scene.camera.withViewport(geometry.width, geometry.height);
  std::vector<ContourPolyline> out;
  for (std::size_t inst = 0; inst < scene.instances.size(); ++inst) {
    const TriMesh& mesh = *scene.instances[inst].mesh;
    for (const auto& [path, closed] : chainEdges(contourEdges(mesh, cam.position))) {
      // Resample to the requested screen spacing.
      std::vector<Sample> samples;
      const std::size_t segCount = closed ? path.size() : path.size() - 1;
      for (std::size_t k = 0; k < segCount; ++k) {
        const Vec3& a = mesh.vertex(path[k]);
        const Vec3& b = mesh.vertex(path[(k + 1) % path.size()]);
        const Vec3 pa = cam.project(a), pb = cam.project(b);
        if (pa.z() < cam.nearPlane || pb.z() < cam.nearPlane) {
          samples.push_back({a, Vec2(pa.x(), pa.y()), false});
          continue;
        }
        const double len = (pb.head<2>() - pa.head<2>()).norm();
        const int steps = std::max(1, static_cast<int>(std::ceil(len / options.sampleSpacingPx)));
        for (int s = 0; s < steps; ++s) {
          const double t = static_cast<double>(s) / steps;
          const Vec3 w = a + t * (b - a);
          const Vec3 p = cam.project(w);
          const Vec2 sp(p.x(), p.y());
          bool visible = true;
          if (options.removeOccluded) visible = p.z() <= depthCeiling(geometry, sp) + options.depthTolerance;
          samples.push_back({w, sp, visible});
        }
      }
      if (!closed) {
        const Vec3& b = mesh.vertex(path.back());
        const Vec3 p = cam.project(b);
        const Vec2 sp(p.x(), p.y());
        const bool visible = p.z() >= cam.nearPlane &&
                             (!options.removeOccluded || p.z() <= depthCeiling(geometry, sp) + options.depthTolerance);
        samples.push_back({b, sp, visible});
      }
      const bool allVisible = std::all_of(samples.begin(), samples.end(), [](const Sample& s) { return s.visible; });
      if (closed && allVisible) {
        ContourPolyline line;
        line.instance = static_cast<int>(inst);
        line.closed = true;
        for (const auto& s : samples) {
          line.world.push_back(s.world);
          line.screen.push_back(s.screen);
        }
        if (line.screen.size() >= options.minPoints) out.push_back(std::move(line));
        continue;
      }
      // Visible runs; a loop is rotated so a run is not cut at index 0.
      std::size_t offset = 0;
      if (closed) {
        for (std::size_t k = 0; k < samples.size(); ++k) {
          if (!samples[k].visible) {
            offset = k;
            break;
          }
        }
      }
      ContourPolyline cur;
      cur.instance = static_cast<int>(inst);
      auto flush = [&]() {
        if (cur.screen.size() >= options.minPoints) out.push_back(cur);
        cur.world.clear();
        cur.screen.clear();
      };
      for (std::size_t k = 0; k < samples.size(); ++k) {
        const Sample& s = samples[(offset + k) % samples.size()];
        if (s.visible) {
          cur.world.push_back(s.world);
          cur.screen.push_back(s.screen);
        } else {
          flush();
        }
      }
      flush();
    }
  }
  if (options.splitIntersections) out = splitAtCrossings(std::move(out));
  std::erase_if(out, [&](const ContourPolyline& l) { return !l.closed && screenLength(l) < options.minLengthPx; });
  return out;
}

double screenLength(const ContourPolyline& polyline) {
  double len = 0.0;
  const auto& p = polyline.screen;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) len += (p[i + 1] - p[i]).norm();
  if (polyline.closed && p.size() > 2) len += (p.front() - p.back()).norm();
  return len;
}

}  // namespace vdk
