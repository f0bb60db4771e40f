#include "vdk/hatching/streamlines.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "vdk/core/error.hpp"
#include "vdk/core/random.hpp"

namespace vdk {

bool ScreenCrossField::inMask(const Vec2& p) const {
  const int x = static_cast<int>(std::floor(p.x())), y = static_cast<int>(std::floor(p.y()));
  if (x < 0 || y < 0 || x >= width || y >= height) return false;
  return mask[index(x, y)] != 0;
}

Vec2 ScreenCrossField::direction(const Vec2& p, const Vec2& previous) const {
  const double fx = p.x() - 0.5, fy = p.y() - 0.5;
  const int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
  const double tx = fx - x0, ty = fy - y0;
  double c = 0.0, s = 0.0;
  for (int dy = 0; dy <= 1; ++dy) {
    for (int dx = 0; dx <= 1; ++dx) {
      const int x = x0 + dx, y = y0 + dy;
      if (x < 0 || y < 0 || x >= width || y >= height || !mask[index(x, y)]) continue;
      const double w = (dx ? tx : 1.0 - tx) * (dy ? ty : 1.0 - ty);
      const double a = 4.0 * angle[index(x, y)];
      c += w * std::cos(a);
      s += w * std::sin(a);
    }
  }
  double base;
  if (c * c + s * s > 1e-24) {
    base = 0.25 * std::atan2(s, c);
  } else {
    const int x = std::clamp(static_cast<int>(std::floor(p.x())), 0, width - 1);
    const int y = std::clamp(static_cast<int>(std::floor(p.y())), 0, height - 1);
    base = angle[index(x, y)];
  }
  Vec2 best(std::cos(base), std::sin(base));
  if (previous.squaredNorm() == 0.0) return best;
  double bestDot = best.dot(previous);
  for (int k = 1; k < 4; ++k) {
    const double a = base + 0.5 * kPi * k;
    const Vec2 d(std::cos(a), std::sin(a));
    const double dot = d.dot(previous);
    if (dot > bestDot) {
      bestDot = dot;
      best = d;
    }
  }
  return best;
}

ScreenCrossField ScreenCrossField::rotated(double offset) const {
  ScreenCrossField f = *this;
  for (double& a : f.angle) a += offset;
  return f;
}

void HatchSet::append(const HatchSet& other) {
  strokes.insert(strokes.end(), other.strokes.begin(), other.strokes.end());
  widths.insert(widths.end(), other.widths.begin(), other.widths.end());
  level.insert(level.end(), other.level.begin(), other.level.end());
}

namespace {

struct PointRef {
  Vec2 p;
  int stroke;
  int arc;
};

class PointGrid {
 public:
  PointGrid(int width, int height, double cell)
      : cell_(cell),
        gw_(static_cast<int>(std::ceil(width / cell)) + 1),
        gh_(static_cast<int>(std::ceil(height / cell)) + 1),
        cells_(static_cast<std::size_t>(gw_) * gh_) {}

  void insert(const PointRef& r) { cells_[cellOf(r.p)].push_back(r); }

  void removeStroke(int stroke, const std::vector<Vec2>& points) {
    for (const Vec2& p : points) {
      auto& c = cells_[cellOf(p)];
      std::erase_if(c, [&](const PointRef& r) { return r.stroke == stroke; });
    }
  }

  /// Distance to the nearest point within radius, skipping points of `self`
  /// whose arc index is within `selfWindow` of `arc`.
  double nearest(const Vec2& p, double radius, int self = -1, int arc = 0, int selfWindow = 0) const {
    double best = std::numeric_limits<double>::infinity();
    const int r = static_cast<int>(std::ceil(radius / cell_));
    const int cx = clampX(static_cast<int>(std::floor(p.x() / cell_)));
    const int cy = clampY(static_cast<int>(std::floor(p.y() / cell_)));
    for (int y = std::max(0, cy - r); y <= std::min(gh_ - 1, cy + r); ++y) {
      for (int x = std::max(0, cx - r); x <= std::min(gw_ - 1, cx + r); ++x) {
        for (const PointRef& q : cells_[static_cast<std::size_t>(y) * gw_ + x]) {
          if (q.stroke == self && std::abs(q.arc - arc) <= selfWindow) continue;
          best = std::min(best, (q.p - p).norm());
        }
      }
    }
    return best;
  }

  /// Strokes with a point within radius of p.
  void strokesNear(const Vec2& p, double radius, std::map<int, double>& out) const {
    const int r = static_cast<int>(std::ceil(radius / cell_));
    const int cx = clampX(static_cast<int>(std::floor(p.x() / cell_)));
    const int cy = clampY(static_cast<int>(std::floor(p.y() / cell_)));
    for (int y = std::max(0, cy - r); y <= std::min(gh_ - 1, cy + r); ++y) {
      for (int x = std::max(0, cx - r); x <= std::min(gw_ - 1, cx + r); ++x) {
        for (const PointRef& q : cells_[static_cast<std::size_t>(y) * gw_ + x]) {
          const double d = (q.p - p).norm();
          if (d > radius) continue;
          auto it = out.find(q.stroke);
          if (it == out.end() || d < it->second) out[q.stroke] = d;
        }
      }
    }
  }

 private:
  int clampX(int x) const { return std::clamp(x, 0, gw_ - 1); }
  int clampY(int y) const { return std::clamp(y, 0, gh_ - 1); }
  std::size_t cellOf(const Vec2& p) const {
    return static_cast<std::size_t>(clampY(static_cast<int>(std::floor(p.y() / cell_)))) * gw_ +
           clampX(static_cast<int>(std::floor(p.x() / cell_)));
  }

  double cell_;
  int gw_, gh_;
  std::vector<std::vector<PointRef>> cells_;
};

}  // namespace

HatchSet evenlySpacedStreamlines(const ScreenCrossField& field, const StreamlineOptions& options) {
  if (!(options.dSep > 0.0) || !(options.step > 0.0) || !(options.dTestRatio > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "streamline spacing and step must be positive");
  }
  std::vector<std::size_t> masked;
  for (std::size_t i = 0; i < field.mask.size(); ++i) {
    if (field.mask[i]) masked.push_back(i);
  }
  if (masked.empty()) throw Error(ErrorCode::EmptyMask, "no pixel is available for hatching");

  const double dSep = options.dSep, dTest = options.dTest(), h = options.step;
  const double minLength = options.minLength > 0.0 ? options.minLength : dSep;
  const int selfWindow = static_cast<int>(std::ceil(3.0 * dTest / h));
  const int maxSteps = static_cast<int>(options.maxLength / (2.0 * h));
  const double seedTolerance = 0.5;
  PointGrid grid(field.width, field.height, dSep);
  HatchSet out;
  std::deque<int> queue;

  auto tryStroke = [&](const Vec2& seed) -> bool {
    if (!field.inMask(seed)) return false;
    if (grid.nearest(seed, dSep) < dSep - seedTolerance) return false;
    const int id = static_cast<int>(out.strokes.size());
    std::vector<Vec2> inserted{seed};
    grid.insert({seed, id, 0});
    // Start on the branch of the stored angle so one stroke family is traced.
    const double a0 = field.angle[field.index(static_cast<int>(seed.x()), static_cast<int>(seed.y()))];
    const Vec2 d0 = field.direction(seed, Vec2(std::cos(a0), std::sin(a0)));
    std::vector<Vec2> halves[2];
    for (int side = 0; side < 2; ++side) {
      Vec2 prev = side == 0 ? d0 : Vec2(-d0);
      Vec2 p = seed;
      for (int k = 1; k <= maxSteps; ++k) {
        const Vec2 d1 = field.direction(p, prev);
        const Vec2 mid = p + 0.5 * h * d1;
        if (!field.inMask(mid)) break;
        const Vec2 d2 = field.direction(mid, d1);
        const Vec2 q = p + h * d2;
        if (!field.inMask(q)) break;
        const int arc = side == 0 ? k : -k;
        if (grid.nearest(q, dTest, id, arc, selfWindow) < dTest) break;
        halves[side].push_back(q);
        grid.insert({q, id, arc});
        inserted.push_back(q);
        prev = d2;
        p = q;
      }
    }
    std::vector<Vec2> stroke(halves[1].rbegin(), halves[1].rend());
    stroke.push_back(seed);
    stroke.insert(stroke.end(), halves[0].begin(), halves[0].end());
    double len = 0.0;
    for (std::size_t i = 1; i < stroke.size(); ++i) len += (stroke[i] - stroke[i - 1]).norm();
    if (len < minLength) {
      grid.removeStroke(id, inserted);
      return false;
    }
    out.strokes.push_back(std::move(stroke));
    out.widths.push_back(options.baseWidth);
    out.level.push_back(options.level);
    queue.push_back(id);
    return true;
  };

  auto drain = [&]() {
    while (!queue.empty()) {
      const int id = queue.front();
      queue.pop_front();
      const std::vector<Vec2> pts = out.strokes[static_cast<std::size_t>(id)];
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec2 t = (i + 1 < pts.size() ? pts[i + 1] - pts[i] : pts[i] - pts[i - 1]).normalized();
        const Vec2 n(-t.y(), t.x());
        tryStroke(pts[i] + dSep * n);
        tryStroke(pts[i] - dSep * n);
      }
    }
  };

  Random rng(options.seed);
  const std::size_t first = masked[rng.index(masked.size())];
  tryStroke(Vec2(first % field.width + 0.5, static_cast<double>(first / field.width) + 0.5));
  drain();
  for (std::size_t i : masked) {
    const Vec2 p(i % field.width + 0.5, static_cast<double>(i / field.width) + 0.5);
    if (grid.nearest(p, dSep) < dSep) continue;
    if (tryStroke(p)) drain();
  }
  return out;
}

double strokeDistance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& p : a) {
    if (b.size() == 1) best = std::min(best, (p - b[0]).norm());
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      const Vec2 ab = b[i + 1] - b[i];
      const double len2 = ab.squaredNorm();
      const double t = len2 > 0.0 ? clamp01((p - b[i]).dot(ab) / len2) : 0.0;
      best = std::min(best, (b[i] + t * ab - p).norm());
    }
  }
  return best;
}

double strokeTone(const std::vector<Vec2>& stroke, const ScalarImage& tone) {
  if (stroke.empty()) return 1.0;
  double sum = 0.0;
  for (const Vec2& p : stroke) {
    const int x = std::clamp(static_cast<int>(std::floor(p.x())), 0, tone.width - 1);
    const int y = std::clamp(static_cast<int>(std::floor(p.y())), 0, tone.height - 1);
    sum += clamp01(tone.at(x, y));
  }
  return sum / static_cast<double>(stroke.size());
}

HatchSet pruneHatchesByTone(const HatchSet& hatches, const ScalarImage& tone, const PruneOptions& options) {
  const std::size_t n = hatches.size();
  HatchSet out;
  if (n == 0) return out;
  std::vector<double> strokeTones(n);
  for (std::size_t s = 0; s < n; ++s) strokeTones[s] = strokeTone(hatches.strokes[s], tone);

  PointGrid grid(tone.width, tone.height, std::max(1.0, options.adjacencyRadius));
  for (std::size_t s = 0; s < n; ++s) {
    for (const Vec2& p : hatches.strokes[s]) grid.insert({p, static_cast<int>(s), 0});
  }
  // Stroke adjacency with the closest approach to each neighbour.
  std::vector<std::map<int, double>> adj(n);
  for (std::size_t s = 0; s < n; ++s) {
    for (const Vec2& p : hatches.strokes[s]) grid.strokesNear(p, options.adjacencyRadius, adj[s]);
    adj[s].erase(static_cast<int>(s));
  }
  // Spacing unit: median closest-neighbour distance.
  std::vector<double> nearestGap;
  for (const auto& a : adj) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [t, d] : a) m = std::min(m, d);
    if (std::isfinite(m)) nearestGap.push_back(m);
  }
  double unit = 1.0;
  if (!nearestGap.empty()) {
    std::nth_element(nearestGap.begin(), nearestGap.begin() + nearestGap.size() / 2, nearestGap.end());
    unit = std::max(1e-6, nearestGap[nearestGap.size() / 2]);
  }

  // BFS levels measured in units of the stroke spacing, so parallel strokes
  // get consecutive indices regardless of the adjacency radius.
  std::vector<long long> levelIndex(n, -1);
  for (std::size_t root = 0; root < n; ++root) {
    if (levelIndex[root] >= 0) continue;
    levelIndex[root] = 0;
    std::deque<std::size_t> q{root};
    while (!q.empty()) {
      const std::size_t s = q.front();
      q.pop_front();
      for (const auto& [t, d] : adj[s]) {
        if (levelIndex[t] >= 0) continue;
        levelIndex[t] = levelIndex[s] + std::max<long long>(1, std::llround(d / unit));
        q.push_back(static_cast<std::size_t>(t));
      }
    }
  }

  for (std::size_t s = 0; s < n; ++s) {
    const double t = strokeTones[s];
    const double density = 1.0 - t;
    const double L = static_cast<double>(levelIndex[s]);
    bool keep = t < options.keepBelowTone ||
                std::floor((L + 1.0) * density + 1e-9) > std::floor(L * density + 1e-9);
    if (!keep) continue;
    out.strokes.push_back(hatches.strokes[s]);
    out.widths.push_back(std::clamp(options.baseWidth * density, options.minWidth, options.baseWidth));
    out.level.push_back(hatches.level[s]);
  }
  return out;
}

}  // namespace vdk
