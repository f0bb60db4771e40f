#pragma once

#include <cstdint>
#include <vector>

#include "vdk/render/framebuffer.hpp"

namespace vdk {

/// Screen-space cross field: per-pixel angle (radians, any representative of
/// the four branches) and a mask of pixels that may carry strokes.
struct ScreenCrossField {
  int width = 0;
  int height = 0;
  std::vector<double> angle;
  std::vector<std::uint8_t> mask;

  ScreenCrossField() = default;
  ScreenCrossField(int w, int h) : width(w), height(h), angle(static_cast<std::size_t>(w) * h, 0.0), mask(angle.size(), 0) {}
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  bool inMask(const Vec2& p) const;
  /// Unit direction of the branch closest to `previous`, interpolating the
  /// 4-fold angle bilinearly over masked pixels.
  Vec2 direction(const Vec2& p, const Vec2& previous) const;
  /// Rotated by a quarter turn in every pixel of a copy with angle + offset.
  ScreenCrossField rotated(double offset) const;
};

enum class HatchLevel { Hatch, CrossHatch, Removed };

struct HatchSet {
  std::vector<std::vector<Vec2>> strokes;  ///< pixel coordinates
  std::vector<double> widths;              ///< px
  std::vector<HatchLevel> level;

  std::size_t size() const { return strokes.size(); }
  void append(const HatchSet& other);
};

struct StreamlineOptions {
  double dSep = 6.0;
  double dTestRatio = 0.5;
  double step = 1.0;
  double maxLength = 4000.0;  ///< px per stroke
  double minLength = 0.0;     ///< shorter strokes are discarded; 0 = dSep
  double baseWidth = 1.5;
  std::uint64_t seed = 1;
  HatchLevel level = HatchLevel::Hatch;

  double dTest() const { return dTestRatio * dSep; }
};

/// Jobard-Lefer evenly spaced streamlines. Seeds come from existing strokes
/// at distance dSep, then from a raster scan for uncovered regions. Throws
/// EmptyMask when no pixel is masked.
HatchSet evenlySpacedStreamlines(const ScreenCrossField& field, const StreamlineOptions& options = {});

/// Minimum distance from any point of stroke a to the polyline of stroke b.
double strokeDistance(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

struct PruneOptions {
  double baseWidth = 1.5;
  double minWidth = 0.5;
  double adjacencyRadius = 12.0;  ///< px, usually 2 dSep
  double keepBelowTone = 0.05;    ///< strokes darker than this are never removed
};

/// Removes strokes in bright regions so that the kept fraction follows
/// 1 - tone, walking the stroke-adjacency graph breadth-first with error
/// diffusion so survivors stay evenly interleaved. Widths become
/// baseWidth (1 - tone) clamped to [minWidth, baseWidth].
HatchSet pruneHatchesByTone(const HatchSet& hatches, const ScalarImage& tone, const PruneOptions& options = {});

/// Mean tone sampled at the stroke points (nearest pixel).
double strokeTone(const std::vector<Vec2>& stroke, const ScalarImage& tone);

}  // namespace vdk
