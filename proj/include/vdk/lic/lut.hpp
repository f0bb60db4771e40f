#pragma once

#include <filesystem>
#include <vector>

#include "vdk/core/types.hpp"
#include "vdk/render/framebuffer.hpp"

namespace vdk {

/// 2D look-up table over (SSAO, normalized |IG|). Node (i, j) sits at
/// x = i / (width - 1), y = j / (height - 1). Each entry is RGB + weight.
struct Lut2D {
  int width = 0;
  int height = 0;
  std::vector<Rgba> values;  ///< row-major, row j = |IG| level

  Rgba& at(int i, int j) { return values[static_cast<std::size_t>(j) * width + i]; }
  const Rgba& at(int i, int j) const { return values[static_cast<std::size_t>(j) * width + i]; }

  /// Bilinear lookup with inputs clamped to [0, 1].
  Rgba sample(double x, double y) const;
  /// Throws InvalidArgument when smaller than 2x2 or sized inconsistently.
  void validate() const;
};

/// Neutral table: colour 1, weight 0.
Lut2D neutralLut();
/// brightness 1 - 0.7 * ssao, desaturation 0.6 * |IG|.
Lut2D defaultLut(int width = 16, int height = 16);

/// JSON grid {"width", "height", "values": [[r, g, b, w], ...]} or an RGBA
/// PNG (column = SSAO, row 0 = |IG| 0, 8-bit values / 255). Throws LUTMissing
/// when the file does not exist and ParseError when it is malformed.
Lut2D loadLut(const std::filesystem::path& path);
void saveLutJson(const std::filesystem::path& path, const Lut2D& lut);

/// Per-pixel RGB + weight image.
struct LutImage {
  int width = 0;
  int height = 0;
  std::vector<Rgba> data;
};

/// Bilinear lookup per pixel. Throws LUTMissing for an empty table.
LutImage applyLut(const ScalarImage& ssao, const ScalarImage& igMagnitude, const Lut2D& lut);

}  // namespace vdk
