#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vdk/core/types.hpp"

namespace vdk {

/// Piecewise-linear colour ramp over [0, 1] in linear RGB.
class ColorMap {
 public:
  ColorMap(std::string name, std::vector<std::pair<double, Rgb>> stops);

  const std::string& name() const { return name_; }
  const std::vector<std::pair<double, Rgb>>& stops() const { return stops_; }
  /// t is clamped to [0, 1].
  Rgb operator()(double t) const;

  /// Built-ins: "heat" (red to white), "diverging" (blue-white-red),
  /// "viridis" (perceptual ramp). Throws InvalidArgument for other names.
  static ColorMap named(const std::string& name);
  static std::vector<std::string> builtinNames();
  /// { name, stops: [[t, r, g, b]] } with linear-light components.
  static ColorMap load(const std::filesystem::path& path);

 private:
  std::string name_;
  std::vector<std::pair<double, Rgb>> stops_;
};

struct ScalarField {
  std::vector<double> values;  ///< one per vertex
  std::vector<std::string> warnings;
};

/// Parses { values: [...] } or { map: { "id": value } }; the map must cover
/// every vertex. Throws LengthMismatch or NonFiniteScalar.
ScalarField parseScalarField(const std::string& json, std::size_t vertexCount);
ScalarField loadScalarField(const std::filesystem::path& path, std::size_t vertexCount);

/// Min-max normalization, or into [lo, hi] when a range is given. A constant
/// field maps to 0 and records a warning.
std::vector<double> normalizeScalars(const std::vector<double>& values, std::vector<std::string>* warnings = nullptr,
                                     const std::pair<double, double>* range = nullptr);

}  // namespace vdk
