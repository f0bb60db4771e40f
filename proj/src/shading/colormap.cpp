#include "vdk/shading/colormap.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

#include "vdk/core/error.hpp"

namespace vdk {

ColorMap::ColorMap(std::string name, std::vector<std::pair<double, Rgb>> stops)
    : name_(std::move(name)), stops_(std::move(stops)) {
  if (stops_.size() < 2) throw Error(ErrorCode::InvalidArgument, "colormap needs at least two stops");
  if (stops_.front().first != 0.0 || stops_.back().first != 1.0) {
    throw Error(ErrorCode::InvalidArgument, "colormap stops must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < stops_.size(); ++i) {
    if (!(stops_[i].first >= stops_[i - 1].first)) throw Error(ErrorCode::InvalidArgument, "colormap stops must be sorted");
  }
}

Rgb ColorMap::operator()(double t) const {
  t = std::isfinite(t) ? clamp01(t) : 0.0;
  for (std::size_t i = 1; i < stops_.size(); ++i) {
    if (t <= stops_[i].first) {
      const double a = stops_[i - 1].first, b = stops_[i].first;
      const double u = b > a ? (t - a) / (b - a) : 1.0;
      return lerp(stops_[i - 1].second, stops_[i].second, u);
    }
  }
  return stops_.back().second;
}

namespace {

double toLinear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }
Rgb fromSrgb(double r, double g, double b) { return Rgb(toLinear(r), toLinear(g), toLinear(b)); }

}  // namespace

ColorMap ColorMap::named(const std::string& name) {
  if (name == "heat") {
    return ColorMap("heat", {{0.0, Rgb(1.0, 0.0, 0.0)}, {0.5, Rgb(1.0, 0.45, 0.0)}, {1.0, Rgb(1.0, 1.0, 1.0)}});
  }
  if (name == "diverging") {
    return ColorMap("diverging", {{0.0, fromSrgb(0.23, 0.30, 0.75)}, {0.5, fromSrgb(0.87, 0.87, 0.87)},
                                  {1.0, fromSrgb(0.71, 0.02, 0.15)}});
  }
  if (name == "viridis") {
    return ColorMap("viridis", {{0.0, fromSrgb(0.267, 0.005, 0.329)},
                                {0.125, fromSrgb(0.283, 0.141, 0.458)},
                                {0.25, fromSrgb(0.254, 0.265, 0.530)},
                                {0.375, fromSrgb(0.207, 0.372, 0.553)},
                                {0.5, fromSrgb(0.164, 0.471, 0.558)},
                                {0.625, fromSrgb(0.128, 0.567, 0.551)},
                                {0.75, fromSrgb(0.135, 0.659, 0.518)},
                                {0.875, fromSrgb(0.267, 0.749, 0.441)},
                                {1.0, fromSrgb(0.993, 0.906, 0.144)}});
  }
  throw Error(ErrorCode::InvalidArgument, "unknown colormap '" + name + "'");
}

std::vector<std::string> ColorMap::builtinNames() { return {"heat", "diverging", "viridis"}; }

ColorMap ColorMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("colormap: ") + e.what());
  }
  if (!j.is_object() || !j.contains("stops") || !j["stops"].is_array()) {
    throw Error(ErrorCode::ParseError, "colormap needs a stops array");
  }
  std::vector<std::pair<double, Rgb>> stops;
  for (const auto& s : j["stops"]) {
    if (!s.is_array() || s.size() != 4) throw Error(ErrorCode::ParseError, "colormap stops are [t, r, g, b]");
    stops.emplace_back(s[0].get<double>(), Rgb(s[1].get<double>(), s[2].get<double>(), s[3].get<double>()));
  }
  return ColorMap(j.value("name", path.stem().string()), std::move(stops));
}

ScalarField parseScalarField(const std::string& text, std::size_t vertexCount) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("scalar field: ") + e.what());
  }
  ScalarField field;
  auto number = [](const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    throw Error(ErrorCode::ParseError, "scalar values must be numbers");
  };
  if (j.is_object() && j.contains("values")) {
    const auto& vals = j["values"];
    if (!vals.is_array()) throw Error(ErrorCode::ParseError, "values must be an array");
    if (vals.size() != vertexCount) {
      throw Error(ErrorCode::LengthMismatch, "scalar field has " + std::to_string(vals.size()) + " values for " +
                                                 std::to_string(vertexCount) + " vertices");
    }
    for (const auto& v : vals) field.values.push_back(number(v));
  } else if (j.is_object() && j.contains("map")) {
    const auto& map = j["map"];
    if (!map.is_object()) throw Error(ErrorCode::ParseError, "map must be an object");
    field.values.assign(vertexCount, std::numeric_limits<double>::quiet_NaN());
    std::vector<char> seen(vertexCount, 0);
    for (const auto& [key, v] : map.items()) {
      std::size_t pos = 0;
      long long id = -1;
      try {
        id = std::stoll(key, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != key.size() || id < 0 || static_cast<std::size_t>(id) >= vertexCount) {
        throw Error(ErrorCode::LengthMismatch, "scalar map key '" + key + "' is not a vertex id");
      }
      field.values[static_cast<std::size_t>(id)] = number(v);
      seen[static_cast<std::size_t>(id)] = 1;
    }
    const auto missing = std::count(seen.begin(), seen.end(), 0);
    if (missing) throw Error(ErrorCode::LengthMismatch, "scalar map misses " + std::to_string(missing) + " vertices");
  } else {
    throw Error(ErrorCode::ParseError, "scalar field needs 'values' or 'map'");
  }
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (!std::isfinite(field.values[i])) {
      throw Error(ErrorCode::NonFiniteScalar, "scalar at vertex " + std::to_string(i) + " is not finite");
    }
  }
  return field;
}

ScalarField loadScalarField(const std::filesystem::path& path, std::size_t vertexCount) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parseScalarField(ss.str(), vertexCount);
}

std::vector<double> normalizeScalars(const std::vector<double>& values, std::vector<std::string>* warnings,
                                     const std::pair<double, double>* range) {
  double lo, hi;
  if (range) {
    lo = range->first;
    hi = range->second;
  } else if (values.empty()) {
    return {};
  } else {
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    lo = *mn;
    hi = *mx;
  }
  std::vector<double> out(values.size(), 0.0);
  if (!(hi > lo)) {
    if (warnings) warnings->push_back("constant scalar field mapped to colormap(0)");
    return out;
  }
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = clamp01((values[i] - lo) / (hi - lo));
  return out;
}

}  // namespace vdk
