#include "vdk/lic/lut.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "vdk/core/error.hpp"
#include "vdk/render/image_io.hpp"

namespace vdk {

Rgba Lut2D::sample(double x, double y) const {
  const double fx = clamp01(x) * (width - 1), fy = clamp01(y) * (height - 1);
  const int i0 = std::min(static_cast<int>(fx), width - 2), j0 = std::min(static_cast<int>(fy), height - 2);
  const double tx = fx - i0, ty = fy - j0;
  const Rgba top = at(i0, j0) * (1.0 - tx) + at(i0 + 1, j0) * tx;
  const Rgba bottom = at(i0, j0 + 1) * (1.0 - tx) + at(i0 + 1, j0 + 1) * tx;
  return top * (1.0 - ty) + bottom * ty;
}

void Lut2D::validate() const {
  if (width < 2 || height < 2) throw Error(ErrorCode::InvalidArgument, "lut must be at least 2x2");
  if (values.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::InvalidArgument, "lut value count does not match its size");
  }
}

Lut2D neutralLut() {
  Lut2D lut{2, 2, std::vector<Rgba>(4, Rgba(1, 1, 1, 0))};
  return lut;
}

Lut2D defaultLut(int width, int height) {
  Lut2D lut{width, height, std::vector<Rgba>(static_cast<std::size_t>(width) * height)};
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      const double b = 1.0 - 0.7 * i / (width - 1.0);
      lut.at(i, j) = Rgba(b, b, b, 0.6 * j / (height - 1.0));
    }
  }
  return lut;
}

namespace {

Lut2D lutFromJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("lut: ") + e.what());
  }
  Lut2D lut;
  try {
    lut.width = j.at("width").get<int>();
    lut.height = j.at("height").get<int>();
    for (const auto& v : j.at("values")) {
      if (v.size() != 4) throw Error(ErrorCode::ParseError, "lut: each value needs r, g, b, weight");
      lut.values.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("lut: ") + e.what());
  }
  try {
    lut.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return lut;
}

}  // namespace

Lut2D loadLut(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::LUTMissing, "lut file not found: " + path.string());
  if (path.extension() == ".png") {
    Image8 img;
    try {
      img = readPng(path);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, e.what());
    }
    Lut2D lut{img.width, img.height, {}};
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        const std::uint8_t* p = img.pixel(x, y);
        lut.values.emplace_back(p[0] / 255.0, p[1] / 255.0, p[2] / 255.0, p[3] / 255.0);
      }
    }
    try {
      lut.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, e.what());
    }
    return lut;
  }
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return lutFromJson(ss.str());
}

void saveLutJson(const std::filesystem::path& path, const Lut2D& lut) {
  lut.validate();
  nlohmann::json j;
  j["width"] = lut.width;
  j["height"] = lut.height;
  auto values = nlohmann::json::array();
  for (const Rgba& v : lut.values) values.push_back({v[0], v[1], v[2], v[3]});
  j["values"] = std::move(values);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + path.string());
  out << j.dump() << '\n';
}

LutImage applyLut(const ScalarImage& ssao, const ScalarImage& igMagnitude, const Lut2D& lut) {
  if (lut.values.empty()) throw Error(ErrorCode::LUTMissing, "no lut loaded");
  lut.validate();
  if (ssao.width != igMagnitude.width || ssao.height != igMagnitude.height) {
    throw Error(ErrorCode::InvalidArgument, "ssao and gradient images differ in size");
  }
  LutImage out{ssao.width, ssao.height, std::vector<Rgba>(ssao.data.size())};
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = lut.sample(ssao.data[i], igMagnitude.data[i]);
  return out;
}

}  // namespace vdk
