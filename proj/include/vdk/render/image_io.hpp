#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vdk/render/framebuffer.hpp"

namespace vdk {

/// 8-bit sRGB RGBA image, rows top to bottom.
struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;

  std::uint8_t* pixel(int x, int y) { return &rgba[(static_cast<std::size_t>(y) * width + x) * 4]; }
  const std::uint8_t* pixel(int x, int y) const { return &rgba[(static_cast<std::size_t>(y) * width + x) * 4]; }
};

using PngText = std::map<std::string, std::string>;

/// Keyword of the tEXt chunk that carries the scene hash and seed.
inline constexpr const char* kSceneTextKey = "veSSceNe";

double linearToSrgb(double c);
double srgbToLinear(double c);
/// Clamp to [0, 1], sRGB-encode and round to 8 bits.
std::uint8_t encodeSrgb8(double linear);

Image8 toImage8(const std::vector<Rgba>& color, int width, int height);
Image8 toImage8(const FrameBuffer& fb);

std::vector<std::uint8_t> encodePng(const Image8& image, const PngText& text = {});
Image8 decodePng(std::span<const std::uint8_t> bytes, PngText* text = nullptr);
void writePng(const std::filesystem::path& path, const Image8& image, const PngText& text = {});
Image8 readPng(const std::filesystem::path& path, PngText* text = nullptr);

/// Little-endian float32 dump: u32 width, u32 height, u32 channels, then
/// row-major interleaved samples.
struct FloatImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> data;
};

void writeFloatDump(const std::filesystem::path& path, const FloatImage& image);
FloatImage readFloatDump(const std::filesystem::path& path);

FloatImage depthChannel(const FrameBuffer& fb);
FloatImage normalChannel(const FrameBuffer& fb);
FloatImage illumChannel(const FrameBuffer& fb);
FloatImage maskChannel(const FrameBuffer& fb);

}  // namespace vdk
