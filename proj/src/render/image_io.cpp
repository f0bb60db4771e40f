#include "vdk/render/image_io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>

#include "vdk/core/error.hpp"
#include "vdk/core/hash.hpp"

namespace vdk {

double linearToSrgb(double c) {
  c = clamp01(c);
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

double srgbToLinear(double c) {
  c = clamp01(c);
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

std::uint8_t encodeSrgb8(double linear) {
  if (!std::isfinite(linear)) linear = 0.0;
  return static_cast<std::uint8_t>(std::lround(linearToSrgb(linear) * 255.0));
}

Image8 toImage8(const std::vector<Rgba>& color, int width, int height) {
  Image8 img;
  img.width = width;
  img.height = height;
  img.rgba.resize(color.size() * 4);
  for (std::size_t i = 0; i < color.size(); ++i) {
    for (int k = 0; k < 3; ++k) img.rgba[i * 4 + k] = encodeSrgb8(color[i][k]);
    const double a = std::isfinite(color[i][3]) ? clamp01(color[i][3]) : 0.0;
    img.rgba[i * 4 + 3] = static_cast<std::uint8_t>(std::lround(a * 255.0));
  }
  return img;
}

Image8 toImage8(const FrameBuffer& fb) { return toImage8(fb.color, fb.width, fb.height); }

namespace {

// libpng reports errors by longjmp; exceptions must not cross its C frames.
struct PngErrorState {
  std::string message;
};

void pngError(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  state->message = msg;
  png_longjmp(png, 1);
}
void pngWarning(png_structp, png_const_charp) {}

struct ReadCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void appendBytes(png_structp p, png_bytep data, png_size_t len) {
  auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
  buf->insert(buf->end(), data, data + len);
}

void readBytes(png_structp p, png_bytep data, png_size_t len) {
  auto* c = static_cast<ReadCursor*>(png_get_io_ptr(p));
  if (c->offset + len > c->bytes.size()) png_error(p, "truncated PNG");
  std::memcpy(data, c->bytes.data() + c->offset, len);
  c->offset += len;
}

bool writePngImpl(png_structp png, png_infop info, const Image8& image, std::vector<png_text>& chunks,
                  std::vector<std::uint8_t>* out) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_write_fn(png, out, appendBytes, nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_sRGB(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
  if (!chunks.empty()) png_set_text(png, info, chunks.data(), static_cast<int>(chunks.size()));
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) png_write_row(png, const_cast<png_bytep>(image.pixel(0, y)));
  png_write_end(png, nullptr);
  return true;
}

bool readPngImpl(png_structp png, png_infop info, ReadCursor* cursor, Image8* img, std::vector<png_bytep>* rows,
                 PngText* text) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_read_fn(png, cursor, readBytes);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_gray_to_rgb(png);
  png_set_add_alpha(png, 0xff, PNG_FILLER_AFTER);
  png_read_update_info(png, info);
  img->width = static_cast<int>(png_get_image_width(png, info));
  img->height = static_cast<int>(png_get_image_height(png, info));
  img->rgba.resize(static_cast<std::size_t>(img->width) * img->height * 4);
  rows->resize(static_cast<std::size_t>(img->height));
  for (int y = 0; y < img->height; ++y) (*rows)[static_cast<std::size_t>(y)] = img->pixel(0, y);
  png_read_image(png, rows->data());
  png_read_end(png, info);
  if (text) {
    png_textp chunks = nullptr;
    int n = 0;
    png_get_text(png, info, &chunks, &n);
    for (int i = 0; i < n; ++i) (*text)[chunks[i].key] = std::string(chunks[i].text, chunks[i].text_length);
  }
  return true;
}

}  // namespace

std::vector<std::uint8_t> encodePng(const Image8& image, const PngText& text) {
  if (image.width <= 0 || image.height <= 0 ||
      image.rgba.size() != static_cast<std::size_t>(image.width) * image.height * 4) {
    throw Error(ErrorCode::InvalidArgument, "image buffer does not match its size");
  }
  std::vector<std::string> keys, values;
  for (const auto& [k, v] : text) {
    keys.push_back(k);
    values.push_back(v);
  }
  std::vector<png_text> chunks(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    chunks[i] = png_text{};
    chunks[i].compression = PNG_TEXT_COMPRESSION_NONE;
    chunks[i].key = keys[i].data();
    chunks[i].text = values[i].data();
    chunks[i].text_length = values[i].size();
  }
  PngErrorState state;
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, pngError, pngWarning);
  png_infop info = png_create_info_struct(png);
  const bool ok = writePngImpl(png, info, image, chunks, &out);
  png_destroy_write_struct(&png, &info);
  if (!ok) throw Error(ErrorCode::IOError, "png encode: " + state.message);
  return out;
}

Image8 decodePng(std::span<const std::uint8_t> bytes, PngText* text) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw Error(ErrorCode::IOError, "not a PNG file");
  PngErrorState state;
  ReadCursor cursor{bytes, 0};
  Image8 img;
  std::vector<png_bytep> rows;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, pngError, pngWarning);
  png_infop info = png_create_info_struct(png);
  const bool ok = readPngImpl(png, info, &cursor, &img, &rows, text);
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) throw Error(ErrorCode::IOError, "png decode: " + state.message);
  return img;
}

void writePng(const std::filesystem::path& path, const Image8& image, const PngText& text) {
  const auto bytes = encodePng(image, text);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IOError, "write failed for " + path.string());
}

Image8 readPng(const std::filesystem::path& path, PngText* text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decodePng(bytes, text);
}

void writeFloatDump(const std::filesystem::path& path, const FloatImage& image) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(image.width));
  w.u32(static_cast<std::uint32_t>(image.height));
  w.u32(static_cast<std::uint32_t>(image.channels));
  for (float f : image.data) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    w.u32(bits);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(w.data().data()), static_cast<std::streamsize>(w.data().size()));
}

FloatImage readFloatDump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  const std::vector<std::uint8_t> b((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto u32 = [&](std::size_t off) {
    return static_cast<std::uint32_t>(b[off]) | static_cast<std::uint32_t>(b[off + 1]) << 8 |
           static_cast<std::uint32_t>(b[off + 2]) << 16 | static_cast<std::uint32_t>(b[off + 3]) << 24;
  };
  if (b.size() < 12) throw Error(ErrorCode::ParseError, "float dump header truncated");
  FloatImage img;
  img.width = static_cast<int>(u32(0));
  img.height = static_cast<int>(u32(4));
  img.channels = static_cast<int>(u32(8));
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
  if (b.size() != 12 + 4 * n) throw Error(ErrorCode::ParseError, "float dump size does not match header");
  img.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t bits = u32(12 + 4 * i);
    std::memcpy(&img.data[i], &bits, sizeof bits);
  }
  return img;
}

namespace {

FloatImage makeFloat(const FrameBuffer& fb, int channels) {
  FloatImage img;
  img.width = fb.width;
  img.height = fb.height;
  img.channels = channels;
  img.data.resize(fb.size() * static_cast<std::size_t>(channels));
  return img;
}

}  // namespace

FloatImage depthChannel(const FrameBuffer& fb) {
  FloatImage img = makeFloat(fb, 1);
  for (std::size_t i = 0; i < fb.size(); ++i) img.data[i] = static_cast<float>(fb.depth[i]);
  return img;
}

FloatImage normalChannel(const FrameBuffer& fb) {
  FloatImage img = makeFloat(fb, 3);
  for (std::size_t i = 0; i < fb.size(); ++i) {
    for (int k = 0; k < 3; ++k) img.data[i * 3 + k] = static_cast<float>(fb.normal[i][k]);
  }
  return img;
}

FloatImage illumChannel(const FrameBuffer& fb) {
  FloatImage img = makeFloat(fb, 1);
  for (std::size_t i = 0; i < fb.size(); ++i) img.data[i] = static_cast<float>(fb.illum[i]);
  return img;
}

FloatImage maskChannel(const FrameBuffer& fb) {
  FloatImage img = makeFloat(fb, 1);
  for (std::size_t i = 0; i < fb.size(); ++i) img.data[i] = static_cast<float>(fb.objectMask[i]);
  return img;
}

}  // namespace vdk
