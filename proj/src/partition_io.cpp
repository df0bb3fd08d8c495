// Copyright 2026 The hspam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hspam/partition_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include "json.hpp"
#include <system_error>

namespace hspam {
namespace {

// ---------------------------------------------------------------------------
// PNG plumbing. libpng reports errors with longjmp; every function that
// calls into it keeps its C++ locals declared before setjmp.

struct MemoryReader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t len) {
  auto* r = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (r->pos + len > r->bytes.size()) png_error(png, "unexpected end of data");
  std::memcpy(out, r->bytes.data() + r->pos, len);
  r->pos += len;
}

void write_to_vector(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void flush_noop(png_structp) {}

void warn_silent(png_structp, png_const_charp) {}

enum class PngTarget { rgb8, gray };

struct RawRaster {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> pixels;  // tightly packed rows

  unsigned sample(std::size_t i) const {
    if (bit_depth == 16) return (unsigned(pixels[2 * i]) << 8) | pixels[2 * i + 1];
    return pixels[i];
  }
};

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

RawRaster decode_png(std::span<const std::uint8_t> bytes, PngTarget target) {
  RawRaster raw;
  MemoryReader reader{bytes, 0};
  std::vector<png_bytep> rows;
  char message[200] = "undecodable PNG";

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           nullptr, warn_silent);
  if (!png) throw Error(ErrorCode::io, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::io, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::format, message);
  }
  png_set_read_fn(png, &reader, read_from_memory);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  png_set_expand(png);
  if ((color & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(png);
  }
  if (target == PngTarget::rgb8) {
    png_set_strip_16(png);
    if (!(color & PNG_COLOR_MASK_COLOR)) png_set_gray_to_rgb(png);
  } else if (color & PNG_COLOR_MASK_COLOR) {
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  }
  png_read_update_info(png, info);

  raw.width = int(png_get_image_width(png, info));
  raw.height = int(png_get_image_height(png, info));
  raw.channels = png_get_channels(png, info);
  raw.bit_depth = png_get_bit_depth(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  raw.pixels.resize(row_bytes * raw.height);
  rows.resize(raw.height);
  for (int y = 0; y < raw.height; ++y) rows[y] = raw.pixels.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return raw;
}

std::vector<std::uint8_t> encode_png_raw(int width, int height, int color_type,
                                         int bit_depth,
                                         std::span<const std::uint8_t> pixels) {
  std::vector<std::uint8_t> out;
  std::vector<png_bytep> rows(height);
  const std::size_t row_bytes =
      pixels.size() / static_cast<std::size_t>(height);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, warn_silent);
  if (!png) throw Error(ErrorCode::io, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::io, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::io, "PNG encoding failed");
  }
  png_set_write_fn(png, &out, write_to_vector, flush_noop);
  png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), bit_depth,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(pixels.data() + y * row_bytes);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

// ---------------------------------------------------------------------------
// Binary PPM/PGM (P6/P5), maxval <= 255.

RgbImage decode_pnm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 2;
  auto next_int = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    long v = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      any = true;
      if (v > 1 << 24) break;
    }
    if (!any) throw Error(ErrorCode::format, "malformed PNM header");
    return v;
  };
  const bool color = bytes[1] == '6';
  const long w = next_int();
  const long h = next_int();
  const long maxval = next_int();
  ++pos;  // single whitespace before the raster
  if (w < 1 || h < 1 || maxval < 1 || maxval > 255) {
    throw Error(ErrorCode::format, "unsupported PNM header");
  }
  const std::size_t channels = color ? 3 : 1;
  const std::size_t need = channels * std::size_t(w) * std::size_t(h);
  if (pos > bytes.size() || bytes.size() - pos < need) {
    throw Error(ErrorCode::format, "truncated PNM raster");
  }
  RgbImage img{int(w), int(h)};
  for (std::size_t i = 0; i < std::size_t(w) * h; ++i) {
    for (int c = 0; c < 3; ++c) {
      unsigned v = bytes[pos + i * channels + (color ? c : 0)];
      img.data[3 * i + c] = std::uint8_t(v * 255 / maxval);
    }
  }
  return img;
}

void require_same_size(int w0, int h0, int w1, int h1, const char* what) {
  if (w0 != w1 || h0 != h1) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": " + std::to_string(w0) + "x" +
                    std::to_string(h0) + " vs " + std::to_string(w1) + "x" +
                    std::to_string(h1));
  }
}

std::uint32_t read_u32_le(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
         (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

void append_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

// sRGB transfer curve, indexed by 8-bit code value.
const std::array<double, 256>& srgb_to_linear_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) {
      const double c = i / 255.0;
      t[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    }
    return t;
  }();
  return table;
}

double lab_f(double t) {
  constexpr double kEpsilon = 216.0 / 24389.0;
  constexpr double kKappa = 24389.0 / 27.0;
  return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::io, "read failed: " + path.string());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              std::streamsize(bytes.size()));
    if (!out) {
      out.close();
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::io, "write failed: " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::io, "cannot rename onto " + path.string());
  }
}

RgbImage decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) {
    RawRaster raw = decode_png(bytes, PngTarget::rgb8);
    RgbImage img(raw.width, raw.height);
    img.data = std::move(raw.pixels);
    return img;
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '5')) {
    return decode_pnm(bytes);
  }
  throw Error(ErrorCode::format, "undecodable image data");
}

RgbImage load_image(const std::filesystem::path& path) {
  try {
    return decode_image(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
  return encode_png_raw(image.width, image.height, PNG_COLOR_TYPE_RGB, 8,
                        image.data);
}

void save_image(const RgbImage& image, const std::filesystem::path& path) {
  write_file_atomic(path, encode_png(image));
}

LabelMap decode_label_map(std::span<const std::uint8_t> bytes) {
  if (!is_png(bytes)) throw Error(ErrorCode::format, "label map is not a PNG");
  RawRaster raw = decode_png(bytes, PngTarget::gray);
  std::vector<RegionId> labels(std::size_t(raw.width) * raw.height);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = RegionId(raw.sample(i));
  return LabelMap::compact(raw.width, raw.height, std::move(labels));
}

LabelMap load_label_map(const std::filesystem::path& path) {
  try {
    return decode_label_map(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_label_png(const LabelMap& labels) {
  if (labels.count() > 65536) {
    throw Error(ErrorCode::out_of_range,
                "16-bit label PNG holds at most 65536 regions");
  }
  std::vector<std::uint8_t> pixels(2 * labels.pixel_count());
  for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
    pixels[2 * i] = std::uint8_t(labels[i] >> 8);
    pixels[2 * i + 1] = std::uint8_t(labels[i] & 0xff);
  }
  return encode_png_raw(labels.width(), labels.height(), PNG_COLOR_TYPE_GRAY,
                        16, pixels);
}

void save_label_map(const LabelMap& labels, const std::filesystem::path& path) {
  write_file_atomic(path, encode_label_png(labels));
}

AttentionMap decode_attention(std::span<const std::uint8_t> bytes) {
  if (!is_png(bytes)) throw Error(ErrorCode::format, "attention map is not a PNG");
  RawRaster raw = decode_png(bytes, PngTarget::gray);
  const double maxval = raw.bit_depth == 16 ? 65535.0 : 255.0;
  AttentionMap att(raw.width, raw.height);
  for (std::size_t i = 0; i < att.values.size(); ++i) {
    att.values[i] = raw.sample(i) / maxval;
  }
  return att;
}

AttentionMap load_attention(const std::filesystem::path& path) {
  try {
    return decode_attention(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_attention_png(const AttentionMap& att) {
  std::vector<std::uint8_t> pixels(att.values.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = std::uint8_t(std::lround(std::clamp(att.values[i], 0.0, 1.0) * 255.0));
  }
  return encode_png_raw(att.width, att.height, PNG_COLOR_TYPE_GRAY, 8, pixels);
}

FeaturePlanes rgb_to_lab(const RgbImage& image) {
  const auto& lin = srgb_to_linear_table();
  constexpr double kWhiteX = 0.95047, kWhiteY = 1.0, kWhiteZ = 1.08883;
  const std::size_t n = image.pixel_count();
  FeaturePlanes out{image.width, image.height,
                    std::vector<std::vector<double>>(3, std::vector<double>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    const double r = lin[image.data[3 * i]];
    const double g = lin[image.data[3 * i + 1]];
    const double b = lin[image.data[3 * i + 2]];
    const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    const double fx = lab_f(x / kWhiteX);
    const double fy = lab_f(y / kWhiteY);
    const double fz = lab_f(z / kWhiteZ);
    out.planes[0][i] = std::clamp((116.0 * fy - 16.0) / 100.0, 0.0, 1.0);
    out.planes[1][i] = std::clamp((500.0 * (fx - fy) + 128.0) / 255.0, 0.0, 1.0);
    out.planes[2][i] = std::clamp((200.0 * (fy - fz) + 128.0) / 255.0, 0.0, 1.0);
  }
  return out;
}

FeaturePlanes position_planes(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::invalid_argument, "dimensions must be >= 1");
  }
  const std::size_t n = std::size_t(width) * height;
  FeaturePlanes out{width, height,
                    std::vector<std::vector<double>>(2, std::vector<double>(n))};
  const double sx = width > 1 ? 1.0 / (width - 1) : 0.0;
  const double sy = height > 1 ? 1.0 / (height - 1) : 0.0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = std::size_t(y) * width + x;
      out.planes[0][i] = x * sx;
      out.planes[1][i] = y * sy;
    }
  }
  return out;
}

FeaturePlanes decode_feature_tensor(std::span<const std::uint8_t> bytes,
                                    int width, int height) {
  constexpr std::size_t kHeader = 16;
  if (bytes.size() < kHeader || std::memcmp(bytes.data(), "HSPF", 4) != 0) {
    throw Error(ErrorCode::format, "HSPF magic mismatch");
  }
  const std::uint32_t w = read_u32_le(bytes.data() + 4);
  const std::uint32_t h = read_u32_le(bytes.data() + 8);
  const std::uint32_t c = read_u32_le(bytes.data() + 12);
  if (std::int64_t(w) != width || std::int64_t(h) != height) {
    throw Error(ErrorCode::dimension_mismatch,
                "HSPF tensor is " + std::to_string(w) + "x" + std::to_string(h) +
                    ", expected " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  const std::size_t n = std::size_t(w) * h;
  const std::size_t payload = std::size_t(c) * n * 4;
  if (bytes.size() - kHeader < payload) {
    throw Error(ErrorCode::format, "HSPF payload truncated");
  }
  if (bytes.size() - kHeader > payload) {
    throw Error(ErrorCode::format, "HSPF payload has trailing bytes");
  }
  FeaturePlanes out{width, height, std::vector<std::vector<double>>(c)};
  const std::uint8_t* p = bytes.data() + kHeader;
  for (std::uint32_t ch = 0; ch < c; ++ch) {
    auto& plane = out.planes[ch];
    plane.resize(n);
    for (std::size_t i = 0; i < n; ++i, p += 4) {
      const float v = std::bit_cast<float>(read_u32_le(p));
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::format, "HSPF tensor holds a non-finite value");
      }
      plane[i] = v;
    }
  }
  return out;
}

FeaturePlanes load_feature_tensor(const std::filesystem::path& path, int width,
                                  int height) {
  try {
    return decode_feature_tensor(read_file(path), width, height);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_feature_tensor(const FeaturePlanes& planes) {
  std::vector<std::uint8_t> out{'H', 'S', 'P', 'F'};
  append_u32_le(out, std::uint32_t(planes.width));
  append_u32_le(out, std::uint32_t(planes.height));
  append_u32_le(out, std::uint32_t(planes.channels()));
  for (const auto& plane : planes.planes) {
    for (double v : plane) append_u32_le(out, std::bit_cast<std::uint32_t>(float(v)));
  }
  return out;
}

void save_feature_tensor(const FeaturePlanes& planes,
                         const std::filesystem::path& path) {
  write_file_atomic(path, encode_feature_tensor(planes));
}

FeatureField assemble_features(const FeaturePlanes& lab, const FeaturePlanes& pos,
                               const FeaturePlanes* deep) {
  if (lab.channels() != FeatureField::kColorChannels ||
      pos.channels() != FeatureField::kPositionChannels) {
    throw Error(ErrorCode::invalid_argument,
                "expected 3 color planes and 2 position planes");
  }
  require_same_size(lab.width, lab.height, pos.width, pos.height,
                    "position planes");
  if (deep) require_same_size(lab.width, lab.height, deep->width, deep->height,
                              "deep feature planes");

  std::vector<const std::vector<double>*> order;
  for (const auto* src : {&lab, &pos, deep}) {
    if (!src) continue;
    for (const auto& plane : src->planes) order.push_back(&plane);
  }
  FeatureField field;
  field.width = lab.width;
  field.height = lab.height;
  field.channels = int(order.size());
  const std::size_t n = field.pixel_count();
  for (const auto* plane : order) {
    if (plane->size() != n) {
      throw Error(ErrorCode::dimension_mismatch, "feature plane size mismatch");
    }
  }
  field.data.resize(n * field.channels);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < field.channels; ++c) {
      field.data[i * field.channels + c] = (*order[c])[i];
    }
  }
  return field;
}

AttentionMap resample_attention(const AttentionMap& raw, int width, int height) {
  if (raw.width < 1 || raw.height < 1 || raw.values.empty()) {
    throw Error(ErrorCode::invalid_argument, "empty attention map");
  }
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::invalid_argument, "target dimensions must be >= 1");
  }
  auto source_coord = [](int dst, int dst_len, int src_len) {
    if (dst_len == 1) return 0.5 * (src_len - 1);
    return double(dst) * (src_len - 1) / (dst_len - 1);
  };
  AttentionMap out(width, height);
  for (int y = 0; y < height; ++y) {
    const double sy = source_coord(y, height, raw.height);
    const int y0 = std::min(int(sy), raw.height - 1);
    const int y1 = std::min(y0 + 1, raw.height - 1);
    const double fy = sy - y0;
    for (int x = 0; x < width; ++x) {
      const double sx = source_coord(x, width, raw.width);
      const int x0 = std::min(int(sx), raw.width - 1);
      const int x1 = std::min(x0 + 1, raw.width - 1);
      const double fx = sx - x0;
      const double top = (1 - fx) * raw(x0, y0) + fx * raw(x1, y0);
      const double bottom = (1 - fx) * raw(x0, y1) + fx * raw(x1, y1);
      out.values[std::size_t(y) * width + x] =
          std::clamp((1 - fy) * top + fy * bottom, 0.0, 1.0);
    }
  }
  return out;
}

double click_sigma(int width, int height) {
  return 0.05 * std::hypot(double(width), double(height));
}

AttentionMap clicks_to_attention(const ClickSet& clicks, const AttentionMap* base,
                                 int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::invalid_argument, "dimensions must be >= 1");
  }
  if (base) require_same_size(base->width, base->height, width, height,
                              "base attention");
  for (const Click& c : clicks) {
    if (c.x < 0 || c.y < 0 || c.x >= width || c.y >= height) {
      throw Error(ErrorCode::out_of_range,
                  "click (" + std::to_string(c.x) + ", " + std::to_string(c.y) +
                      ") outside the image");
    }
    if (!(c.strength > 0.0) || !std::isfinite(c.strength)) {
      throw Error(ErrorCode::invalid_argument, "click strength must be > 0");
    }
  }
  AttentionMap out = base ? *base : AttentionMap(width, height);
  if (clicks.empty()) return out;

  const double sigma = click_sigma(width, height);
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> delta(out.values.size(), 0.0);
  for (const Click& c : clicks) {
    const double amplitude =
        (c.sign == ClickSign::positive ? 1.0 : -1.0) * c.strength;
    for (int y = 0; y < height; ++y) {
      const double dy2 = double(y - c.y) * (y - c.y);
      for (int x = 0; x < width; ++x) {
        const double d2 = double(x - c.x) * (x - c.x) + dy2;
        delta[std::size_t(y) * width + x] +=
            amplitude * std::exp(-d2 * inv_two_sigma2);
      }
    }
  }
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = std::clamp(out.values[i] + delta[i], 0.0, 1.0);
  }
  return out;
}

ClickSet parse_clicks(std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format, std::string("click JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::format, "click JSON must be an array");
  ClickSet clicks;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("x") || !item.contains("y") ||
        !item["x"].is_number_integer() || !item["y"].is_number_integer()) {
      throw Error(ErrorCode::format, "click needs integer x and y");
    }
    Click c;
    c.x = item["x"].get<int>();
    c.y = item["y"].get<int>();
    const std::string sign = item.value("sign", std::string("+"));
    if (sign == "+") {
      c.sign = ClickSign::positive;
    } else if (sign == "-") {
      c.sign = ClickSign::negative;
    } else {
      throw Error(ErrorCode::format, "click sign must be \"+\" or \"-\"");
    }
    if (item.contains("strength")) {
      if (!item["strength"].is_number()) {
        throw Error(ErrorCode::format, "click strength must be a number");
      }
      c.strength = item["strength"].get<double>();
    }
    if (!(c.strength > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "click strength must be > 0");
    }
    clicks.push_back(c);
  }
  return clicks;
}

ClickSet load_clicks(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_clicks(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                       bytes.size()));
}

std::string clicks_to_json(const ClickSet& clicks) {
  nlohmann::json doc = nlohmann::json::array();
  for (const Click& c : clicks) {
    doc.push_back({{"x", c.x},
                   {"y", c.y},
                   {"sign", c.sign == ClickSign::positive ? "+" : "-"},
                   {"strength", c.strength}});
  }
  return doc.dump();
}

LabelMap grid_partition(int width, int height, int n) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::invalid_argument, "dimensions must be >= 1");
  }
  if (n < 1 || std::int64_t(n) > std::int64_t(width) * height) {
    throw Error(ErrorCode::out_of_range,
                "grid cell count " + std::to_string(n) + " outside [1, " +
                    std::to_string(std::int64_t(width) * height) + "]");
  }
  int cols = int(std::ceil(std::sqrt(double(n) * width / height)));
  cols = std::clamp(cols, 1, std::min(width, n));
  while ((n + cols - 1) / cols > height) ++cols;
  const int rows = (n + cols - 1) / cols;
  const int surplus = rows * cols - n;  // < cols
  const int last_row_cells = cols - surplus;

  std::vector<int> col_of_x(width), row_of_y(height);
  for (int c = 0; c < cols; ++c) {
    for (int x = int(std::int64_t(c) * width / cols);
         x < int(std::int64_t(c + 1) * width / cols); ++x) {
      col_of_x[x] = c;
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int y = int(std::int64_t(r) * height / rows);
         y < int(std::int64_t(r + 1) * height / rows); ++y) {
      row_of_y[y] = r;
    }
  }
  std::vector<RegionId> labels(std::size_t(width) * height);
  for (int y = 0; y < height; ++y) {
    const int r = row_of_y[y];
    for (int x = 0; x < width; ++x) {
      int c = col_of_x[x];
      if (r == rows - 1) c = std::min(c, last_row_cells - 1);
      labels[std::size_t(y) * width + x] = RegionId(r * cols + c);
    }
  }
  return LabelMap(width, height, std::move(labels));
}

}  // namespace hspam
