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

#ifndef HSPAM_PARTITION_IO_HPP
#define HSPAM_PARTITION_IO_HPP

#include <filesystem>
#include <optional>
#include <string_view>

#include "hspam/types.hpp"

namespace hspam {

// Raster I/O. Images decode from PNG (any bit depth / color type) or binary
// PPM. Label maps are single-channel 16-bit PNG.
RgbImage load_image(const std::filesystem::path& path);
RgbImage decode_image(std::span<const std::uint8_t> bytes);
void save_image(const RgbImage& image, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_png(const RgbImage& image);

LabelMap load_label_map(const std::filesystem::path& path);
LabelMap decode_label_map(std::span<const std::uint8_t> bytes);
void save_label_map(const LabelMap& labels, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_label_png(const LabelMap& labels);

/// 8- or 16-bit gray PNG, value / maxval.
AttentionMap load_attention(const std::filesystem::path& path);
AttentionMap decode_attention(std::span<const std::uint8_t> bytes);
/// 8-bit gray PNG, round(255 * value).
std::vector<std::uint8_t> encode_attention_png(const AttentionMap& att);

/// sRGB -> CIELAB (D65), L / 100 and (a|b + 128) / 255.
FeaturePlanes rgb_to_lab(const RgbImage& image);

/// x / (width - 1) and y / (height - 1); a unit axis maps to 0.
FeaturePlanes position_planes(int width, int height);

// HSPF tensor: "HSPF", u32 width, u32 height, u32 channels, then channel
// planes of row-major little-endian f32.
FeaturePlanes load_feature_tensor(const std::filesystem::path& path, int width,
                                  int height);
FeaturePlanes decode_feature_tensor(std::span<const std::uint8_t> bytes,
                                    int width, int height);
std::vector<std::uint8_t> encode_feature_tensor(const FeaturePlanes& planes);
void save_feature_tensor(const FeaturePlanes& planes,
                         const std::filesystem::path& path);

/// Concatenates [color, position, deep]; deep may be absent (d = 5).
FeatureField assemble_features(const FeaturePlanes& lab,
                               const FeaturePlanes& pos,
                               const FeaturePlanes* deep = nullptr);

/// Bilinear resample (corner-aligned) clamped to [0, 1].
AttentionMap resample_attention(const AttentionMap& raw, int width, int height);

/// Gaussian footprint width used by clicks_to_attention, in pixels.
double click_sigma(int width, int height);

/// Each click adds sign * strength * gaussian(sigma = 5% of the diagonal) on
/// top of `base` (zeros if absent); the sum is clamped to [0, 1].
AttentionMap clicks_to_attention(const ClickSet& clicks,
                                 const AttentionMap* base, int width,
                                 int height);

/// JSON array of {x, y, sign: "+"|"-", strength}.
ClickSet parse_clicks(std::string_view json);
ClickSet load_clicks(const std::filesystem::path& path);
std::string clicks_to_json(const ClickSet& clicks);

/// Near-square grid with exactly n cells; surplus cells of the last row are
/// folded into their left neighbour.
LabelMap grid_partition(int width, int height, int n);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes through a sibling temporary and renames, so a failed write never
/// leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes);

}  // namespace hspam

#endif  // HSPAM_PARTITION_IO_HPP
