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

#ifndef HSPAM_TYPES_HPP
#define HSPAM_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hspam {

enum class ErrorCode {
  invalid_argument,
  io,
  format,
  dimension_mismatch,
  out_of_range,
  disconnected,
};

/// Exception thrown by every fallible operation of the core library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

using RegionId = std::int32_t;

/// 8-bit RGB raster, row-major, interleaved.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h);

  std::size_t pixel_count() const { return std::size_t(width) * height; }
  std::uint8_t* at(int x, int y) { return &data[3 * (std::size_t(y) * width + x)]; }
  const std::uint8_t* at(int x, int y) const {
    return &data[3 * (std::size_t(y) * width + x)];
  }
};

/// Per-pixel region ids, contiguous in [0, count).
class LabelMap {
 public:
  LabelMap() = default;

  /// Validates contiguity: every id in [0, count) must occur and nothing else.
  LabelMap(int width, int height, std::vector<RegionId> labels);

  /// Remaps arbitrary non-negative ids onto [0, count) preserving their order.
  static LabelMap compact(int width, int height, std::vector<RegionId> labels);

  /// Relabels in order of first pixel occurrence (row-major scan).
  static LabelMap relabel_by_occurrence(int width, int height,
                                        std::span<const RegionId> labels);

  int width() const { return width_; }
  int height() const { return height_; }
  int count() const { return count_; }
  std::size_t pixel_count() const { return labels_.size(); }
  RegionId operator()(int x, int y) const {
    return labels_[std::size_t(y) * width_ + x];
  }
  RegionId operator[](std::size_t i) const { return labels_[i]; }
  std::span<const RegionId> labels() const { return labels_; }

  bool same_shape(const LabelMap& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int count_ = 0;
  std::vector<RegionId> labels_;
};

/// d-channel per-pixel feature vectors stored pixel-major:
/// channels [0,3) color, [3,5) position, [5,d) deep.
struct FeatureField {
  static constexpr int kColorChannels = 3;
  static constexpr int kPositionChannels = 2;
  static constexpr int kFirstPositionChannel = 3;
  static constexpr int kFirstDeepChannel = 5;

  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;

  std::size_t pixel_count() const { return std::size_t(width) * height; }
  std::span<const double> pixel(std::size_t i) const {
    return {data.data() + i * channels, std::size_t(channels)};
  }
};

/// Channel-planar feature planes; planes[c][y * width + x].
struct FeaturePlanes {
  int width = 0;
  int height = 0;
  std::vector<std::vector<double>> planes;

  int channels() const { return int(planes.size()); }
};

/// Scalar saliency in [0, 1] per pixel.
struct AttentionMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  AttentionMap() = default;
  AttentionMap(int w, int h, double fill = 0.0)
      : width(w), height(h), values(std::size_t(w) * h, fill) {}

  double operator()(int x, int y) const {
    return values[std::size_t(y) * width + x];
  }
};

enum class ClickSign { positive, negative };

struct Click {
  int x = 0;
  int y = 0;
  ClickSign sign = ClickSign::positive;
  double strength = 1.0;
};

using ClickSet = std::vector<Click>;

}  // namespace hspam

#endif  // HSPAM_TYPES_HPP
