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

#include <algorithm>
#include <string>

#include "hspam/types.hpp"

namespace hspam {

RgbImage::RgbImage(int w, int h) : width(w), height(h) {
  if (w < 1 || h < 1) {
    throw Error(ErrorCode::invalid_argument, "image dimensions must be >= 1");
  }
  data.assign(3 * std::size_t(w) * h, 0);
}

LabelMap::LabelMap(int width, int height, std::vector<RegionId> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::invalid_argument,
                "label map dimensions must be >= 1");
  }
  if (labels_.size() != std::size_t(width) * height) {
    throw Error(ErrorCode::dimension_mismatch,
                "label buffer does not match " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  RegionId max_label = -1;
  for (RegionId l : labels_) {
    if (l < 0) throw Error(ErrorCode::format, "negative label");
    max_label = std::max(max_label, l);
  }
  std::vector<std::uint8_t> seen(std::size_t(max_label) + 1, 0);
  for (RegionId l : labels_) seen[l] = 1;
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw Error(ErrorCode::format, "labels are not contiguous from 0");
  }
  count_ = max_label + 1;
}

LabelMap LabelMap::compact(int width, int height, std::vector<RegionId> labels) {
  std::vector<RegionId> ids(labels);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (!ids.empty() && ids.front() < 0) {
    throw Error(ErrorCode::format, "negative label");
  }
  bool contiguous = ids.empty() || ids.back() == RegionId(ids.size()) - 1;
  if (!contiguous) {
    for (RegionId& l : labels) {
      l = RegionId(std::lower_bound(ids.begin(), ids.end(), l) - ids.begin());
    }
  }
  return LabelMap(width, height, std::move(labels));
}

LabelMap LabelMap::relabel_by_occurrence(int width, int height,
                                         std::span<const RegionId> labels) {
  RegionId max_label = -1;
  for (RegionId l : labels) max_label = std::max(max_label, l);
  std::vector<RegionId> remap(std::size_t(max_label) + 1, -1);
  std::vector<RegionId> out(labels.size());
  RegionId next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    RegionId& r = remap[labels[i]];
    if (r < 0) r = next++;
    out[i] = r;
  }
  return LabelMap(width, height, std::move(out));
}

}  // namespace hspam
