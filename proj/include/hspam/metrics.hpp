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

#ifndef HSPAM_METRICS_HPP
#define HSPAM_METRICS_HPP

#include <array>
#include <optional>
#include <string>

#include "hspam/types.hpp"

namespace hspam {

/// bits[i] is set when some 4-neighbour of pixel i carries another label.
struct BoundaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  std::size_t count() const;
  bool operator()(int x, int y) const {
    return bits[std::size_t(y) * width + x] != 0;
  }
};

inline constexpr int kDefaultBoundaryTolerance = 2;

struct MetricsReport {
  int k = 0;
  double asa = 0.0;
  double br = 0.0;
  double cd = 0.0;
  double src = 0.0;
  std::optional<double> nestedness;
  int eps = kDefaultBoundaryTolerance;
  int ground_truths = 0;

  std::string to_json() const;
};

BoundaryMask boundary_mask(const LabelMap& labels);

/// Achievable segmentation accuracy.
double asa(const LabelMap& labels, const LabelMap& gt);

/// Fraction of ground-truth boundary pixels with a superpixel boundary pixel
/// within Chebyshev distance eps. Vacuously 1 when gt has no boundary.
double boundary_recall(const LabelMap& labels, const LabelMap& gt, int eps);

double contour_density(const LabelMap& labels);

/// Shape regularity: size-weighted mean of convexity * hull circularity *
/// coordinate balance. Hulls are taken over pixel corners (unit squares).
double src(const LabelMap& labels);

/// Size-weighted share of each fine region inside its best coarse region.
double nestedness(const LabelMap& fine, const LabelMap& coarse);

/// Averages asa/br over every ground truth; cd/src depend on labels only.
MetricsReport evaluate(const LabelMap& labels,
                       std::span<const LabelMap> ground_truths,
                       const LabelMap* coarser, int eps);

RgbImage render_overlay(const RgbImage& image, const LabelMap& labels,
                        std::array<std::uint8_t, 3> color);

}  // namespace hspam

#endif  // HSPAM_METRICS_HPP
