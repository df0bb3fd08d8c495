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

#include "hspam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include "json.hpp"
#include <numbers>
#include <unordered_map>

namespace hspam {
namespace {

void require_same_shape(const LabelMap& a, const LabelMap& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": " + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + " vs " +
                    std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

// sum over regions r of a of max over regions q of b of |r ∩ q|.
std::int64_t best_overlap_total(const LabelMap& a, const LabelMap& b) {
  std::unordered_map<std::uint64_t, std::int64_t> joint;
  joint.reserve(std::size_t(a.count()) * 2);
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    ++joint[(std::uint64_t(a[i]) << 32) | std::uint32_t(b[i])];
  }
  std::vector<std::int64_t> best(a.count(), 0);
  for (const auto& [key, n] : joint) {
    auto& slot = best[key >> 32];
    slot = std::max(slot, n);
  }
  std::int64_t total = 0;
  for (std::int64_t n : best) total += n;
  return total;
}

struct RowSpan {
  int y;
  int xmin;
  int xmax;
};

struct Point {
  std::int64_t x;
  std::int64_t y;
};

std::int64_t cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew's monotone chain; returns the hull counter-clockwise, no repeats.
std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point& a, const Point& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

std::size_t BoundaryMask::count() const {
  return std::size_t(std::count(bits.begin(), bits.end(), std::uint8_t(1)));
}

BoundaryMask boundary_mask(const LabelMap& labels) {
  const int w = labels.width(), h = labels.height();
  BoundaryMask mask{w, h, std::vector<std::uint8_t>(labels.pixel_count(), 0)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const RegionId l = labels(x, y);
      const std::size_t i = std::size_t(y) * w + x;
      if ((x + 1 < w && labels(x + 1, y) != l)) {
        mask.bits[i] = mask.bits[i + 1] = 1;
      }
      if ((y + 1 < h && labels(x, y + 1) != l)) {
        mask.bits[i] = mask.bits[i + w] = 1;
      }
    }
  }
  return mask;
}

double asa(const LabelMap& labels, const LabelMap& gt) {
  require_same_shape(labels, gt, "ground truth");
  return double(best_overlap_total(labels, gt)) / double(labels.pixel_count());
}

double boundary_recall(const LabelMap& labels, const LabelMap& gt, int eps) {
  require_same_shape(labels, gt, "ground truth");
  if (eps < 0) throw Error(ErrorCode::invalid_argument, "eps must be >= 0");
  const BoundaryMask truth = boundary_mask(gt);
  const std::size_t total = truth.count();
  if (total == 0) return 1.0;

  const BoundaryMask found = boundary_mask(labels);
  const int w = labels.width(), h = labels.height();
  // Summed-area table with a zero guard row/column.
  std::vector<std::int64_t> sat(std::size_t(w + 1) * (h + 1), 0);
  for (int y = 0; y < h; ++y) {
    std::int64_t row = 0;
    for (int x = 0; x < w; ++x) {
      row += found(x, y);
      sat[std::size_t(y + 1) * (w + 1) + x + 1] =
          sat[std::size_t(y) * (w + 1) + x + 1] + row;
    }
  }
  auto box = [&](int x0, int y0, int x1, int y1) {  // inclusive corners
    const std::size_t stride = w + 1;
    return sat[(y1 + 1) * stride + x1 + 1] - sat[y0 * stride + x1 + 1] -
           sat[(y1 + 1) * stride + x0] + sat[y0 * stride + x0];
  };
  std::size_t hit = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!truth(x, y)) continue;
      if (box(std::max(0, x - eps), std::max(0, y - eps), std::min(w - 1, x + eps),
              std::min(h - 1, y + eps)) > 0) {
        ++hit;
      }
    }
  }
  return double(hit) / double(total);
}

double contour_density(const LabelMap& labels) {
  return double(boundary_mask(labels).count()) / double(labels.pixel_count());
}

double src(const LabelMap& labels) {
  const int n = labels.count();
  std::vector<std::vector<RowSpan>> rows(n);
  std::vector<double> sx(n, 0), sy(n, 0), sxx(n, 0), syy(n, 0);
  std::vector<std::int64_t> size(n, 0);
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      const RegionId r = labels(x, y);
      auto& spans = rows[r];
      if (spans.empty() || spans.back().y != y) {
        spans.push_back({y, x, x});
      } else {
        spans.back().xmax = x;
      }
      ++size[r];
      sx[r] += x;
      sy[r] += y;
      sxx[r] += double(x) * x;
      syy[r] += double(y) * y;
    }
  }
  const double total = double(labels.pixel_count());
  double score = 0.0;
  std::vector<Point> corners;
  for (int r = 0; r < n; ++r) {
    const double s = double(size[r]);
    if (size[r] == 1) {
      score += s / total;
      continue;
    }
    corners.clear();
    for (const RowSpan& span : rows[r]) {
      corners.push_back({span.xmin, span.y});
      corners.push_back({span.xmin, span.y + 1});
      corners.push_back({span.xmax + 1, span.y});
      corners.push_back({span.xmax + 1, span.y + 1});
    }
    const std::vector<Point> hull = convex_hull(corners);
    double twice_area = 0.0, perimeter = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Point& a = hull[i];
      const Point& b = hull[(i + 1) % hull.size()];
      twice_area += double(a.x * b.y - b.x * a.y);
      perimeter += std::hypot(double(b.x - a.x), double(b.y - a.y));
    }
    const double area = 0.5 * twice_area;
    const double convexity = std::min(1.0, s / area);
    const double smoothness =
        std::min(1.0, 4.0 * std::numbers::pi * area / (perimeter * perimeter));
    const double var_x = std::max(0.0, sxx[r] / s - (sx[r] / s) * (sx[r] / s));
    const double var_y = std::max(0.0, syy[r] / s - (sy[r] / s) * (sy[r] / s));
    const double dev_x = std::sqrt(var_x), dev_y = std::sqrt(var_y);
    const double hi = std::max(dev_x, dev_y);
    const double balance = hi > 0.0 ? std::min(dev_x, dev_y) / hi : 1.0;
    score += (s / total) * convexity * smoothness * balance;
  }
  return std::clamp(score, 0.0, 1.0);
}

double nestedness(const LabelMap& fine, const LabelMap& coarse) {
  require_same_shape(fine, coarse, "coarse partition");
  // Fast path: every fine region maps to a single coarse label.
  std::vector<RegionId> home(fine.count(), -1);
  bool contained = true;
  for (std::size_t i = 0; i < fine.pixel_count() && contained; ++i) {
    RegionId& h = home[fine[i]];
    if (h < 0) h = coarse[i];
    contained = h == coarse[i];
  }
  if (contained) return 1.0;
  const std::int64_t inside = best_overlap_total(fine, coarse);
  if (inside == std::int64_t(fine.pixel_count())) return 1.0;
  return double(inside) / double(fine.pixel_count());
}

MetricsReport evaluate(const LabelMap& labels,
                       std::span<const LabelMap> ground_truths,
                       const LabelMap* coarser, int eps) {
  if (ground_truths.empty()) {
    throw Error(ErrorCode::invalid_argument, "at least one ground truth is required");
  }
  MetricsReport report;
  report.k = labels.count();
  report.eps = eps;
  report.ground_truths = int(ground_truths.size());
  for (const LabelMap& gt : ground_truths) {
    report.asa += asa(labels, gt);
    report.br += boundary_recall(labels, gt, eps);
  }
  report.asa /= double(ground_truths.size());
  report.br /= double(ground_truths.size());
  report.cd = contour_density(labels);
  report.src = src(labels);
  if (coarser) report.nestedness = nestedness(labels, *coarser);
  return report;
}

std::string MetricsReport::to_json() const {
  nlohmann::json doc{{"k", k},   {"asa", asa}, {"br", br},
                     {"cd", cd}, {"src", src}, {"eps", eps},
                     {"ground_truths", ground_truths}};
  doc["nestedness"] = nestedness ? nlohmann::json(*nestedness) : nlohmann::json();
  return doc.dump();
}

RgbImage render_overlay(const RgbImage& image, const LabelMap& labels,
                        std::array<std::uint8_t, 3> color) {
  if (image.width != labels.width() || image.height != labels.height()) {
    throw Error(ErrorCode::dimension_mismatch, "overlay labels do not match the image");
  }
  RgbImage out = image;
  const BoundaryMask mask = boundary_mask(labels);
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (!mask.bits[i]) continue;
    std::copy(color.begin(), color.end(), out.data.begin() + std::ptrdiff_t(3 * i));
  }
  return out;
}

}  // namespace hspam
