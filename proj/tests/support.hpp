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

// Test-only helpers: random instance generators and a naive agglomeration
// oracle that re-derives every quantity from pixels at each step.

#ifndef HSPAM_TESTS_SUPPORT_HPP
#define HSPAM_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hspam/hierarchy.hpp"
#include "hspam/metrics.hpp"
#include "hspam/partition_io.hpp"
#include "hspam/rag.hpp"

namespace hspam::testing {

/// Nearest-seed (Voronoi) partition with `seeds` sites, compacted.
inline LabelMap random_voronoi(int width, int height, int seeds, std::mt19937& rng) {
  std::uniform_int_distribution<int> ux(0, width - 1), uy(0, height - 1);
  std::vector<std::pair<int, int>> sites(seeds);
  for (auto& s : sites) s = {ux(rng), uy(rng)};
  std::vector<RegionId> labels(std::size_t(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      int best = 0;
      long best_d = std::numeric_limits<long>::max();
      for (int i = 0; i < seeds; ++i) {
        const long dx = x - sites[i].first, dy = y - sites[i].second;
        const long d = dx * dx + dy * dy;
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      labels[std::size_t(y) * width + x] = best;
    }
  }
  return LabelMap::compact(width, height, std::move(labels));
}

/// Arbitrary label map with up to `max_labels` values (regions may be
/// disconnected).
inline LabelMap random_labels(int width, int height, int max_labels, std::mt19937& rng) {
  std::uniform_int_distribution<int> ul(0, max_labels - 1);
  std::vector<RegionId> labels(std::size_t(width) * height);
  for (auto& l : labels) l = ul(rng);
  return LabelMap::compact(width, height, std::move(labels));
}

/// Color + position channels plus `deep` random channels. Position channels
/// hold the true normalised coordinates.
inline FeatureField random_features(int width, int height, int deep, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FeaturePlanes lab{width, height, {}};
  FeaturePlanes extra{width, height, {}};
  const std::size_t n = std::size_t(width) * height;
  for (int c = 0; c < 3; ++c) {
    lab.planes.emplace_back(n);
    for (auto& v : lab.planes.back()) v = u(rng);
  }
  for (int c = 0; c < deep; ++c) {
    extra.planes.emplace_back(n);
    for (auto& v : extra.planes.back()) v = u(rng);
  }
  const FeaturePlanes pos = position_planes(width, height);
  return deep > 0 ? assemble_features(lab, pos, &extra) : assemble_features(lab, pos);
}

/// Rounds colour and deep channels to {0, 0.5, 1} so many pair costs tie.
inline void quantize_appearance(FeatureField& f) {
  for (std::size_t i = 0; i < f.pixel_count(); ++i) {
    for (int c = 0; c < f.channels; ++c) {
      if (c == FeatureField::kFirstPositionChannel || c == FeatureField::kFirstPositionChannel + 1) continue;
      double& v = f.data[i * f.channels + c];
      v = std::round(v * 2.0) / 2.0;
    }
  }
}

inline AttentionMap random_attention(int width, int height, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AttentionMap att(width, height);
  for (auto& v : att.values) v = u(rng);
  return att;
}

/// True when every label forms a single 4-connected component.
inline bool regions_connected(const LabelMap& labels) {
  const int w = labels.width(), h = labels.height();
  std::vector<char> seen(labels.pixel_count(), 0);
  std::vector<char> label_seen(labels.count(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < labels.pixel_count(); ++start) {
    if (seen[start]) continue;
    const RegionId l = labels[start];
    if (label_seen[l]) return false;
    label_seen[l] = 1;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const int x = int(i % w), y = int(i / w);
      const std::pair<int, int> next[] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& [nx, ny] : next) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t j = std::size_t(ny) * w + nx;
        if (!seen[j] && labels[j] == l) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return true;
}

/// Number of connected components of the same-object adjacency subgraph.
inline int same_object_components(const LabelMap& fine, const LabelMap& objects) {
  const std::vector<int> theta = assign_objects(fine, objects);
  std::vector<int> parent(fine.count());
  for (int i = 0; i < fine.count(); ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = fine.count();
  for (const auto& [u, v] : adjacent_pairs(fine)) {
    if (theta[u] != theta[v]) continue;
    const int a = find(u), b = find(v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

/// Exhaustive reference engine: every step rescans all pixel pairs for
/// adjacency, recomputes each region's mean from its pixels and evaluates
/// every candidate cost from scratch.
class NaiveAgglomeration {
 public:
  NaiveAgglomeration(const LabelMap& fine, const LabelMap& objects,
                     const FeatureField& features, const AttentionMap* att,
                     const HierarchyParams& params)
      : fine_(fine), features_(features), params_(params) {
    n_f_ = fine.count();
    owner_.resize(n_f_);
    for (int i = 0; i < n_f_; ++i) owner_[i] = i;

    // Plurality object per fine region, smaller id on ties.
    std::vector<std::map<int, long>> votes(n_f_);
    for (std::size_t i = 0; i < fine.pixel_count(); ++i) ++votes[fine[i]][objects[i]];
    std::vector<double> object_att_sum(objects.count(), 0.0);
    std::vector<long> object_px(objects.count(), 0);
    std::vector<double> region_att_sum(n_f_, 0.0);
    std::vector<long> region_px(n_f_, 0);
    for (std::size_t i = 0; i < fine.pixel_count(); ++i) {
      const double a = att ? att->values[i] : 0.0;
      object_att_sum[objects[i]] += a;
      ++object_px[objects[i]];
      region_att_sum[fine[i]] += a;
      ++region_px[fine[i]];
    }
    for (int r = 0; r < n_f_; ++r) {
      Node node;
      long best = -1;
      for (const auto& [obj, n] : votes[r]) {
        if (n > best) {
          best = n;
          node.object = obj;
        }
      }
      node.size = region_px[r];
      if (att && params.attention_mode == AttentionMode::superpixel) {
        node.attention = region_att_sum[r] / double(region_px[r]);
      } else if (att && params.attention_mode == AttentionMode::object) {
        node.attention = object_att_sum[node.object] / double(object_px[node.object]);
      }
      nodes_.push_back(node);
    }
  }

  MergeSequence run() {
    MergeSequence seq;
    seq.n_f = n_f_;
    seq.params = params_;
    seq.params.n_f = n_f_;
    int phase = 1;
    int alive = n_f_;
    while (alive > 1) {
      const auto pairs = adjacent_nodes();
      if (phase == 1 && std::none_of(pairs.begin(), pairs.end(), [&](const auto& p) {
            return nodes_[p.first].object == nodes_[p.second].object;
          })) {
        phase = 2;
      }
      std::optional<std::tuple<double, int, int>> best;
      for (const auto& [u, v] : pairs) {
        if (phase == 1 && nodes_[u].object != nodes_[v].object) continue;
        const double c = cost(u, v, phase, alive);
        const std::tuple<double, int, int> cand{c, u, v};
        if (!best || cand < *best) best = cand;
      }
      if (!best) throw std::runtime_error("oracle: no adjacent pair");
      const auto [c, u, v] = *best;
      const int w = int(nodes_.size());
      Node merged;
      merged.size = nodes_[u].size + nodes_[v].size;
      merged.object = nodes_[u].size >= nodes_[v].size ? nodes_[u].object : nodes_[v].object;
      merged.attention = (double(nodes_[u].size) * nodes_[u].attention +
                          double(nodes_[v].size) * nodes_[v].attention) /
                         double(merged.size);
      nodes_[u].alive = nodes_[v].alive = false;
      nodes_.push_back(merged);
      for (int& o : owner_) {
        if (o == u || o == v) o = w;
      }
      --alive;
      seq.records.push_back({u, v, w, c, phase, alive});
    }
    return seq;
  }

 private:
  struct Node {
    long size = 0;
    int object = 0;
    double attention = 0.0;
    bool alive = true;
  };

  std::set<std::pair<int, int>> adjacent_nodes() const {
    std::set<std::pair<int, int>> pairs;
    for (int y = 0; y < fine_.height(); ++y) {
      for (int x = 0; x < fine_.width(); ++x) {
        const int a = owner_[fine_(x, y)];
        if (x + 1 < fine_.width()) {
          const int b = owner_[fine_(x + 1, y)];
          if (a != b) pairs.insert({std::min(a, b), std::max(a, b)});
        }
        if (y + 1 < fine_.height()) {
          const int b = owner_[fine_(x, y + 1)];
          if (a != b) pairs.insert({std::min(a, b), std::max(a, b)});
        }
      }
    }
    return pairs;
  }

  std::vector<double> pixel_mean(int node) const {
    std::vector<double> sum(features_.channels, 0.0);
    long n = 0;
    for (std::size_t i = 0; i < fine_.pixel_count(); ++i) {
      if (owner_[fine_[i]] != node) continue;
      ++n;
      for (int c = 0; c < features_.channels; ++c) sum[c] += features_.data[i * features_.channels + c];
    }
    for (double& s : sum) s /= double(n);
    return sum;
  }

  double cost(int u, int v, int phase, int alive) const {
    const auto mu = pixel_mean(u), mv = pixel_mean(v);
    double appearance = 0.0, spatial = 0.0;
    for (int c = 0; c < features_.channels; ++c) {
      const double d = (mu[c] - mv[c]) * (mu[c] - mv[c]);
      (c == 3 || c == 4 ? spatial : appearance) += d;
    }
    double total;
    if (phase == 1) {
      total = appearance + params_.w_pos * std::sqrt(double(alive) / n_f_) * spatial;
    } else {
      const double su = double(nodes_[u].size), sv = double(nodes_[v].size);
      total = su * sv / (su + sv) * appearance;
    }
    const bool with_attention = params_.attention_mode != AttentionMode::off &&
                                (phase == 1 ? params_.attention_in_phase1
                                            : params_.attention_in_phase2);
    if (with_attention) {
      total += params_.w_att * std::max(nodes_[u].attention, nodes_[v].attention);
    }
    return total;
  }

  const LabelMap& fine_;
  const FeatureField& features_;
  HierarchyParams params_;
  int n_f_ = 0;
  std::vector<int> owner_;
  std::vector<Node> nodes_;
};

/// Records compare equal on ids and phase; costs within a relative tolerance
/// (the oracle derives means from pixels, the engine from merged moments).
inline bool same_sequence(const MergeSequence& a, const MergeSequence& b,
                          std::string* why = nullptr) {
  if (a.n_f != b.n_f || a.records.size() != b.records.size()) {
    if (why) *why = "length mismatch";
    return false;
  }
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    const double tol = 1e-9 * std::max(1.0, std::abs(y.cost));
    if (x.u != y.u || x.v != y.v || x.w != y.w || x.phase != y.phase ||
        x.level_after != y.level_after || std::abs(x.cost - y.cost) > tol) {
      if (why) {
        *why = "record " + std::to_string(i) + ": (" + std::to_string(x.u) + "," +
               std::to_string(x.v) + ",p" + std::to_string(x.phase) + ",c=" +
               std::to_string(x.cost) + ") vs (" + std::to_string(y.u) + "," +
               std::to_string(y.v) + ",p" + std::to_string(y.phase) + ",c=" +
               std::to_string(y.cost) + ")";
      }
      return false;
    }
  }
  return true;
}

/// Region count of `labels` restricted to pixels where `mask(i)` holds.
template <typename Mask>
int regions_within(const LabelMap& labels, Mask mask) {
  std::set<RegionId> seen;
  for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
    if (mask(i)) seen.insert(labels[i]);
  }
  return int(seen.size());
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hspam_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace hspam::testing

#endif  // HSPAM_TESTS_SUPPORT_HPP
