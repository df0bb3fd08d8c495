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

#include "hspam/rag.hpp"

#include <algorithm>
#include <string>

namespace hspam {
namespace {

void require_shape(const LabelMap& a, int width, int height, const char* what) {
  if (a.width() != width || a.height() != height) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + " is " + std::to_string(width) + "x" +
                    std::to_string(height) + ", labels are " +
                    std::to_string(a.width()) + "x" + std::to_string(a.height()));
  }
}

}  // namespace

RegionGraph::RegionGraph(int channels, std::vector<RegionRecord> regions,
                         const std::vector<Edge>& edges)
    : channels_(channels), regions_(std::move(regions)) {
  const int n = node_count();
  adjacency_.resize(n);
  for (int i = 0; i < n; ++i) {
    if (regions_[i].id != i) {
      throw Error(ErrorCode::invalid_argument, "region ids must be dense");
    }
    if (int(regions_[i].mu.size()) != channels_) {
      throw Error(ErrorCode::invalid_argument, "region feature width mismatch");
    }
    if (regions_[i].alive) ++alive_;
  }
  for (const Edge& e : edges) {
    if (e.u == e.v || !alive(e.u) || !alive(e.v)) {
      throw Error(ErrorCode::invalid_argument, "edge must join two alive regions");
    }
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

bool RegionGraph::adjacent(RegionId u, RegionId v) const {
  if (!alive(u) || !alive(v)) return false;
  const auto& list = adjacency_[u];
  return std::binary_search(list.begin(), list.end(), v);
}

std::vector<Edge> RegionGraph::edges() const {
  std::vector<Edge> out;
  for (RegionId u = 0; u < node_count(); ++u) {
    if (!regions_[u].alive) continue;
    for (RegionId v : adjacency_[u]) {
      if (v > u) out.push_back({u, v, regions_[u].object == regions_[v].object});
    }
  }
  return out;
}

RegionId RegionGraph::merge(RegionId u, RegionId v) {
  if (u == v || !alive(u) || !alive(v)) {
    throw Error(ErrorCode::invalid_argument,
                "merge needs two distinct alive regions");
  }
  if (!adjacent(u, v)) {
    throw Error(ErrorCode::invalid_argument,
                "regions " + std::to_string(u) + " and " + std::to_string(v) +
                    " are not adjacent");
  }
  const RegionId w = node_count();
  const RegionRecord& a = regions_[u];
  const RegionRecord& b = regions_[v];
  RegionRecord merged;
  merged.id = w;
  merged.size = a.size + b.size;
  const double sa = double(a.size), sb = double(b.size), st = double(merged.size);
  merged.mu.resize(channels_);
  for (int c = 0; c < channels_; ++c) {
    merged.mu[c] = (sa * a.mu[c] + sb * b.mu[c]) / st;
  }
  merged.attention = (sa * a.attention + sb * b.attention) / st;
  merged.object = a.size >= b.size ? a.object : b.object;

  std::vector<RegionId> neighbours;
  neighbours.reserve(adjacency_[u].size() + adjacency_[v].size());
  std::set_union(adjacency_[u].begin(), adjacency_[u].end(),
                 adjacency_[v].begin(), adjacency_[v].end(),
                 std::back_inserter(neighbours));
  std::erase_if(neighbours, [&](RegionId x) { return x == u || x == v; });

  for (RegionId x : neighbours) {
    auto& list = adjacency_[x];
    std::erase_if(list, [&](RegionId y) { return y == u || y == v; });
    list.push_back(w);  // w is the largest id so far
  }
  regions_[u].alive = false;
  regions_[v].alive = false;
  adjacency_[u].clear();
  adjacency_[v].clear();
  regions_.push_back(std::move(merged));
  adjacency_.push_back(std::move(neighbours));
  --alive_;
  return w;
}

RegionStats region_stats(const LabelMap& labels, const FeatureField& features) {
  require_shape(labels, features.width, features.height, "feature field");
  RegionStats stats;
  stats.channels = features.channels;
  const int d = features.channels;
  stats.mu.assign(std::size_t(labels.count()) * d, 0.0);
  stats.size.assign(labels.count(), 0);
  for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
    const RegionId r = labels[i];
    ++stats.size[r];
    const double* f = features.data.data() + i * d;
    double* acc = stats.mu.data() + std::size_t(r) * d;
    for (int c = 0; c < d; ++c) acc[c] += f[c];
  }
  for (int r = 0; r < labels.count(); ++r) {
    for (int c = 0; c < d; ++c) stats.mu[std::size_t(r) * d + c] /= double(stats.size[r]);
  }
  return stats;
}

std::vector<int> assign_objects(const LabelMap& labels, const LabelMap& objects) {
  require_shape(objects, labels.width(), labels.height(), "object map");
  std::vector<std::vector<std::pair<int, std::int64_t>>> votes(labels.count());
  for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
    auto& tally = votes[labels[i]];
    const int obj = objects[i];
    auto it = std::find_if(tally.begin(), tally.end(),
                           [&](const auto& p) { return p.first == obj; });
    if (it == tally.end()) {
      tally.emplace_back(obj, 1);
    } else {
      ++it->second;
    }
  }
  std::vector<int> theta(labels.count());
  for (int r = 0; r < labels.count(); ++r) {
    int best = -1;
    std::int64_t best_count = -1;
    for (const auto& [obj, n] : votes[r]) {
      if (n > best_count || (n == best_count && obj < best)) {
        best = obj;
        best_count = n;
      }
    }
    theta[r] = best;
  }
  return theta;
}

std::vector<double> region_attention(const LabelMap& labels,
                                     const LabelMap& objects,
                                     const AttentionMap& att,
                                     AttentionMode mode) {
  if (att.width != labels.width() || att.height != labels.height()) {
    throw Error(ErrorCode::dimension_mismatch,
                "attention map does not match the label map");
  }
  require_shape(objects, labels.width(), labels.height(), "object map");
  std::vector<double> out(labels.count(), 0.0);
  if (mode == AttentionMode::off) return out;

  if (mode == AttentionMode::superpixel) {
    std::vector<std::int64_t> size(labels.count(), 0);
    for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
      out[labels[i]] += att.values[i];
      ++size[labels[i]];
    }
    for (int r = 0; r < labels.count(); ++r) out[r] /= double(size[r]);
    return out;
  }

  std::vector<double> object_sum(objects.count(), 0.0);
  std::vector<std::int64_t> object_size(objects.count(), 0);
  for (std::size_t i = 0; i < objects.pixel_count(); ++i) {
    object_sum[objects[i]] += att.values[i];
    ++object_size[objects[i]];
  }
  const std::vector<int> theta = assign_objects(labels, objects);
  for (int r = 0; r < labels.count(); ++r) {
    out[r] = object_sum[theta[r]] / double(object_size[theta[r]]);
  }
  return out;
}

std::vector<std::pair<RegionId, RegionId>> adjacent_pairs(const LabelMap& labels) {
  std::vector<std::pair<RegionId, RegionId>> pairs;
  const int w = labels.width(), h = labels.height();
  auto add = [&](RegionId a, RegionId b) {
    if (a != b) pairs.emplace_back(std::min(a, b), std::max(a, b));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const RegionId l = labels(x, y);
      if (x + 1 < w) add(l, labels(x + 1, y));
      if (y + 1 < h) add(l, labels(x, y + 1));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

RegionGraph build_rag(const LabelMap& labels, const LabelMap& objects,
                      const FeatureField& features, const AttentionMap* att,
                      AttentionMode mode) {
  const RegionStats stats = region_stats(labels, features);
  const std::vector<int> theta = assign_objects(labels, objects);
  std::vector<double> attention(labels.count(), 0.0);
  if (att && mode != AttentionMode::off) {
    attention = region_attention(labels, objects, *att, mode);
  }

  std::vector<RegionRecord> regions(labels.count());
  const int d = features.channels;
  for (int r = 0; r < labels.count(); ++r) {
    RegionRecord& rec = regions[r];
    rec.id = r;
    rec.mu.assign(stats.mu.begin() + std::ptrdiff_t(r) * d,
                  stats.mu.begin() + std::ptrdiff_t(r + 1) * d);
    rec.size = stats.size[r];
    rec.object = theta[r];
    rec.attention = attention[r];
  }
  std::vector<Edge> edges;
  for (const auto& [u, v] : adjacent_pairs(labels)) {
    edges.push_back({u, v, theta[u] == theta[v]});
  }
  return RegionGraph(d, std::move(regions), edges);
}

}  // namespace hspam
