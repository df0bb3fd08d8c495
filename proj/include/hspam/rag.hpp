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

#ifndef HSPAM_RAG_HPP
#define HSPAM_RAG_HPP

#include <vector>

#include "hspam/types.hpp"

namespace hspam {

enum class AttentionMode { off, superpixel, object };

struct RegionStats {
  std::vector<double> mu;  // count * channels, region-major
  std::vector<std::int64_t> size;
  int channels = 0;
};

struct RegionRecord {
  RegionId id = 0;
  std::vector<double> mu;
  std::int64_t size = 0;
  int object = 0;
  double attention = 0.0;
  bool alive = true;
};

struct Edge {
  RegionId u = 0;  // u < v
  RegionId v = 0;
  bool same_object = false;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Object-annotated region adjacency graph. Node ids are dense; merging
/// appends a new node with the next id and retires both operands, so ids are
/// never reused.
class RegionGraph {
 public:
  RegionGraph() = default;
  RegionGraph(int channels, std::vector<RegionRecord> regions,
              const std::vector<Edge>& edges);

  int channels() const { return channels_; }
  /// Number of node ids ever allocated (alive or not).
  int node_count() const { return int(regions_.size()); }
  int alive_count() const { return alive_; }

  const RegionRecord& region(RegionId id) const { return regions_[id]; }
  bool alive(RegionId id) const {
    return id >= 0 && id < node_count() && regions_[id].alive;
  }
  /// Sorted ascending.
  const std::vector<RegionId>& neighbors(RegionId id) const {
    return adjacency_[id];
  }
  bool adjacent(RegionId u, RegionId v) const;

  /// Alive edges with u < v, sorted.
  std::vector<Edge> edges() const;

  /// Merges two adjacent alive regions into a new node and returns its id.
  /// Features and attention combine by size-weighted mean; the object id
  /// follows the larger operand (u on ties).
  RegionId merge(RegionId u, RegionId v);

 private:
  int channels_ = 0;
  int alive_ = 0;
  std::vector<RegionRecord> regions_;
  std::vector<std::vector<RegionId>> adjacency_;
};

RegionStats region_stats(const LabelMap& labels, const FeatureField& features);

/// Plurality object per region; ties go to the smaller object id.
std::vector<int> assign_objects(const LabelMap& labels, const LabelMap& objects);

/// Superpixel mode: mean attention over the region. Object mode: mean over
/// every pixel of the region's assigned object. Off: zeros.
std::vector<double> region_attention(const LabelMap& labels,
                                     const LabelMap& objects,
                                     const AttentionMap& att,
                                     AttentionMode mode);

/// 4-connected region adjacency, u < v, sorted, no duplicates.
std::vector<std::pair<RegionId, RegionId>> adjacent_pairs(const LabelMap& labels);

/// `att` may be null; attention is then zero everywhere.
RegionGraph build_rag(const LabelMap& labels, const LabelMap& objects,
                      const FeatureField& features, const AttentionMap* att,
                      AttentionMode mode);

}  // namespace hspam

#endif  // HSPAM_RAG_HPP
