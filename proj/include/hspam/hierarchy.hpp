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

#ifndef HSPAM_HIERARCHY_HPP
#define HSPAM_HIERARCHY_HPP

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "hspam/rag.hpp"

namespace hspam {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

struct HierarchyParams {
  double w_pos = 5.0;
  double w_att = 0.0;
  /// 0 means "use the graph's alive region count".
  int n_f = 0;
  AttentionMode attention_mode = AttentionMode::off;
  bool attention_in_phase1 = true;
  bool attention_in_phase2 = true;
};

struct MergeRecord {
  RegionId u = 0;
  RegionId v = 0;
  RegionId w = 0;
  double cost = 0.0;
  int phase = 1;
  int level_after = 0;

  friend bool operator==(const MergeRecord&, const MergeRecord&) = default;
};

struct MergeSequence {
  int n_f = 0;
  HierarchyParams params;
  std::vector<MergeRecord> records;

  int phase1_count() const;

  /// Throws Error(format) unless the records form one binary merge tree over
  /// [0, n_f) with w = n_f + index.
  void validate() const;

  /// Costs are written with 17 significant digits.
  std::string to_json() const;
  static MergeSequence from_json(std::string_view json);
};

std::string_view to_string(AttentionMode mode);
AttentionMode attention_mode_from_string(std::string_view s);

/// w_pos * sqrt(s / n_f).
double spatial_weight(int s, int n_f, double w_pos);

/// w_att * max(a_u, a_v).
double attention_term(double a_u, double a_v, double w_att);

/// Squared feature distance split into appearance (color + deep channels)
/// and spatial (position channels) parts.
struct CostParts {
  double appearance = 0.0;
  double spatial = 0.0;
};
CostParts cost_parts(const RegionRecord& u, const RegionRecord& v);

/// Intra-object cost at current region count s; infinite across objects.
double phase1_cost(const RegionRecord& u, const RegionRecord& v, int s,
                   int n_f, const HierarchyParams& params);

/// Size-weighted (Ward-style) appearance cost; position channels excluded.
double phase2_cost(const RegionRecord& u, const RegionRecord& v,
                   const HierarchyParams& params);

/// Merges `graph` down to a single region. Phase 1 only joins same-object
/// neighbours and ends once no such pair remains; phase 2 joins the rest.
/// Minimum cost wins; ties break on (min id, max id).
MergeSequence build_hierarchy(RegionGraph graph, const HierarchyParams& params);

/// Node id owning each fine region after the first `merges` records.
std::vector<RegionId> replay(const MergeSequence& seq, int merges);

/// Partition with exactly k regions, labelled by first pixel occurrence.
LabelMap extract_partition(const MergeSequence& seq, const LabelMap& fine, int k);

}  // namespace hspam

#endif  // HSPAM_HIERARCHY_HPP
