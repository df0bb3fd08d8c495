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

#include "hspam/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include "json.hpp"
#include <optional>
#include <queue>

namespace hspam {
namespace {

bool attention_enabled(const HierarchyParams& params, int phase) {
  if (params.attention_mode == AttentionMode::off) return false;
  return phase == 1 ? params.attention_in_phase1 : params.attention_in_phase2;
}

struct QueueEntry {
  double key = 0.0;
  RegionId lo = 0;
  RegionId hi = 0;
};

// Strict (key, lo, hi) lexicographic order.
bool precedes(double ka, RegionId loa, RegionId hia, double kb, RegionId lob,
              RegionId hib) {
  if (ka != kb) return ka < kb;
  if (loa != lob) return loa < lob;
  return hia < hib;
}

struct LaterFirst {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    return precedes(b.key, b.lo, b.hi, a.key, a.lo, a.hi);
  }
};

void check_connected(const RegionGraph& graph) {
  RegionId start = -1;
  for (RegionId r = 0; r < graph.node_count(); ++r) {
    if (graph.alive(r)) {
      start = r;
      break;
    }
  }
  if (start < 0) throw Error(ErrorCode::invalid_argument, "graph has no regions");
  std::vector<std::uint8_t> seen(graph.node_count(), 0);
  std::vector<RegionId> stack{start};
  seen[start] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const RegionId u = stack.back();
    stack.pop_back();
    for (RegionId v : graph.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  if (reached != graph.alive_count()) {
    throw Error(ErrorCode::disconnected,
                "region adjacency graph is disconnected (" +
                    std::to_string(reached) + " of " +
                    std::to_string(graph.alive_count()) + " regions reachable)");
  }
}

// Phase-1 costs shrink as the region count s drops (the spatial weight is
// w_pos * sqrt(s / n_f)), so a cost frozen at insertion time is an upper
// bound and cannot order a heap. Queue keys instead use the weight at an
// epoch floor s_floor <= s, which bounds every true cost from below until s
// falls under the floor; the heap is then rebuilt. Selection pops every key
// not above the best true cost seen so far, which yields exactly the global
// (cost, lo, hi) minimum.
class MergeEngine {
 public:
  MergeEngine(RegionGraph graph, const HierarchyParams& params)
      : graph_(std::move(graph)), params_(params) {
    n_f_ = graph_.alive_count();
    seq_.n_f = n_f_;
    seq_.params = params_;
    seq_.params.n_f = n_f_;
    seq_.records.reserve(std::size_t(std::max(0, n_f_ - 1)));
  }

  MergeSequence run() {
    rebuild();
    while (graph_.alive_count() > 1) {
      if (phase_ == 1 && graph_.alive_count() < floor_s_) rebuild();
      std::optional<QueueEntry> best = select();
      if (!best) {
        if (phase_ == 1) {
          phase_ = 2;
          rebuild();
          continue;
        }
        throw Error(ErrorCode::disconnected, "no mergeable pair left");
      }
      const RegionId w = graph_.merge(best->lo, best->hi);
      MergeRecord rec;
      rec.u = best->lo;
      rec.v = best->hi;
      rec.w = w;
      rec.cost = best->key;
      rec.phase = phase_;
      rec.level_after = graph_.alive_count();
      seq_.records.push_back(rec);
      for (RegionId x : graph_.neighbors(w)) push(x, w);
    }
    return std::move(seq_);
  }

 private:
  bool eligible(RegionId u, RegionId v) const {
    return phase_ == 2 || graph_.region(u).object == graph_.region(v).object;
  }

  double true_cost(RegionId u, RegionId v) const {
    if (phase_ == 1) {
      return phase1_cost(graph_.region(u), graph_.region(v),
                         graph_.alive_count(), n_f_, params_);
    }
    return phase2_cost(graph_.region(u), graph_.region(v), params_);
  }

  double key(RegionId u, RegionId v) const {
    if (phase_ == 2) return true_cost(u, v);
    const RegionRecord& a = graph_.region(u);
    const RegionRecord& b = graph_.region(v);
    const CostParts parts = cost_parts(a, b);
    double k = parts.appearance + floor_weight_ * parts.spatial;
    if (attention_enabled(params_, 1)) {
      k += attention_term(a.attention, b.attention, params_.w_att);
    }
    return k;
  }

  void push(RegionId u, RegionId v) {
    if (!eligible(u, v)) return;
    const RegionId lo = std::min(u, v), hi = std::max(u, v);
    heap_.push({key(lo, hi), lo, hi});
  }

  void rebuild() {
    if (phase_ == 1) {
      const int s = graph_.alive_count();
      floor_s_ = std::max(1, s - std::max(1, s / 32));
      floor_weight_ = spatial_weight(floor_s_, n_f_, params_.w_pos);
    }
    std::vector<QueueEntry> entries;
    for (const Edge& e : graph_.edges()) {
      if (eligible(e.u, e.v)) entries.push_back({key(e.u, e.v), e.u, e.v});
    }
    heap_ = decltype(heap_)(LaterFirst{}, std::move(entries));
  }

  std::optional<QueueEntry> select() {
    std::optional<QueueEntry> best;  // key holds the true cost
    deferred_.clear();
    while (!heap_.empty()) {
      const QueueEntry top = heap_.top();
      if (!graph_.alive(top.lo) || !graph_.alive(top.hi)) {
        heap_.pop();
        continue;
      }
      if (best && top.key > best->key) break;
      heap_.pop();
      const QueueEntry candidate{true_cost(top.lo, top.hi), top.lo, top.hi};
      if (!best || precedes(candidate.key, candidate.lo, candidate.hi,
                            best->key, best->lo, best->hi)) {
        if (best) deferred_.push_back(*best);
        best = candidate;
      } else {
        deferred_.push_back(top);
      }
    }
    // Deferred entries go back with a key that is still a valid lower bound.
    for (QueueEntry e : deferred_) {
      e.key = key(e.lo, e.hi);
      heap_.push(e);
    }
    return best;
  }

  RegionGraph graph_;
  HierarchyParams params_;
  int n_f_ = 0;
  int phase_ = 1;
  int floor_s_ = 0;
  double floor_weight_ = 0.0;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, LaterFirst> heap_;
  std::vector<QueueEntry> deferred_;
  MergeSequence seq_;
};

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string_view to_string(AttentionMode mode) {
  switch (mode) {
    case AttentionMode::off: return "off";
    case AttentionMode::superpixel: return "superpixel";
    case AttentionMode::object: return "object";
  }
  return "off";
}

AttentionMode attention_mode_from_string(std::string_view s) {
  if (s == "off") return AttentionMode::off;
  if (s == "superpixel") return AttentionMode::superpixel;
  if (s == "object") return AttentionMode::object;
  throw Error(ErrorCode::invalid_argument,
              "unknown attention mode '" + std::string(s) + "'");
}

double spatial_weight(int s, int n_f, double w_pos) {
  if (n_f < 1 || s < 1 || s > n_f) {
    throw Error(ErrorCode::out_of_range,
                "region count " + std::to_string(s) + " outside [1, " +
                    std::to_string(n_f) + "]");
  }
  return w_pos * std::sqrt(double(s) / double(n_f));
}

double attention_term(double a_u, double a_v, double w_att) {
  return w_att * std::max(a_u, a_v);
}

CostParts cost_parts(const RegionRecord& u, const RegionRecord& v) {
  CostParts parts;
  const std::size_t d = u.mu.size();
  for (std::size_t c = 0; c < d; ++c) {
    const double diff = u.mu[c] - v.mu[c];
    if (c == FeatureField::kFirstPositionChannel ||
        c == FeatureField::kFirstPositionChannel + 1) {
      parts.spatial += diff * diff;
    } else {
      parts.appearance += diff * diff;
    }
  }
  return parts;
}

double phase1_cost(const RegionRecord& u, const RegionRecord& v, int s, int n_f,
                   const HierarchyParams& params) {
  if (u.object != v.object) return kInfiniteCost;
  const CostParts parts = cost_parts(u, v);
  double cost = parts.appearance + spatial_weight(s, n_f, params.w_pos) * parts.spatial;
  if (attention_enabled(params, 1)) {
    cost += attention_term(u.attention, v.attention, params.w_att);
  }
  return cost;
}

double phase2_cost(const RegionRecord& u, const RegionRecord& v,
                   const HierarchyParams& params) {
  const double su = double(u.size), sv = double(v.size);
  double cost = (su * sv / (su + sv)) * cost_parts(u, v).appearance;
  if (attention_enabled(params, 2)) {
    cost += attention_term(u.attention, v.attention, params.w_att);
  }
  return cost;
}

MergeSequence build_hierarchy(RegionGraph graph, const HierarchyParams& params) {
  if (!(params.w_pos >= 0.0) || !(params.w_att >= 0.0) ||
      !std::isfinite(params.w_pos) || !std::isfinite(params.w_att)) {
    throw Error(ErrorCode::invalid_argument,
                "w_pos and w_att must be finite and non-negative");
  }
  if (params.n_f != 0 && params.n_f != graph.alive_count()) {
    throw Error(ErrorCode::invalid_argument,
                "n_f does not match the graph's region count");
  }
  check_connected(graph);
  return MergeEngine(std::move(graph), params).run();
}

int MergeSequence::phase1_count() const {
  return int(std::count_if(records.begin(), records.end(),
                           [](const MergeRecord& r) { return r.phase == 1; }));
}

void MergeSequence::validate() const {
  auto fail = [](const std::string& why) {
    throw Error(ErrorCode::format, "invalid merge sequence: " + why);
  };
  if (n_f < 1) fail("n_f must be >= 1");
  if (int(records.size()) != n_f - 1) {
    fail("expected " + std::to_string(n_f - 1) + " merges, got " +
         std::to_string(records.size()));
  }
  std::vector<std::uint8_t> consumed(std::size_t(2 * n_f), 0);
  bool seen_phase2 = false;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const MergeRecord& r = records[i];
    const RegionId w = RegionId(n_f + i);
    if (r.w != w) fail("merge " + std::to_string(i) + " must create id " + std::to_string(w));
    if (r.u == r.v || r.u < 0 || r.v < 0 || r.u >= w || r.v >= w) {
      fail("merge " + std::to_string(i) + " has invalid operands");
    }
    if (consumed[r.u] || consumed[r.v]) {
      fail("merge " + std::to_string(i) + " reuses a merged region");
    }
    consumed[r.u] = consumed[r.v] = 1;
    if (r.phase != 1 && r.phase != 2) fail("phase must be 1 or 2");
    if (r.phase == 2) seen_phase2 = true;
    if (r.phase == 1 && seen_phase2) fail("phase-1 merge after phase 2");
  }
}

std::string MergeSequence::to_json() const {
  std::string out = "{\n  \"n_f\": " + std::to_string(n_f) + ",\n  \"params\": {";
  out += "\"w_pos\": ";
  append_double(out, params.w_pos);
  out += ", \"w_att\": ";
  append_double(out, params.w_att);
  out += ", \"attention_mode\": \"" + std::string(to_string(params.attention_mode)) + "\"";
  out += ", \"attention_in_phase1\": ";
  out += params.attention_in_phase1 ? "true" : "false";
  out += ", \"attention_in_phase2\": ";
  out += params.attention_in_phase2 ? "true" : "false";
  out += "},\n  \"merges\": [";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const MergeRecord& r = records[i];
    out += i == 0 ? "\n    " : ",\n    ";
    out += "{\"u\": " + std::to_string(r.u) + ", \"v\": " + std::to_string(r.v) +
           ", \"w\": " + std::to_string(r.w) + ", \"cost\": ";
    append_double(out, r.cost);
    out += ", \"phase\": " + std::to_string(r.phase) + "}";
  }
  out += records.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

MergeSequence MergeSequence::from_json(std::string_view json) {
  MergeSequence seq;
  try {
    const auto doc = nlohmann::json::parse(json);
    seq.n_f = doc.at("n_f").get<int>();
    if (doc.contains("params")) {
      const auto& p = doc["params"];
      seq.params.w_pos = p.value("w_pos", seq.params.w_pos);
      seq.params.w_att = p.value("w_att", seq.params.w_att);
      seq.params.attention_mode =
          attention_mode_from_string(p.value("attention_mode", std::string("off")));
      seq.params.attention_in_phase1 = p.value("attention_in_phase1", true);
      seq.params.attention_in_phase2 = p.value("attention_in_phase2", true);
    }
    seq.params.n_f = seq.n_f;
    int alive = seq.n_f;
    for (const auto& m : doc.at("merges")) {
      MergeRecord r;
      r.u = m.at("u").get<RegionId>();
      r.v = m.at("v").get<RegionId>();
      r.w = m.at("w").get<RegionId>();
      r.cost = m.at("cost").get<double>();
      r.phase = m.at("phase").get<int>();
      r.level_after = --alive;
      seq.records.push_back(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format, std::string("merge sequence JSON: ") + e.what());
  }
  seq.validate();
  return seq;
}

std::vector<RegionId> replay(const MergeSequence& seq, int merges) {
  if (merges < 0 || merges > int(seq.records.size())) {
    throw Error(ErrorCode::out_of_range, "merge prefix out of range");
  }
  const int nodes = seq.n_f + merges;
  std::vector<RegionId> parent(nodes);
  for (RegionId i = 0; i < nodes; ++i) parent[i] = i;
  for (int i = 0; i < merges; ++i) {
    const MergeRecord& r = seq.records[i];
    parent[r.u] = r.w;
    parent[r.v] = r.w;
  }
  auto find = [&](RegionId x) {
    RegionId root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) {
      const RegionId next = parent[x];
      parent[x] = root;
      x = next;
    }
    return root;
  };
  std::vector<RegionId> owner(seq.n_f);
  for (RegionId i = 0; i < seq.n_f; ++i) owner[i] = find(i);
  return owner;
}

LabelMap extract_partition(const MergeSequence& seq, const LabelMap& fine, int k) {
  if (fine.count() != seq.n_f) {
    throw Error(ErrorCode::invalid_argument,
                "fine partition has " + std::to_string(fine.count()) +
                    " regions but the sequence expects " + std::to_string(seq.n_f));
  }
  if (k < 1 || k > seq.n_f) {
    throw Error(ErrorCode::out_of_range,
                "K = " + std::to_string(k) + " outside [1, " +
                    std::to_string(seq.n_f) + "]");
  }
  const std::vector<RegionId> owner = replay(seq, seq.n_f - k);
  std::vector<RegionId> labels(fine.pixel_count());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = owner[fine[i]];
  return LabelMap::relabel_by_occurrence(fine.width(), fine.height(), labels);
}

}  // namespace hspam
