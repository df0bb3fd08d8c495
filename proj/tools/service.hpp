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

#ifndef HSPAM_TOOLS_SERVICE_HPP
#define HSPAM_TOOLS_SERVICE_HPP

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "handles.hpp"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace hspam_tools {

/// Everything needed to build a hierarchy for one image. Empty strings mean
/// "not supplied".
struct PipelineInputs {
  std::string image;
  std::string fine;
  int init_grid = 0;
  std::string objects;
  std::string features;
  std::string attention;
  std::string clicks;
  hspam_params params = hspam_params_default();
  /// Unset picks object mode when an attention source exists, off otherwise.
  std::optional<hspam_attention_mode> attention_mode;
};

/// Loaded, validated inputs shared by `build` and `serve`.
struct Pipeline {
  Image image;
  Features features;
  Labels fine;
  Labels objects;          // may be null: whole image is one object
  Attention base_attention;  // may be null

  static Pipeline load(const PipelineInputs& in);
  int width() const { return hspam_image_width(image.get()); }
  int height() const { return hspam_image_height(image.get()); }
};

/// Parses a click file (JSON array of {x, y, sign, strength}).
nlohmann::json load_click_file(const std::string& path);

/// Hierarchy built from a pipeline plus an optional click list.
struct BuildResult {
  Sequence seq;
  Attention attention;  // effective attention, null when there is no source
  hspam_params params{};
};

BuildResult build_hierarchy(const Pipeline& pipeline, hspam_params params,
                            const std::optional<hspam_attention_mode>& requested,
                            const nlohmann::json& clicks);

/// Effective attention mode for a build.
hspam_attention_mode resolve_attention_mode(
    const std::optional<hspam_attention_mode>& requested, bool has_attention_source);

/// One interactive session: an image, its fine partition and the current
/// hierarchy. Rebuilds are serialised; readers always see a complete
/// snapshot, so a partition and its generation number never disagree.
class Session {
 public:
  struct Snapshot {
    std::uint64_t generation = 0;
    hspam_params params{};
    std::optional<hspam_attention_mode> requested_mode;
    nlohmann::json clicks = nlohmann::json::array();
    Sequence seq;
    Attention attention;  // effective attention, may be null
  };

  Session(const PipelineInputs& inputs, std::vector<std::string> ground_truths);

  std::shared_ptr<const Snapshot> current() const;

  /// Appends a ClickSet (JSON array) and rebuilds; returns the new generation.
  std::uint64_t add_clicks(const std::string& body);
  /// Updates any of {w_pos, w_att, attention_mode} and rebuilds.
  std::uint64_t update_params(const std::string& body);

  nlohmann::json meta() const;
  std::string image_png() const;
  /// Encoded partition plus the generation it was cut from.
  std::pair<std::string, std::uint64_t> partition_png(int k) const;
  std::pair<std::string, std::uint64_t> overlay_png(int k) const;
  std::string attention_png() const;
  bool has_ground_truth() const { return !ground_truths_.empty(); }
  std::pair<nlohmann::json, std::uint64_t> metrics(int k, int eps) const;

 private:
  std::shared_ptr<const Snapshot> rebuild(hspam_params params,
                                          std::optional<hspam_attention_mode> requested,
                                          nlohmann::json clicks,
                                          std::uint64_t generation) const;
  void publish(std::shared_ptr<const Snapshot> next);

  Pipeline pipeline_;
  std::vector<Labels> ground_truths_;
  mutable std::mutex snapshot_mutex_;
  std::mutex rebuild_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
};

/// Registers the HTTP API on `server`; `static_dir` (may be empty) is served at /.
void mount_api(httplib::Server& server, Session& session, const std::string& static_dir);

nlohmann::json metrics_to_json(const hspam_metrics& m);
nlohmann::json params_to_json(const hspam_params& p);

}  // namespace hspam_tools

#endif  // HSPAM_TOOLS_SERVICE_HPP
