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

#include "service.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "httplib.h"

namespace hspam_tools {
namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(HSPAM_ERR_IO, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void require_shape(const hspam_labels* labels, int width, int height,
                   const std::string& what) {
  if (hspam_labels_width(labels) != width || hspam_labels_height(labels) != height) {
    throw Failure(HSPAM_ERR_DIMENSION_MISMATCH,
                  what + " is " + std::to_string(hspam_labels_width(labels)) + "x" +
                      std::to_string(hspam_labels_height(labels)) + ", image is " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
}

class HttpError : public std::runtime_error {
 public:
  HttpError(int status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

int parse_int_param(const httplib::Request& req, const char* name,
                    std::optional<int> fallback = std::nullopt) {
  if (!req.has_param(name)) {
    if (fallback) return *fallback;
    throw HttpError(400, std::string("missing query parameter '") + name + "'");
  }
  const std::string text = req.get_param_value(name);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw HttpError(400, std::string("query parameter '") + name + "' must be an integer");
  }
  return value;
}

int http_status_for(hspam_status status) {
  switch (status) {
    case HSPAM_ERR_INVALID_ARGUMENT:
    case HSPAM_ERR_FORMAT:
    case HSPAM_ERR_DIMENSION_MISMATCH:
    case HSPAM_ERR_OUT_OF_RANGE:
      return 400;
    default:
      return 500;
  }
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(nlohmann::json{{"error", message}}.dump(), "application/json");
}

template <typename Handler>
httplib::Server::Handler wrap(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const HttpError& e) {
      send_error(res, e.status(), e.what());
    } catch (const Failure& e) {
      send_error(res, http_status_for(e.status()), e.what());
    } catch (const nlohmann::json::exception& e) {
      send_error(res, 400, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

void set_generation(httplib::Response& res, std::uint64_t generation) {
  res.set_header("X-Hspam-Generation", std::to_string(generation));
}

constexpr const char* kFallbackIndex = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>hspam</title></head>
<body><h1>hspam service</h1>
<p>API: <code>/api/meta</code>, <code>/api/image</code>, <code>/api/partition?k=K</code>,
<code>/api/overlay?k=K</code>, <code>/api/attention</code>, <code>/api/metrics?k=K</code>,
<code>POST /api/clicks</code>, <code>POST /api/params</code>.</p>
<p>Start with <code>--static-dir</code> to serve the interactive client.</p>
</body></html>
)";

}  // namespace

const char* attention_mode_name(hspam_attention_mode mode) {
  switch (mode) {
    case HSPAM_ATTENTION_SUPERPIXEL: return "superpixel";
    case HSPAM_ATTENTION_OBJECT: return "object";
    case HSPAM_ATTENTION_OFF: break;
  }
  return "off";
}

hspam_attention_mode attention_mode_from_name(const std::string& name) {
  if (name == "off") return HSPAM_ATTENTION_OFF;
  if (name == "superpixel") return HSPAM_ATTENTION_SUPERPIXEL;
  if (name == "object") return HSPAM_ATTENTION_OBJECT;
  throw Failure(HSPAM_ERR_INVALID_ARGUMENT, "unknown attention mode '" + name + "'");
}

hspam_attention_mode resolve_attention_mode(
    const std::optional<hspam_attention_mode>& requested, bool has_attention_source) {
  if (requested) return *requested;
  return has_attention_source ? HSPAM_ATTENTION_OBJECT : HSPAM_ATTENTION_OFF;
}

nlohmann::json params_to_json(const hspam_params& p) {
  return {{"w_pos", p.w_pos},
          {"w_att", p.w_att},
          {"attention_mode", attention_mode_name(p.attention_mode)}};
}

nlohmann::json metrics_to_json(const hspam_metrics& m) {
  nlohmann::json doc{{"k", m.k},   {"asa", m.asa}, {"br", m.br},
                     {"cd", m.cd}, {"src", m.src}, {"eps", m.eps},
                     {"ground_truths", m.ground_truths}};
  doc["nestedness"] = m.has_nestedness ? nlohmann::json(m.nestedness) : nlohmann::json();
  return doc;
}

Pipeline Pipeline::load(const PipelineInputs& in) {
  if (in.image.empty()) throw Failure(HSPAM_ERR_INVALID_ARGUMENT, "an image is required");
  if (!in.fine.empty() && in.init_grid > 0) {
    throw Failure(HSPAM_ERR_INVALID_ARGUMENT, "--fine and --init-grid are exclusive");
  }
  Pipeline p;
  p.image = load_image(in.image);
  const int w = p.width(), h = p.height();
  if (!in.fine.empty()) {
    p.fine = load_labels(in.fine);
    require_shape(p.fine.get(), w, h, "fine partition");
  } else if (in.init_grid > 0) {
    p.fine = grid_labels(w, h, in.init_grid);
  } else {
    throw Failure(HSPAM_ERR_INVALID_ARGUMENT,
                  "a fine partition (--fine) or --init-grid N is required");
  }
  if (!in.objects.empty()) {
    p.objects = load_labels(in.objects);
    require_shape(p.objects.get(), w, h, "object map");
  }
  p.features = assemble_features(p.image.get(), in.features);
  if (!in.attention.empty()) p.base_attention = load_attention(in.attention, w, h);
  return p;
}

nlohmann::json load_click_file(const std::string& path) {
  nlohmann::json doc = nlohmann::json::parse(read_text(path));
  if (!doc.is_array()) throw Failure(HSPAM_ERR_FORMAT, path + ": clicks must be a JSON array");
  return doc;
}

BuildResult build_hierarchy(const Pipeline& pipeline, hspam_params params,
                            const std::optional<hspam_attention_mode>& requested,
                            const nlohmann::json& clicks) {
  BuildResult out;
  const bool has_source = pipeline.base_attention || !clicks.empty();
  if (has_source) {
    out.attention = clicks_attention(clicks.dump(), pipeline.base_attention.get(),
                                     pipeline.width(), pipeline.height());
  }
  params.attention_mode = resolve_attention_mode(requested, has_source);
  out.seq = build(pipeline.fine.get(), pipeline.objects.get(), pipeline.features.get(),
                  out.attention.get(), params);
  out.params = params;
  return out;
}

Session::Session(const PipelineInputs& inputs, std::vector<std::string> ground_truths)
    : pipeline_(Pipeline::load(inputs)) {
  for (const std::string& path : ground_truths) {
    ground_truths_.push_back(load_labels(path));
    require_shape(ground_truths_.back().get(), pipeline_.width(), pipeline_.height(),
                  "ground truth " + path);
  }
  nlohmann::json clicks = nlohmann::json::array();
  if (!inputs.clicks.empty()) clicks = load_click_file(inputs.clicks);
  snapshot_ = rebuild(inputs.params, inputs.attention_mode, std::move(clicks), 0);
}

std::shared_ptr<const Session::Snapshot> Session::current() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

void Session::publish(std::shared_ptr<const Snapshot> next) {
  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(next);
}

std::shared_ptr<const Session::Snapshot> Session::rebuild(
    hspam_params params, std::optional<hspam_attention_mode> requested,
    nlohmann::json clicks, std::uint64_t generation) const {
  auto next = std::make_shared<Snapshot>();
  BuildResult built = build_hierarchy(pipeline_, params, requested, clicks);
  next->seq = std::move(built.seq);
  next->attention = std::move(built.attention);
  next->generation = generation;
  next->params = built.params;
  next->requested_mode = requested;
  next->clicks = std::move(clicks);
  return next;
}

std::uint64_t Session::add_clicks(const std::string& body) {
  nlohmann::json posted = nlohmann::json::parse(body);
  if (!posted.is_array()) throw HttpError(400, "click payload must be a JSON array");
  // Validates format and bounds before touching the session.
  clicks_attention(posted.dump(), nullptr, pipeline_.width(), pipeline_.height());

  std::lock_guard lock(rebuild_mutex_);
  const auto prev = current();
  nlohmann::json clicks = prev->clicks;
  for (auto& c : posted) clicks.push_back(std::move(c));
  auto next = rebuild(prev->params, prev->requested_mode, std::move(clicks),
                      prev->generation + 1);
  const std::uint64_t generation = next->generation;
  publish(std::move(next));
  return generation;
}

std::uint64_t Session::update_params(const std::string& body) {
  const nlohmann::json doc = nlohmann::json::parse(body);
  if (!doc.is_object()) throw HttpError(400, "params payload must be a JSON object");

  std::lock_guard lock(rebuild_mutex_);
  const auto prev = current();
  hspam_params params = prev->params;
  std::optional<hspam_attention_mode> requested = prev->requested_mode;
  if (doc.contains("w_pos")) params.w_pos = doc["w_pos"].get<double>();
  if (doc.contains("w_att")) params.w_att = doc["w_att"].get<double>();
  if (doc.contains("attention_mode")) {
    requested = attention_mode_from_name(doc["attention_mode"].get<std::string>());
  }
  if (!(params.w_pos >= 0) || !(params.w_att >= 0)) {
    throw HttpError(400, "w_pos and w_att must be non-negative");
  }
  auto next = rebuild(params, requested, prev->clicks, prev->generation + 1);
  const std::uint64_t generation = next->generation;
  publish(std::move(next));
  return generation;
}

nlohmann::json Session::meta() const {
  const auto snap = current();
  return {{"width", pipeline_.width()},
          {"height", pipeline_.height()},
          {"n_f", hspam_sequence_n_f(snap->seq.get())},
          {"k_max", hspam_sequence_n_f(snap->seq.get())},
          {"generation", snap->generation},
          {"params", params_to_json(snap->params)},
          {"clicks", snap->clicks.size()},
          {"phase1_merges", hspam_sequence_phase1_count(snap->seq.get())},
          {"has_ground_truth", has_ground_truth()}};
}

std::string Session::image_png() const { return encode_png(pipeline_.image.get()); }

std::pair<std::string, std::uint64_t> Session::partition_png(int k) const {
  const auto snap = current();
  Labels part = extract(snap->seq.get(), pipeline_.fine.get(), k);
  return {encode_png(part.get()), snap->generation};
}

std::pair<std::string, std::uint64_t> Session::overlay_png(int k) const {
  const auto snap = current();
  Labels part = extract(snap->seq.get(), pipeline_.fine.get(), k);
  Image over = overlay(pipeline_.image.get(), part.get(), 255, 0, 0);
  return {encode_png(over.get()), snap->generation};
}

std::string Session::attention_png() const {
  const auto snap = current();
  if (snap->attention) return encode_png(snap->attention.get());
  Attention zeros = clicks_attention("[]", nullptr, pipeline_.width(), pipeline_.height());
  return encode_png(zeros.get());
}

std::pair<nlohmann::json, std::uint64_t> Session::metrics(int k, int eps) const {
  const auto snap = current();
  Labels part = extract(snap->seq.get(), pipeline_.fine.get(), k);
  std::vector<const hspam_labels*> gts;
  for (const Labels& gt : ground_truths_) gts.push_back(gt.get());
  nlohmann::json doc = metrics_to_json(evaluate(part.get(), gts, nullptr, eps));
  doc["generation"] = snap->generation;
  return {doc, snap->generation};
}

void mount_api(httplib::Server& server, Session& session, const std::string& static_dir) {
  server.Get("/api/meta", wrap([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(session.meta().dump(), "application/json");
  }));
  server.Get("/api/image", wrap([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(session.image_png(), "image/png");
  }));
  server.Get("/api/partition", wrap([&](const httplib::Request& req, httplib::Response& res) {
    auto [png, generation] = session.partition_png(parse_int_param(req, "k"));
    set_generation(res, generation);
    res.set_content(std::move(png), "image/png");
  }));
  server.Get("/api/overlay", wrap([&](const httplib::Request& req, httplib::Response& res) {
    auto [png, generation] = session.overlay_png(parse_int_param(req, "k"));
    set_generation(res, generation);
    res.set_content(std::move(png), "image/png");
  }));
  server.Get("/api/attention", wrap([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(session.attention_png(), "image/png");
  }));
  server.Get("/api/metrics", wrap([&](const httplib::Request& req, httplib::Response& res) {
    if (!session.has_ground_truth()) {
      throw HttpError(404, "no ground truth was supplied at startup");
    }
    auto [doc, generation] =
        session.metrics(parse_int_param(req, "k"), parse_int_param(req, "eps", 2));
    set_generation(res, generation);
    res.set_content(doc.dump(), "application/json");
  }));
  server.Post("/api/clicks", wrap([&](const httplib::Request& req, httplib::Response& res) {
    const std::uint64_t generation = session.add_clicks(req.body);
    set_generation(res, generation);
    res.set_content(nlohmann::json{{"generation", generation}}.dump(), "application/json");
  }));
  server.Post("/api/params", wrap([&](const httplib::Request& req, httplib::Response& res) {
    const std::uint64_t generation = session.update_params(req.body);
    set_generation(res, generation);
    res.set_content(nlohmann::json{{"generation", generation}}.dump(), "application/json");
  }));
  if (!static_dir.empty() && server.set_mount_point("/", static_dir)) return;
  server.Get("/", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(kFallbackIndex, "text/html");
  });
}

}  // namespace hspam_tools
