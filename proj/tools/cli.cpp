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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>

#include "CLI11.hpp"
#include "handles.hpp"
#include "httplib.h"
#include "service.hpp"

namespace fs = std::filesystem;

namespace hspam_tools {
namespace {

struct BuildOptions {
  PipelineInputs inputs;
  std::string mode = "auto";
  std::string out;
  std::string save_fine;
};

struct ExtractOptions {
  std::string seq;
  std::string fine;
  std::vector<int> ks;
  std::string out_dir = ".";
  std::string prefix = "partition";
};

struct EvalOptions {
  std::vector<std::string> labels;
  std::vector<std::string> gts;
  std::string name = "image";
  std::string batch_dir;
  std::string gt_dir;
  int eps = 2;
  std::string json_out;
  std::string csv_out;
};

struct RenderOptions {
  std::string image;
  std::string labels;
  std::string out;
  std::vector<int> color{255, 0, 0};
};

struct ServeOptions {
  BuildOptions build;
  std::vector<std::string> gts;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

void add_pipeline_options(CLI::App* cmd, BuildOptions& o) {
  PipelineInputs& in = o.inputs;
  cmd->add_option("--image", in.image, "Input image (PNG or PPM)")->required();
  cmd->add_option("--fine", in.fine, "Fine partition, 16-bit label PNG");
  cmd->add_option("--init-grid", in.init_grid,
                  "Use an N-cell grid as the fine partition")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--objects", in.objects, "Object prior map, label PNG");
  cmd->add_option("--features", in.features, "Deep feature tensor (HSPF)");
  cmd->add_option("--attention", in.attention, "Attention map, gray PNG");
  cmd->add_option("--clicks", in.clicks, "Click list, JSON");
  cmd->add_option("--wpos", in.params.w_pos, "Spatial weight")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--watt", in.params.w_att, "Attention weight")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--attention-mode", o.mode,
                  "auto (object when attention is supplied) | off | superpixel | object")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "off", "superpixel", "object"}));
}

void finalize_mode(BuildOptions& o) {
  if (o.mode != "auto") o.inputs.attention_mode = attention_mode_from_name(o.mode);
}

void write_text(const std::string& path, const std::string& text) {
  const fs::path tmp = path + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure(HSPAM_ERR_IO, "cannot write " + path);
    out << text;
    if (!out) throw Failure(HSPAM_ERR_IO, "write failed: " + path);
  }
  fs::rename(tmp, path);
}

int run_build(BuildOptions& o) {
  finalize_mode(o);
  const auto start = std::chrono::steady_clock::now();
  const Pipeline pipeline = Pipeline::load(o.inputs);
  nlohmann::json clicks = nlohmann::json::array();
  if (!o.inputs.clicks.empty()) clicks = load_click_file(o.inputs.clicks);
  BuildResult built =
      build_hierarchy(pipeline, o.inputs.params, o.inputs.attention_mode, clicks);
  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start).count();

  check(hspam_sequence_save(built.seq.get(), o.out.c_str()));
  if (!o.save_fine.empty()) check(hspam_labels_save(pipeline.fine.get(), o.save_fine.c_str()));

  const int merges = hspam_sequence_merge_count(built.seq.get());
  const int phase1 = hspam_sequence_phase1_count(built.seq.get());
  std::fprintf(stderr,
               "hspam build: %d regions, %d merges (phase 1: %d, phase 2: %d), "
               "attention %s, %.3f s\n",
               hspam_sequence_n_f(built.seq.get()), merges, phase1, merges - phase1,
               attention_mode_name(built.params.attention_mode), elapsed);
  return 0;
}

int run_extract(const ExtractOptions& o) {
  Sequence seq = load_sequence(o.seq);
  Labels fine = load_labels(o.fine);
  const int n_f = hspam_sequence_n_f(seq.get());
  for (int k : o.ks) {
    if (k < 1 || k > n_f) {
      throw Failure(HSPAM_ERR_OUT_OF_RANGE, "K = " + std::to_string(k) +
                                                " outside [1, " + std::to_string(n_f) + "]");
    }
  }
  fs::create_directories(o.out_dir);
  for (int k : o.ks) {
    Labels part = extract(seq.get(), fine.get(), k);
    const fs::path path = fs::path(o.out_dir) / (o.prefix + "_k" + std::to_string(k) + ".png");
    check(hspam_labels_save(part.get(), path.c_str()));
    std::cout << path.string() << "\n";
  }
  return 0;
}

struct Level {
  std::string image;
  Labels labels;
  int k = 0;
};

std::vector<Labels> load_ground_truths(const std::vector<std::string>& paths) {
  std::vector<Labels> gts;
  for (const auto& p : paths) gts.push_back(load_labels(p));
  return gts;
}

// One report per level; nestedness compares each level with the next
// coarser one of the same image.
void evaluate_levels(std::vector<Level>& levels, const std::vector<Labels>& gts, int eps,
                     nlohmann::json& reports, std::string& csv) {
  std::sort(levels.begin(), levels.end(),
            [](const Level& a, const Level& b) { return a.k > b.k; });
  std::vector<const hspam_labels*> gt_ptrs;
  for (const auto& g : gts) gt_ptrs.push_back(g.get());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const hspam_labels* coarser = i + 1 < levels.size() ? levels[i + 1].labels.get() : nullptr;
    const hspam_metrics m = evaluate(levels[i].labels.get(), gt_ptrs, coarser, eps);
    nlohmann::json doc = metrics_to_json(m);
    doc["image"] = levels[i].image;
    reports.push_back(doc);
    char row[256];
    std::snprintf(row, sizeof row, "%s,%d,%.17g,%.17g,%.17g,%.17g\n",
                  levels[i].image.c_str(), m.k, m.asa, m.br, m.cd, m.src);
    csv += row;
  }
}

int run_eval(const EvalOptions& o) {
  nlohmann::json reports = nlohmann::json::array();
  std::string csv = "image,k,asa,br,cd,src\n";

  if (!o.batch_dir.empty()) {
    if (o.gt_dir.empty()) throw Failure(HSPAM_ERR_INVALID_ARGUMENT, "--batch-dir needs --gt-dir");
    const std::regex pattern(R"((.+)_k(\d+)\.png)");
    std::map<std::string, std::vector<fs::path>> by_image;
    for (const auto& entry : fs::directory_iterator(o.batch_dir)) {
      std::smatch m;
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && std::regex_match(name, m, pattern)) {
        by_image[m[1].str()].push_back(entry.path());
      }
    }
    if (by_image.empty()) {
      throw Failure(HSPAM_ERR_INVALID_ARGUMENT, "no <image>_k<K>.png files in " + o.batch_dir);
    }
    for (auto& [image, files] : by_image) {
      std::vector<std::string> gt_paths;
      const fs::path single = fs::path(o.gt_dir) / (image + ".png");
      const fs::path multi = fs::path(o.gt_dir) / image;
      if (fs::is_regular_file(single)) {
        gt_paths.push_back(single.string());
      } else if (fs::is_directory(multi)) {
        for (const auto& e : fs::directory_iterator(multi)) {
          if (e.path().extension() == ".png") gt_paths.push_back(e.path().string());
        }
        std::sort(gt_paths.begin(), gt_paths.end());
      }
      if (gt_paths.empty()) throw Failure(HSPAM_ERR_IO, "missing ground truth for " + image);
      std::sort(files.begin(), files.end());
      std::vector<Level> levels;
      for (const auto& f : files) {
        Labels l = load_labels(f.string());
        const int k = hspam_labels_count(l.get());
        levels.push_back({image, std::move(l), k});
      }
      evaluate_levels(levels, load_ground_truths(gt_paths), o.eps, reports, csv);
    }
  } else {
    if (o.labels.empty()) throw Failure(HSPAM_ERR_INVALID_ARGUMENT, "--labels is required");
    if (o.gts.empty()) throw Failure(HSPAM_ERR_INVALID_ARGUMENT, "--gt is required");
    std::vector<Level> levels;
    for (const auto& path : o.labels) {
      Labels l = load_labels(path);
      const int k = hspam_labels_count(l.get());
      levels.push_back({o.name, std::move(l), k});
    }
    evaluate_levels(levels, load_ground_truths(o.gts), o.eps, reports, csv);
  }

  if (o.json_out.empty()) {
    std::cout << reports.dump(2) << "\n";
  } else {
    write_text(o.json_out, reports.dump(2) + "\n");
  }
  if (!o.csv_out.empty()) write_text(o.csv_out, csv);
  return 0;
}

int run_render(const RenderOptions& o) {
  if (o.color.size() != 3) throw Failure(HSPAM_ERR_INVALID_ARGUMENT, "--color needs r,g,b");
  Image image = load_image(o.image);
  Labels labels = load_labels(o.labels);
  Image out = overlay(image.get(), labels.get(), static_cast<unsigned char>(o.color[0]),
                      static_cast<unsigned char>(o.color[1]),
                      static_cast<unsigned char>(o.color[2]));
  check(hspam_image_save(out.get(), o.out.c_str()));
  return 0;
}

int run_serve(ServeOptions& o) {
  finalize_mode(o.build);
  Session session(o.build.inputs, o.gts);
  httplib::Server server;
  mount_api(server, session, o.static_dir);
  if (!server.bind_to_port(o.host, o.port)) {
    throw Failure(HSPAM_ERR_IO, "cannot listen on " + o.host + ":" + std::to_string(o.port) +
                                    " (port in use?)");
  }
  std::fprintf(stderr, "hspam serve: http://%s:%d (n_f = %d)\n", o.host.c_str(), o.port,
               session.meta()["n_f"].get<int>());
  server.listen_after_bind();
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Hierarchical superpixels by object-constrained region merging"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hspam_version()));

  BuildOptions build;
  auto* build_cmd = app.add_subcommand("build", "Build and save a merge sequence");
  add_pipeline_options(build_cmd, build);
  build_cmd->add_option("--out", build.out, "Merge sequence JSON")->required();
  build_cmd->add_option("--save-fine", build.save_fine,
                        "Also write the fine partition (useful with --init-grid)");

  ExtractOptions extract_opts;
  auto* extract_cmd = app.add_subcommand("extract", "Cut partitions with exactly K regions");
  extract_cmd->add_option("--seq", extract_opts.seq, "Merge sequence JSON")->required();
  extract_cmd->add_option("--fine", extract_opts.fine, "Fine partition")->required();
  extract_cmd->add_option("--k", extract_opts.ks, "Comma-separated region counts")
      ->required()
      ->delimiter(',');
  extract_cmd->add_option("--out-dir", extract_opts.out_dir)->capture_default_str();
  extract_cmd->add_option("--prefix", extract_opts.prefix)->capture_default_str();

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Compute ASA, BR, CD, SRC and nestedness");
  eval_cmd->add_option("--labels", eval.labels, "Partition(s) of one image");
  eval_cmd->add_option("--gt", eval.gts, "Ground-truth segmentation(s)");
  eval_cmd->add_option("--name", eval.name, "Image name used in the CSV")->capture_default_str();
  eval_cmd->add_option("--batch-dir", eval.batch_dir, "Directory of <image>_k<K>.png files");
  eval_cmd->add_option("--gt-dir", eval.gt_dir,
                       "Ground truths as <image>.png or <image>/*.png");
  eval_cmd->add_option("--eps", eval.eps, "Boundary recall tolerance (pixels)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--json", eval.json_out, "Write reports here instead of stdout");
  eval_cmd->add_option("--csv", eval.csv_out, "Write image,k,asa,br,cd,src rows");

  RenderOptions render;
  auto* render_cmd = app.add_subcommand("render", "Paint partition boundaries over an image");
  render_cmd->add_option("--image", render.image)->required();
  render_cmd->add_option("--labels", render.labels)->required();
  render_cmd->add_option("--out", render.out)->required();
  render_cmd->add_option("--color", render.color, "r,g,b")->delimiter(',')->expected(3);

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the interactive HTTP API");
  add_pipeline_options(serve_cmd, serve.build);
  serve_cmd->add_option("--gt", serve.gts, "Ground truth(s) for /api/metrics");
  serve_cmd->add_option("--host", serve.host)->capture_default_str();
  serve_cmd->add_option("--port", serve.port)->capture_default_str();
  serve_cmd->add_option("--static-dir", serve.static_dir, "UI assets served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*build_cmd) return run_build(build);
    if (*extract_cmd) return run_extract(extract_opts);
    if (*eval_cmd) return run_eval(eval);
    if (*render_cmd) return run_render(render);
    if (*serve_cmd) return run_serve(serve);
  } catch (const Failure& e) {
    std::fprintf(stderr, "hspam: error: %s\n", e.what());
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "hspam: error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hspam: error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace hspam_tools
