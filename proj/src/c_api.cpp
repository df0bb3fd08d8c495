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

#include "hspam/hspam.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "hspam/hierarchy.hpp"
#include "hspam/metrics.hpp"
#include "hspam/partition_io.hpp"

struct hspam_image {
  hspam::RgbImage value;
};
struct hspam_labels {
  hspam::LabelMap value;
};
struct hspam_features {
  hspam::FeatureField value;
};
struct hspam_attention {
  hspam::AttentionMap value;
};
struct hspam_sequence {
  hspam::MergeSequence value;
};

namespace {

thread_local std::string g_last_error;

hspam_status to_status(hspam::ErrorCode code) {
  switch (code) {
    case hspam::ErrorCode::invalid_argument: return HSPAM_ERR_INVALID_ARGUMENT;
    case hspam::ErrorCode::io: return HSPAM_ERR_IO;
    case hspam::ErrorCode::format: return HSPAM_ERR_FORMAT;
    case hspam::ErrorCode::dimension_mismatch: return HSPAM_ERR_DIMENSION_MISMATCH;
    case hspam::ErrorCode::out_of_range: return HSPAM_ERR_OUT_OF_RANGE;
    case hspam::ErrorCode::disconnected: return HSPAM_ERR_DISCONNECTED;
  }
  return HSPAM_ERR_INTERNAL;
}

hspam_status fail(hspam_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename Body>
hspam_status guarded(Body&& body) {
  try {
    body();
    g_last_error.clear();
    return HSPAM_OK;
  } catch (const hspam::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HSPAM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HSPAM_ERR_INTERNAL, e.what());
  }
}

#define HSPAM_REQUIRE(cond)                                                  \
  do {                                                                       \
    if (!(cond)) return fail(HSPAM_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

hspam_status to_buffer(const std::vector<std::uint8_t>& bytes, hspam_buffer* out) {
  auto* data = static_cast<std::uint8_t*>(std::malloc(bytes.empty() ? 1 : bytes.size()));
  if (!data) return fail(HSPAM_ERR_INTERNAL, "out of memory");
  if (!bytes.empty()) std::memcpy(data, bytes.data(), bytes.size());
  out->data = data;
  out->size = bytes.size();
  return HSPAM_OK;
}

hspam::HierarchyParams to_cpp(const hspam_params& p) {
  hspam::HierarchyParams out;
  out.w_pos = p.w_pos;
  out.w_att = p.w_att;
  switch (p.attention_mode) {
    case HSPAM_ATTENTION_SUPERPIXEL: out.attention_mode = hspam::AttentionMode::superpixel; break;
    case HSPAM_ATTENTION_OBJECT: out.attention_mode = hspam::AttentionMode::object; break;
    case HSPAM_ATTENTION_OFF: out.attention_mode = hspam::AttentionMode::off; break;
    default: throw hspam::Error(hspam::ErrorCode::invalid_argument, "unknown attention mode");
  }
  out.attention_in_phase1 = p.attention_in_phase1 != 0;
  out.attention_in_phase2 = p.attention_in_phase2 != 0;
  return out;
}

hspam_params to_c(const hspam::HierarchyParams& p) {
  hspam_params out;
  out.w_pos = p.w_pos;
  out.w_att = p.w_att;
  out.attention_mode = p.attention_mode == hspam::AttentionMode::object
                           ? HSPAM_ATTENTION_OBJECT
                           : p.attention_mode == hspam::AttentionMode::superpixel
                                 ? HSPAM_ATTENTION_SUPERPIXEL
                                 : HSPAM_ATTENTION_OFF;
  out.attention_in_phase1 = p.attention_in_phase1;
  out.attention_in_phase2 = p.attention_in_phase2;
  return out;
}

}  // namespace

extern "C" {

const char* hspam_version(void) { return "1.0.0"; }

const char* hspam_last_error(void) { return g_last_error.c_str(); }

const char* hspam_status_string(hspam_status status) {
  switch (status) {
    case HSPAM_OK: return "ok";
    case HSPAM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HSPAM_ERR_IO: return "I/O error";
    case HSPAM_ERR_FORMAT: return "format error";
    case HSPAM_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case HSPAM_ERR_OUT_OF_RANGE: return "out of range";
    case HSPAM_ERR_DISCONNECTED: return "disconnected graph";
    case HSPAM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void hspam_buffer_free(hspam_buffer* buffer) {
  if (!buffer) return;
  std::free(buffer->data);
  buffer->data = nullptr;
  buffer->size = 0;
}

// --- images ----------------------------------------------------------------

hspam_status hspam_image_load(const char* path, hspam_image** out) {
  HSPAM_REQUIRE(path && out);
  return guarded([&] { *out = new hspam_image{hspam::load_image(path)}; });
}

hspam_status hspam_image_decode(const uint8_t* data, size_t size, hspam_image** out) {
  HSPAM_REQUIRE((data || size == 0) && out);
  return guarded([&] {
    *out = new hspam_image{hspam::decode_image({data, size})};
  });
}

hspam_status hspam_image_save(const hspam_image* image, const char* path) {
  HSPAM_REQUIRE(image && path);
  return guarded([&] { hspam::save_image(image->value, path); });
}

hspam_status hspam_image_encode_png(const hspam_image* image, hspam_buffer* out) {
  HSPAM_REQUIRE(image && out);
  std::vector<std::uint8_t> bytes;
  const hspam_status s = guarded([&] { bytes = hspam::encode_png(image->value); });
  return s == HSPAM_OK ? to_buffer(bytes, out) : s;
}

int hspam_image_width(const hspam_image* image) { return image ? image->value.width : 0; }
int hspam_image_height(const hspam_image* image) { return image ? image->value.height : 0; }
void hspam_image_free(hspam_image* image) { delete image; }

// --- labels ----------------------------------------------------------------

hspam_status hspam_labels_load(const char* path, hspam_labels** out) {
  HSPAM_REQUIRE(path && out);
  return guarded([&] { *out = new hspam_labels{hspam::load_label_map(path)}; });
}

hspam_status hspam_labels_from_array(int width, int height, const int32_t* labels,
                                     hspam_labels** out) {
  HSPAM_REQUIRE(labels && out);
  if (width < 1 || height < 1) return fail(HSPAM_ERR_INVALID_ARGUMENT, "dimensions must be >= 1");
  return guarded([&] {
    std::vector<hspam::RegionId> v(labels, labels + std::size_t(width) * height);
    *out = new hspam_labels{hspam::LabelMap::compact(width, height, std::move(v))};
  });
}

hspam_status hspam_labels_grid(int width, int height, int n, hspam_labels** out) {
  HSPAM_REQUIRE(out);
  return guarded([&] { *out = new hspam_labels{hspam::grid_partition(width, height, n)}; });
}

hspam_status hspam_labels_save(const hspam_labels* labels, const char* path) {
  HSPAM_REQUIRE(labels && path);
  return guarded([&] { hspam::save_label_map(labels->value, path); });
}

hspam_status hspam_labels_encode_png(const hspam_labels* labels, hspam_buffer* out) {
  HSPAM_REQUIRE(labels && out);
  std::vector<std::uint8_t> bytes;
  const hspam_status s =
      guarded([&] { bytes = hspam::encode_label_png(labels->value); });
  return s == HSPAM_OK ? to_buffer(bytes, out) : s;
}

int hspam_labels_width(const hspam_labels* labels) { return labels ? labels->value.width() : 0; }
int hspam_labels_height(const hspam_labels* labels) { return labels ? labels->value.height() : 0; }
int hspam_labels_count(const hspam_labels* labels) { return labels ? labels->value.count() : 0; }

hspam_status hspam_labels_copy(const hspam_labels* labels, int32_t* out, size_t capacity) {
  HSPAM_REQUIRE(labels && out);
  const auto src = labels->value.labels();
  if (capacity < src.size()) return fail(HSPAM_ERR_OUT_OF_RANGE, "output buffer too small");
  std::memcpy(out, src.data(), src.size() * sizeof(int32_t));
  return HSPAM_OK;
}

void hspam_labels_free(hspam_labels* labels) { delete labels; }

// --- features / attention --------------------------------------------------

hspam_status hspam_features_assemble(const hspam_image* image, const char* deep_path,
                                     hspam_features** out) {
  HSPAM_REQUIRE(image && out);
  return guarded([&] {
    const auto& img = image->value;
    const hspam::FeaturePlanes lab = hspam::rgb_to_lab(img);
    const hspam::FeaturePlanes pos = hspam::position_planes(img.width, img.height);
    if (deep_path) {
      const hspam::FeaturePlanes deep =
          hspam::load_feature_tensor(deep_path, img.width, img.height);
      *out = new hspam_features{hspam::assemble_features(lab, pos, &deep)};
    } else {
      *out = new hspam_features{hspam::assemble_features(lab, pos)};
    }
  });
}

int hspam_features_channels(const hspam_features* f) { return f ? f->value.channels : 0; }
void hspam_features_free(hspam_features* features) { delete features; }

hspam_status hspam_attention_load(const char* path, int width, int height,
                                  hspam_attention** out) {
  HSPAM_REQUIRE(path && out);
  return guarded([&] {
    *out = new hspam_attention{
        hspam::resample_attention(hspam::load_attention(path), width, height)};
  });
}

hspam_status hspam_attention_from_clicks(const char* clicks_json,
                                         const hspam_attention* base, int width,
                                         int height, hspam_attention** out) {
  HSPAM_REQUIRE(clicks_json && out);
  return guarded([&] {
    const hspam::ClickSet clicks = hspam::parse_clicks(clicks_json);
    *out = new hspam_attention{hspam::clicks_to_attention(
        clicks, base ? &base->value : nullptr, width, height)};
  });
}

hspam_status hspam_attention_encode_png(const hspam_attention* att, hspam_buffer* out) {
  HSPAM_REQUIRE(att && out);
  std::vector<std::uint8_t> bytes;
  const hspam_status s = guarded([&] { bytes = hspam::encode_attention_png(att->value); });
  return s == HSPAM_OK ? to_buffer(bytes, out) : s;
}

void hspam_attention_free(hspam_attention* att) { delete att; }

// --- hierarchy -------------------------------------------------------------

hspam_params hspam_params_default(void) { return to_c(hspam::HierarchyParams{}); }

hspam_status hspam_build(const hspam_labels* fine, const hspam_labels* objects,
                         const hspam_features* features,
                         const hspam_attention* attention,
                         const hspam_params* params, hspam_sequence** out) {
  HSPAM_REQUIRE(fine && features && params && out);
  return guarded([&] {
    const hspam::HierarchyParams p = to_cpp(*params);
    const hspam::LabelMap& labels = fine->value;
    const hspam::LabelMap single(
        labels.width(), labels.height(),
        std::vector<hspam::RegionId>(labels.pixel_count(), 0));
    const hspam::LabelMap& obj = objects ? objects->value : single;
    hspam::RegionGraph graph =
        hspam::build_rag(labels, obj, features->value,
                         attention ? &attention->value : nullptr, p.attention_mode);
    *out = new hspam_sequence{hspam::build_hierarchy(std::move(graph), p)};
  });
}

hspam_status hspam_sequence_load(const char* path, hspam_sequence** out) {
  HSPAM_REQUIRE(path && out);
  return guarded([&] {
    const auto bytes = hspam::read_file(path);
    *out = new hspam_sequence{hspam::MergeSequence::from_json(
        std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()))};
  });
}

hspam_status hspam_sequence_parse(const char* json, hspam_sequence** out) {
  HSPAM_REQUIRE(json && out);
  return guarded([&] { *out = new hspam_sequence{hspam::MergeSequence::from_json(json)}; });
}

hspam_status hspam_sequence_save(const hspam_sequence* seq, const char* path) {
  HSPAM_REQUIRE(seq && path);
  return guarded([&] {
    const std::string json = seq->value.to_json();
    hspam::write_file_atomic(
        path, {reinterpret_cast<const std::uint8_t*>(json.data()), json.size()});
  });
}

hspam_status hspam_sequence_to_json(const hspam_sequence* seq, hspam_buffer* out) {
  HSPAM_REQUIRE(seq && out);
  const std::string json = seq->value.to_json();
  return to_buffer(std::vector<std::uint8_t>(json.begin(), json.end()), out);
}

int hspam_sequence_n_f(const hspam_sequence* seq) { return seq ? seq->value.n_f : 0; }
int hspam_sequence_merge_count(const hspam_sequence* seq) {
  return seq ? int(seq->value.records.size()) : 0;
}
int hspam_sequence_phase1_count(const hspam_sequence* seq) {
  return seq ? seq->value.phase1_count() : 0;
}
hspam_params hspam_sequence_params(const hspam_sequence* seq) {
  return seq ? to_c(seq->value.params) : hspam_params_default();
}
void hspam_sequence_free(hspam_sequence* seq) { delete seq; }

hspam_status hspam_extract(const hspam_sequence* seq, const hspam_labels* fine, int k,
                           hspam_labels** out) {
  HSPAM_REQUIRE(seq && fine && out);
  return guarded([&] {
    *out = new hspam_labels{hspam::extract_partition(seq->value, fine->value, k)};
  });
}

// --- metrics ---------------------------------------------------------------

hspam_status hspam_evaluate(const hspam_labels* labels,
                            const hspam_labels* const* ground_truths,
                            size_t ground_truth_count, const hspam_labels* coarser,
                            int eps, hspam_metrics* out) {
  HSPAM_REQUIRE(labels && out && (ground_truths || ground_truth_count == 0));
  return guarded([&] {
    std::vector<hspam::LabelMap> gts;
    for (size_t i = 0; i < ground_truth_count; ++i) {
      if (!ground_truths[i]) {
        throw hspam::Error(hspam::ErrorCode::invalid_argument, "null ground truth");
      }
      gts.push_back(ground_truths[i]->value);
    }
    const hspam::MetricsReport r = hspam::evaluate(
        labels->value, gts, coarser ? &coarser->value : nullptr, eps);
    out->k = r.k;
    out->asa = r.asa;
    out->br = r.br;
    out->cd = r.cd;
    out->src = r.src;
    out->has_nestedness = r.nestedness.has_value();
    out->nestedness = r.nestedness.value_or(0.0);
    out->eps = r.eps;
    out->ground_truths = r.ground_truths;
  });
}

hspam_status hspam_nestedness(const hspam_labels* fine, const hspam_labels* coarse,
                              double* out) {
  HSPAM_REQUIRE(fine && coarse && out);
  return guarded([&] { *out = hspam::nestedness(fine->value, coarse->value); });
}

hspam_status hspam_render_overlay(const hspam_image* image, const hspam_labels* labels,
                                  uint8_t r, uint8_t g, uint8_t b, hspam_image** out) {
  HSPAM_REQUIRE(image && labels && out);
  return guarded([&] {
    *out = new hspam_image{hspam::render_overlay(image->value, labels->value, {r, g, b})};
  });
}

}  // extern "C"
