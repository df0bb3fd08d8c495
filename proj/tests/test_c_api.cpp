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

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "hspam/hspam.h"

namespace fs = std::filesystem;

namespace {

// Binary PPM with a smooth colour ramp and a brighter right half.
std::vector<std::uint8_t> ramp_ppm(int w, int h) {
  const std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int bright = x >= w / 2 ? 120 : 0;
      bytes.push_back(std::uint8_t((x * 7 + bright) % 256));
      bytes.push_back(std::uint8_t((y * 11) % 256));
      bytes.push_back(std::uint8_t(bright + 30));
    }
  }
  return bytes;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hspam_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Fixture {
  hspam_image* image = nullptr;
  hspam_labels* fine = nullptr;
  hspam_labels* objects = nullptr;
  hspam_features* features = nullptr;

  Fixture(int w = 24, int h = 16, int n = 24) {
    const auto ppm = ramp_ppm(w, h);
    REQUIRE(hspam_image_decode(ppm.data(), ppm.size(), &image) == HSPAM_OK);
    REQUIRE(hspam_labels_grid(w, h, n, &fine) == HSPAM_OK);
    std::vector<int32_t> obj(std::size_t(w) * h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) obj[std::size_t(y) * w + x] = x >= w / 2;
    }
    REQUIRE(hspam_labels_from_array(w, h, obj.data(), &objects) == HSPAM_OK);
    REQUIRE(hspam_features_assemble(image, nullptr, &features) == HSPAM_OK);
  }
  ~Fixture() {
    hspam_features_free(features);
    hspam_labels_free(objects);
    hspam_labels_free(fine);
    hspam_image_free(image);
  }
};

}  // namespace

TEST_CASE("status strings and version") {
  CHECK(std::strlen(hspam_version()) > 0);
  CHECK(std::string(hspam_status_string(HSPAM_OK)) != hspam_status_string(HSPAM_ERR_IO));
  hspam_buffer empty{nullptr, 0};
  hspam_buffer_free(&empty);
  hspam_buffer_free(nullptr);
  hspam_image_free(nullptr);
  hspam_labels_free(nullptr);
  hspam_sequence_free(nullptr);
}

TEST_CASE("null arguments report INVALID_ARGUMENT with a message") {
  hspam_image* image = nullptr;
  CHECK(hspam_image_load(nullptr, &image) == HSPAM_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(hspam_last_error()) > 0);
  CHECK(hspam_image_load("x.png", nullptr) == HSPAM_ERR_INVALID_ARGUMENT);
  hspam_sequence* seq = nullptr;
  const hspam_params p = hspam_params_default();
  CHECK(hspam_build(nullptr, nullptr, nullptr, nullptr, &p, &seq) == HSPAM_ERR_INVALID_ARGUMENT);
  CHECK(seq == nullptr);
  double v = 0;
  CHECK(hspam_nestedness(nullptr, nullptr, &v) == HSPAM_ERR_INVALID_ARGUMENT);
  CHECK(hspam_image_width(nullptr) == 0);
}

TEST_CASE("error codes map from the core") {
  hspam_image* image = nullptr;
  const fs::path dir = scratch("errors");
  CHECK(hspam_image_load((dir / "missing.png").c_str(), &image) == HSPAM_ERR_IO);
  const std::uint8_t junk[] = {1, 2, 3};
  CHECK(hspam_image_decode(junk, sizeof junk, &image) == HSPAM_ERR_FORMAT);
  CHECK(image == nullptr);

  hspam_labels* labels = nullptr;
  const int32_t gapped[] = {0, 5};
  REQUIRE(hspam_labels_from_array(2, 1, gapped, &labels) == HSPAM_OK);
  CHECK(hspam_labels_count(labels) == 2);
  hspam_labels_free(labels);
  labels = nullptr;
  const int32_t negative[] = {0, -1};
  CHECK(hspam_labels_from_array(2, 1, negative, &labels) == HSPAM_ERR_FORMAT);
  CHECK(hspam_labels_grid(4, 4, 0, &labels) == HSPAM_ERR_OUT_OF_RANGE);
  CHECK(hspam_labels_grid(4, 4, 17, &labels) == HSPAM_ERR_OUT_OF_RANGE);

  hspam_attention* att = nullptr;
  CHECK(hspam_attention_from_clicks("[{\"x\": 9, \"y\": 0, \"sign\": \"+\"}]", nullptr, 4, 4,
                                    &att) == HSPAM_ERR_OUT_OF_RANGE);
  CHECK(hspam_attention_from_clicks("not json", nullptr, 4, 4, &att) == HSPAM_ERR_FORMAT);
  hspam_sequence* seq = nullptr;
  CHECK(hspam_sequence_parse("{\"n_f\": 3}", &seq) == HSPAM_ERR_FORMAT);
}

TEST_CASE("build, extract and evaluate through the C API") {
  Fixture fx;
  hspam_params params = hspam_params_default();
  CHECK(params.w_pos == 5.0);
  CHECK(params.w_att == 0.0);
  CHECK(params.attention_mode == HSPAM_ATTENTION_OFF);

  hspam_sequence* seq = nullptr;
  REQUIRE(hspam_build(fx.fine, fx.objects, fx.features, nullptr, &params, &seq) == HSPAM_OK);
  CHECK(hspam_sequence_n_f(seq) == 24);
  CHECK(hspam_sequence_merge_count(seq) == 23);
  // Each object is 12 grid cells and connected, so phase 1 leaves 2 regions.
  CHECK(hspam_sequence_phase1_count(seq) == 22);

  hspam_labels* fine_level = nullptr;
  hspam_labels* mid = nullptr;
  hspam_labels* two = nullptr;
  REQUIRE(hspam_extract(seq, fx.fine, 24, &fine_level) == HSPAM_OK);
  REQUIRE(hspam_extract(seq, fx.fine, 7, &mid) == HSPAM_OK);
  REQUIRE(hspam_extract(seq, fx.fine, 2, &two) == HSPAM_OK);
  CHECK(hspam_labels_count(mid) == 7);
  hspam_labels* bad = nullptr;
  CHECK(hspam_extract(seq, fx.fine, 0, &bad) == HSPAM_ERR_OUT_OF_RANGE);
  CHECK(hspam_extract(seq, fx.fine, 25, &bad) == HSPAM_ERR_OUT_OF_RANGE);
  CHECK(bad == nullptr);

  // The two-region level is exactly the object map.
  std::vector<int32_t> a(24 * 16), b(24 * 16);
  REQUIRE(hspam_labels_copy(two, a.data(), a.size()) == HSPAM_OK);
  REQUIRE(hspam_labels_copy(fx.objects, b.data(), b.size()) == HSPAM_OK);
  CHECK(a == b);
  CHECK(hspam_labels_copy(two, a.data(), 3) == HSPAM_ERR_OUT_OF_RANGE);

  double nested = 0;
  REQUIRE(hspam_nestedness(mid, two, &nested) == HSPAM_OK);
  CHECK(nested == 1.0);

  const hspam_labels* gts[] = {fx.objects};
  hspam_metrics m{};
  REQUIRE(hspam_evaluate(mid, gts, 1, two, 2, &m) == HSPAM_OK);
  CHECK(m.k == 7);
  CHECK(m.asa == 1.0);
  CHECK(m.br == 1.0);
  CHECK(m.has_nestedness == 1);
  CHECK(m.nestedness == 1.0);
  CHECK(m.ground_truths == 1);
  CHECK(hspam_evaluate(mid, gts, 0, nullptr, 2, &m) == HSPAM_ERR_INVALID_ARGUMENT);

  hspam_image* overlay = nullptr;
  REQUIRE(hspam_render_overlay(fx.image, two, 255, 0, 0, &overlay) == HSPAM_OK);
  CHECK(hspam_image_width(overlay) == 24);
  hspam_image_free(overlay);

  hspam_labels_free(fine_level);
  hspam_labels_free(mid);
  hspam_labels_free(two);
  hspam_sequence_free(seq);
}

TEST_CASE("sequence serialisation round trip") {
  Fixture fx;
  hspam_params params = hspam_params_default();
  params.w_att = 0.5;
  params.attention_mode = HSPAM_ATTENTION_OBJECT;
  hspam_attention* att = nullptr;
  REQUIRE(hspam_attention_from_clicks("[{\"x\": 3, \"y\": 3, \"sign\": \"+\"}]", nullptr, 24, 16,
                                      &att) == HSPAM_OK);
  hspam_sequence* seq = nullptr;
  REQUIRE(hspam_build(fx.fine, fx.objects, fx.features, att, &params, &seq) == HSPAM_OK);
  const hspam_params stored = hspam_sequence_params(seq);
  CHECK(stored.w_att == 0.5);
  CHECK(stored.attention_mode == HSPAM_ATTENTION_OBJECT);

  hspam_buffer json{};
  REQUIRE(hspam_sequence_to_json(seq, &json) == HSPAM_OK);
  const std::string text(reinterpret_cast<const char*>(json.data), json.size);
  hspam_buffer_free(&json);

  const fs::path dir = scratch("seq");
  REQUIRE(hspam_sequence_save(seq, (dir / "seq.json").c_str()) == HSPAM_OK);
  hspam_sequence* loaded = nullptr;
  REQUIRE(hspam_sequence_load((dir / "seq.json").c_str(), &loaded) == HSPAM_OK);
  hspam_buffer again{};
  REQUIRE(hspam_sequence_to_json(loaded, &again) == HSPAM_OK);
  CHECK(std::string(reinterpret_cast<const char*>(again.data), again.size) == text);
  hspam_buffer_free(&again);

  hspam_buffer png{};
  REQUIRE(hspam_attention_encode_png(att, &png) == HSPAM_OK);
  CHECK(png.size > 8);
  hspam_buffer_free(&png);

  hspam_sequence_free(loaded);
  hspam_sequence_free(seq);
  hspam_attention_free(att);
}

TEST_CASE("label and image files round trip") {
  Fixture fx;
  const fs::path dir = scratch("files");
  REQUIRE(hspam_labels_save(fx.fine, (dir / "fine.png").c_str()) == HSPAM_OK);
  hspam_labels* back = nullptr;
  REQUIRE(hspam_labels_load((dir / "fine.png").c_str(), &back) == HSPAM_OK);
  std::vector<int32_t> a(24 * 16), b(24 * 16);
  hspam_labels_copy(fx.fine, a.data(), a.size());
  hspam_labels_copy(back, b.data(), b.size());
  CHECK(a == b);
  hspam_labels_free(back);

  REQUIRE(hspam_image_save(fx.image, (dir / "img.png").c_str()) == HSPAM_OK);
  hspam_image* img = nullptr;
  REQUIRE(hspam_image_load((dir / "img.png").c_str(), &img) == HSPAM_OK);
  CHECK(hspam_image_height(img) == 16);
  hspam_image_free(img);

  hspam_features* bad = nullptr;
  CHECK(hspam_features_assemble(fx.image, (dir / "none.hspf").c_str(), &bad) == HSPAM_ERR_IO);
  CHECK(hspam_features_channels(fx.features) == 5);
}

TEST_CASE("mismatched inputs are rejected") {
  Fixture fx;
  hspam_labels* small = nullptr;
  REQUIRE(hspam_labels_grid(8, 8, 4, &small) == HSPAM_OK);
  const hspam_params params = hspam_params_default();
  hspam_sequence* seq = nullptr;
  CHECK(hspam_build(small, nullptr, fx.features, nullptr, &params, &seq) ==
        HSPAM_ERR_DIMENSION_MISMATCH);
  hspam_params negative = params;
  negative.w_pos = -1;
  CHECK(hspam_build(fx.fine, nullptr, fx.features, nullptr, &negative, &seq) ==
        HSPAM_ERR_INVALID_ARGUMENT);
  REQUIRE(hspam_build(fx.fine, nullptr, fx.features, nullptr, &params, &seq) == HSPAM_OK);
  hspam_labels* out = nullptr;
  CHECK(hspam_extract(seq, small, 2, &out) == HSPAM_ERR_INVALID_ARGUMENT);
  CHECK(hspam_sequence_phase1_count(seq) == 23);
  hspam_sequence_free(seq);
  hspam_labels_free(small);
}
