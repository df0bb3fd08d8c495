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

#include <filesystem>
#include <random>
#include <string>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "hspam/partition_io.hpp"
#include "json.hpp"
#include "service.hpp"
#include "support.hpp"

using namespace hspam;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::span<const std::uint8_t> bytes_of(const std::string& body) {
  return {reinterpret_cast<const std::uint8_t*>(body.data()), body.size()};
}

class Server {
 public:
  Server(const fs::path& dir, bool with_gt) {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> noise(0, 30);
    RgbImage img(32, 24);
    std::vector<RegionId> halves(32 * 24);
    for (int y = 0; y < 24; ++y) {
      for (int x = 0; x < 32; ++x) {
        halves[y * 32 + x] = x >= 16;
        img.at(x, y)[0] = std::uint8_t((x >= 16 ? 180 : 40) + noise(rng));
        img.at(x, y)[1] = std::uint8_t(90 + noise(rng));
        img.at(x, y)[2] = std::uint8_t(noise(rng));
      }
    }
    save_image(img, dir / "img.png");
    save_label_map(LabelMap(32, 24, halves), dir / "gt.png");

    hspam_tools::PipelineInputs in;
    in.image = (dir / "img.png").string();
    in.init_grid = 48;
    in.objects = (dir / "gt.png").string();
    std::vector<std::string> gts;
    if (with_gt) gts.push_back((dir / "gt.png").string());
    session_ = std::make_unique<hspam_tools::Session>(in, gts);
    hspam_tools::mount_api(server_, *session_, "");
    port_ = server_.bind_to_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~Server() {
    server_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(30, 0);
    return c;
  }

 private:
  std::unique_ptr<hspam_tools::Session> session_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_SUITE("serve") {

TEST_CASE("meta, image and partition endpoints") {
  const fs::path dir = testing::scratch_dir("serve_basic");
  Server server(dir, false);
  auto c = server.client();

  auto meta = c.Get("/api/meta");
  REQUIRE(meta);
  CHECK(meta->status == 200);
  const json m = json::parse(meta->body);
  CHECK(m.at("width") == 32);
  CHECK(m.at("height") == 24);
  CHECK(m.at("n_f") == 48);
  CHECK(m.at("k_max") == 48);
  CHECK(m.at("params").at("w_pos") == 5.0);

  auto image = c.Get("/api/image");
  REQUIRE(image);
  CHECK(image->status == 200);
  CHECK(image->get_header_value("Content-Type") == "image/png");
  CHECK(decode_image(bytes_of(image->body)).width == 32);

  auto part = c.Get("/api/partition?k=10");
  REQUIRE(part);
  CHECK(part->status == 200);
  const LabelMap ten = decode_label_map(bytes_of(part->body));
  CHECK(ten.count() == 10);
  CHECK(testing::regions_connected(ten));
  CHECK(part->get_header_value("X-Hspam-Generation") == std::to_string(m.at("generation").get<int>()));

  auto overlay = c.Get("/api/overlay?k=2");
  REQUIRE(overlay);
  CHECK(overlay->status == 200);
  CHECK(decode_image(bytes_of(overlay->body)).height == 24);

  auto att = c.Get("/api/attention");
  REQUIRE(att);
  CHECK(att->status == 200);

  auto index = c.Get("/");
  REQUIRE(index);
  CHECK(index->status == 200);
}

TEST_CASE("invalid requests map to 4xx") {
  const fs::path dir = testing::scratch_dir("serve_errors");
  Server server(dir, false);
  auto c = server.client();
  for (const char* path : {"/api/partition?k=0", "/api/partition?k=49", "/api/partition",
                           "/api/partition?k=abc", "/api/overlay?k=-3"}) {
    auto r = c.Get(path);
    REQUIRE(r);
    CHECK_MESSAGE(r->status == 400, path);
    CHECK(json::parse(r->body).contains("error"));
  }
  auto metrics = c.Get("/api/metrics?k=5");
  REQUIRE(metrics);
  CHECK(metrics->status == 404);

  auto bad_json = c.Post("/api/clicks", "[{", "application/json");
  REQUIRE(bad_json);
  CHECK(bad_json->status == 400);
  auto outside = c.Post("/api/clicks", R"([{"x": 99, "y": 0, "sign": "+"}])", "application/json");
  REQUIRE(outside);
  CHECK(outside->status == 400);
  auto bad_mode = c.Post("/api/params", R"({"attention_mode": "sideways"})", "application/json");
  REQUIRE(bad_mode);
  CHECK(bad_mode->status == 400);

  // Failed updates leave the generation alone.
  const json m = json::parse(c.Get("/api/meta")->body);
  CHECK(m.at("clicks") == 0);
}

TEST_CASE("clicks and params trigger rebuilds with new generations") {
  const fs::path dir = testing::scratch_dir("serve_rebuild");
  Server server(dir, true);
  auto c = server.client();
  const auto g0 = json::parse(c.Get("/api/meta")->body).at("generation").get<std::uint64_t>();

  auto posted = c.Post("/api/clicks", R"([{"x": 4, "y": 4, "sign": "+", "strength": 1}])",
                       "application/json");
  REQUIRE(posted);
  CHECK(posted->status == 200);
  const auto g1 = json::parse(posted->body).at("generation").get<std::uint64_t>();
  CHECK(g1 == g0 + 1);
  json m = json::parse(c.Get("/api/meta")->body);
  CHECK(m.at("generation") == g1);
  CHECK(m.at("clicks") == 1);
  CHECK(m.at("params").at("attention_mode") == "object");

  auto params = c.Post("/api/params", R"({"w_att": 0.5, "w_pos": 2})", "application/json");
  REQUIRE(params);
  CHECK(params->status == 200);
  const auto g2 = json::parse(params->body).at("generation").get<std::uint64_t>();
  CHECK(g2 == g1 + 1);
  m = json::parse(c.Get("/api/meta")->body);
  CHECK(m.at("params").at("w_att") == 0.5);
  CHECK(m.at("params").at("w_pos") == 2.0);

  auto part = c.Get("/api/partition?k=5");
  REQUIRE(part);
  CHECK(part->get_header_value("X-Hspam-Generation") == std::to_string(g2));
  CHECK(decode_label_map(bytes_of(part->body)).count() == 5);

  auto metrics = c.Get("/api/metrics?k=2");
  REQUIRE(metrics);
  CHECK(metrics->status == 200);
  const json report = json::parse(metrics->body);
  CHECK(report.at("k") == 2);
  CHECK(report.at("asa") == 1.0);
  CHECK(report.at("br") == 1.0);
}

TEST_CASE("concurrent readers always see a consistent generation") {
  const fs::path dir = testing::scratch_dir("serve_concurrency");
  Server server(dir, false);
  std::atomic<bool> ok{true};
  std::thread reader([&] {
    auto c = server.client();
    for (int i = 0; i < 30; ++i) {
      auto r = c.Get("/api/partition?k=7");
      if (!r || r->status != 200 || decode_label_map(bytes_of(r->body)).count() != 7 ||
          r->get_header_value("X-Hspam-Generation").empty()) {
        ok = false;
      }
    }
  });
  auto c = server.client();
  std::uint64_t last = 0;
  for (int i = 0; i < 4; ++i) {
    auto r = c.Post("/api/clicks",
                    R"([{"x": )" + std::to_string(3 + i) + R"(, "y": 3, "sign": "-"}])",
                    "application/json");
    REQUIRE(r);
    const auto g = json::parse(r->body).at("generation").get<std::uint64_t>();
    CHECK(g > last);
    last = g;
  }
  reader.join();
  CHECK(ok);
}

}  // TEST_SUITE
