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

// RAII wrappers over the C API for the command-line tools.

#ifndef HSPAM_TOOLS_HANDLES_HPP
#define HSPAM_TOOLS_HANDLES_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hspam/hspam.h"

namespace hspam_tools {

class Failure : public std::runtime_error {
 public:
  Failure(hspam_status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  hspam_status status() const { return status_; }

 private:
  hspam_status status_;
};

inline void check(hspam_status status) {
  if (status != HSPAM_OK) {
    std::string message = hspam_last_error();
    if (message.empty()) message = hspam_status_string(status);
    throw Failure(status, message);
  }
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using Image = std::unique_ptr<hspam_image, Deleter<hspam_image, hspam_image_free>>;
using Labels = std::unique_ptr<hspam_labels, Deleter<hspam_labels, hspam_labels_free>>;
using Features =
    std::unique_ptr<hspam_features, Deleter<hspam_features, hspam_features_free>>;
using Attention =
    std::unique_ptr<hspam_attention, Deleter<hspam_attention, hspam_attention_free>>;
using Sequence =
    std::unique_ptr<hspam_sequence, Deleter<hspam_sequence, hspam_sequence_free>>;

class Buffer {
 public:
  Buffer() = default;
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  ~Buffer() { hspam_buffer_free(&raw_); }

  hspam_buffer* out() { return &raw_; }
  std::string str() const {
    return std::string(reinterpret_cast<const char*>(raw_.data), raw_.size);
  }

 private:
  hspam_buffer raw_{};
};

inline Image load_image(const std::string& path) {
  hspam_image* p = nullptr;
  check(hspam_image_load(path.c_str(), &p));
  return Image(p);
}

inline Labels load_labels(const std::string& path) {
  hspam_labels* p = nullptr;
  check(hspam_labels_load(path.c_str(), &p));
  return Labels(p);
}

inline Labels grid_labels(int width, int height, int n) {
  hspam_labels* p = nullptr;
  check(hspam_labels_grid(width, height, n, &p));
  return Labels(p);
}

inline Features assemble_features(const hspam_image* image, const std::string& deep) {
  hspam_features* p = nullptr;
  check(hspam_features_assemble(image, deep.empty() ? nullptr : deep.c_str(), &p));
  return Features(p);
}

inline Attention load_attention(const std::string& path, int width, int height) {
  hspam_attention* p = nullptr;
  check(hspam_attention_load(path.c_str(), width, height, &p));
  return Attention(p);
}

inline Attention clicks_attention(const std::string& json, const hspam_attention* base,
                                  int width, int height) {
  hspam_attention* p = nullptr;
  check(hspam_attention_from_clicks(json.c_str(), base, width, height, &p));
  return Attention(p);
}

inline Sequence build(const hspam_labels* fine, const hspam_labels* objects,
                      const hspam_features* features, const hspam_attention* att,
                      const hspam_params& params) {
  hspam_sequence* p = nullptr;
  check(hspam_build(fine, objects, features, att, &params, &p));
  return Sequence(p);
}

inline Sequence load_sequence(const std::string& path) {
  hspam_sequence* p = nullptr;
  check(hspam_sequence_load(path.c_str(), &p));
  return Sequence(p);
}

inline Labels extract(const hspam_sequence* seq, const hspam_labels* fine, int k) {
  hspam_labels* p = nullptr;
  check(hspam_extract(seq, fine, k, &p));
  return Labels(p);
}

inline Image overlay(const hspam_image* image, const hspam_labels* labels,
                     unsigned char r, unsigned char g, unsigned char b) {
  hspam_image* p = nullptr;
  check(hspam_render_overlay(image, labels, r, g, b, &p));
  return Image(p);
}

inline std::string encode_png(const hspam_image* image) {
  Buffer buf;
  check(hspam_image_encode_png(image, buf.out()));
  return buf.str();
}

inline std::string encode_png(const hspam_labels* labels) {
  Buffer buf;
  check(hspam_labels_encode_png(labels, buf.out()));
  return buf.str();
}

inline std::string encode_png(const hspam_attention* att) {
  Buffer buf;
  check(hspam_attention_encode_png(att, buf.out()));
  return buf.str();
}

inline hspam_metrics evaluate(const hspam_labels* labels,
                              const std::vector<const hspam_labels*>& gts,
                              const hspam_labels* coarser, int eps) {
  hspam_metrics m{};
  check(hspam_evaluate(labels, gts.data(), gts.size(), coarser, eps, &m));
  return m;
}

const char* attention_mode_name(hspam_attention_mode mode);
hspam_attention_mode attention_mode_from_name(const std::string& name);

}  // namespace hspam_tools

#endif  // HSPAM_TOOLS_HANDLES_HPP
