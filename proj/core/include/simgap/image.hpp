// Copyright 2026 The simgap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simgap/tensor.hpp"

namespace simgap {

/// 8-bit RGB raster, interleaved row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // 3 * width * height bytes

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(3) * w * h, 0) {}

  uint8_t* px(int x, int y) { return &pixels[3 * (static_cast<size_t>(y) * width + x)]; }
  const uint8_t* px(int x, int y) const {
    return &pixels[3 * (static_cast<size_t>(y) * width + x)];
  }
};

/// PNG codec for 8-bit RGB. Writing always emits filter type 0 rows so the
/// byte stream depends only on pixel content and the fixed zlib level.
void write_png(const std::string& path, const Image& img);
Image read_png(const std::string& path);
std::vector<uint8_t> encode_png(const Image& img);
Image decode_png(const uint8_t* data, size_t len);

/// Byte value b maps to b / 255 * 2 - 1, so [0,255] covers [-1,1].
/// Tensors are (C,H,W) with C = 3 unless batched by the caller.
Tensor image_to_tensor(const Image& img);
Image tensor_to_image(const Tensor& t);  // clamps to [-1,1] and rounds to nearest

double image_mean_abs_diff(const Image& a, const Image& b);

}  // namespace simgap
