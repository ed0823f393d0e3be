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

#include "simgap/image.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace simgap {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

uint32_t get_u32(const uint8_t* p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

void put_chunk(std::vector<uint8_t>& out, const char type[4], const uint8_t* data, size_t len) {
  put_u32(out, static_cast<uint32_t>(len));
  size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  if (len) out.insert(out.end(), data, data + len);
  uint32_t crc =
      crc32(0, out.data() + start, static_cast<uInt>(out.size() - start));
  put_u32(out, crc);
}

int paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

std::vector<uint8_t> encode_png(const Image& img) {
  if (img.width <= 0 || img.height <= 0) throw std::invalid_argument("encode_png: empty image");
  const size_t stride = static_cast<size_t>(img.width) * 3;
  std::vector<uint8_t> raw((stride + 1) * img.height);
  for (int y = 0; y < img.height; ++y) {
    raw[(stride + 1) * y] = 0;  // filter None keeps output deterministic
    std::memcpy(&raw[(stride + 1) * y + 1], &img.pixels[stride * y], stride);
  }
  uLongf zcap = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> z(zcap);
  if (compress2(z.data(), &zcap, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw std::runtime_error("encode_png: deflate failed");
  z.resize(zcap);

  std::vector<uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  uint8_t ihdr[13];
  ihdr[0] = static_cast<uint8_t>(img.width >> 24);
  ihdr[1] = static_cast<uint8_t>(img.width >> 16);
  ihdr[2] = static_cast<uint8_t>(img.width >> 8);
  ihdr[3] = static_cast<uint8_t>(img.width);
  ihdr[4] = static_cast<uint8_t>(img.height >> 24);
  ihdr[5] = static_cast<uint8_t>(img.height >> 16);
  ihdr[6] = static_cast<uint8_t>(img.height >> 8);
  ihdr[7] = static_cast<uint8_t>(img.height);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 2;   // RGB
  ihdr[10] = 0;  // deflate
  ihdr[11] = 0;  // adaptive filtering
  ihdr[12] = 0;  // no interlace
  put_chunk(out, "IHDR", ihdr, sizeof(ihdr));
  put_chunk(out, "IDAT", z.data(), z.size());
  put_chunk(out, "IEND", nullptr, 0);
  return out;
}

Image decode_png(const uint8_t* data, size_t len) {
  static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (len < 8 || std::memcmp(data, sig, 8) != 0) throw std::runtime_error("decode_png: bad signature");
  size_t pos = 8;
  int width = 0, height = 0;
  std::vector<uint8_t> idat;
  bool done = false;
  while (pos + 12 <= len && !done) {
    uint32_t clen = get_u32(data + pos);
    const uint8_t* type = data + pos + 4;
    const uint8_t* body = data + pos + 8;
    if (pos + 12 + clen > len) throw std::runtime_error("decode_png: truncated chunk");
    if (std::memcmp(type, "IHDR", 4) == 0) {
      width = static_cast<int>(get_u32(body));
      height = static_cast<int>(get_u32(body + 4));
      if (body[8] != 8 || body[9] != 2 || body[12] != 0)
        throw std::runtime_error("decode_png: only 8-bit non-interlaced RGB supported");
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), body, body + clen);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      done = true;
    }
    pos += 12 + clen;
  }
  if (width <= 0 || height <= 0 || idat.empty()) throw std::runtime_error("decode_png: missing data");

  const size_t stride = static_cast<size_t>(width) * 3;
  std::vector<uint8_t> raw((stride + 1) * height);
  uLongf rawlen = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &rawlen, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      rawlen != raw.size())
    throw std::runtime_error("decode_png: inflate failed");

  Image img(width, height);
  std::vector<uint8_t> prev(stride, 0);
  for (int y = 0; y < height; ++y) {
    uint8_t filter = raw[(stride + 1) * y];
    const uint8_t* src = &raw[(stride + 1) * y + 1];
    uint8_t* dst = &img.pixels[stride * y];
    for (size_t i = 0; i < stride; ++i) {
      int a = i >= 3 ? dst[i - 3] : 0;
      int b = prev[i];
      int c = i >= 3 ? prev[i - 3] : 0;
      int x = src[i];
      switch (filter) {
        case 0: dst[i] = static_cast<uint8_t>(x); break;
        case 1: dst[i] = static_cast<uint8_t>(x + a); break;
        case 2: dst[i] = static_cast<uint8_t>(x + b); break;
        case 3: dst[i] = static_cast<uint8_t>(x + (a + b) / 2); break;
        case 4: dst[i] = static_cast<uint8_t>(x + paeth(a, b, c)); break;
        default: throw std::runtime_error("decode_png: bad filter byte");
      }
    }
    std::memcpy(prev.data(), dst, stride);
  }
  return img;
}

void write_png(const std::string& path, const Image& img) {
  auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_png: cannot open " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write_png: write failed for " + path);
}

Image read_png(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_png: cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_png(bytes.data(), bytes.size());
}

Tensor image_to_tensor(const Image& img) {
  Tensor t({3, img.height, img.width});
  const float k = 2.0f / 255.0f;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        t.data[(static_cast<size_t>(c) * img.height + y) * img.width + x] =
            img.pixels[3 * (static_cast<size_t>(y) * img.width + x) + c] * k - 1.0f;
  return t;
}

Image tensor_to_image(const Tensor& t) {
  if (t.ndim() != 3 || t.dim(0) != 3) throw std::invalid_argument("tensor_to_image: want (3,H,W)");
  int h = t.dim(1), w = t.dim(2);
  Image img(w, h);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        float v = t.data[(static_cast<size_t>(c) * h + y) * w + x];
        v = std::min(1.0f, std::max(-1.0f, v));
        img.pixels[3 * (static_cast<size_t>(y) * w + x) + c] =
            static_cast<uint8_t>(std::lround((v + 1.0f) * 0.5f * 255.0f));
      }
  return img;
}

double image_mean_abs_diff(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("image_mean_abs_diff: size mismatch");
  double acc = 0;
  for (size_t i = 0; i < a.pixels.size(); ++i)
    acc += std::abs(int(a.pixels[i]) - int(b.pixels[i]));
  return acc / (255.0 * static_cast<double>(a.pixels.size()));
}

}  // namespace simgap
