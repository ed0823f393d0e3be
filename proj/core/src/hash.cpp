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

#include "simgap/hash.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace simgap {

namespace {

std::string hex(const unsigned char* d, unsigned n) {
  static const char* k = "0123456789abcdef";
  std::string out(2 * n, '0');
  for (unsigned i = 0; i < n; ++i) {
    out[2 * i] = k[d[i] >> 4];
    out[2 * i + 1] = k[d[i] & 15];
  }
  return out;
}

struct Digest {
  EVP_MD_CTX* ctx;
  Digest() : ctx(EVP_MD_CTX_new()) {
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("sha256: init failed");
  }
  ~Digest() { EVP_MD_CTX_free(ctx); }
  void update(const void* p, size_t n) {
    if (EVP_DigestUpdate(ctx, p, n) != 1) throw std::runtime_error("sha256: update failed");
  }
  std::string finish() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned n = 0;
    if (EVP_DigestFinal_ex(ctx, md, &n) != 1) throw std::runtime_error("sha256: final failed");
    return hex(md, n);
  }
};

}  // namespace

std::string sha256_hex(const void* data, size_t len) {
  Digest d;
  d.update(data, len);
  return d.finish();
}

std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("sha256_file: cannot open " + path);
  Digest d;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    std::streamsize got = in.gcount();
    if (got > 0) d.update(buf, static_cast<size_t>(got));
  }
  return d.finish();
}

std::string sha256_tree(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error("sha256_tree: not a directory: " + dir);
  std::vector<std::string> rels;
  for (auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) rels.push_back(fs::relative(e.path(), dir).generic_string());
  std::sort(rels.begin(), rels.end());
  std::ostringstream listing;
  for (auto& r : rels) listing << r << "\n" << sha256_file((fs::path(dir) / r).string()) << "\n";
  return sha256_hex(listing.str());
}

}  // namespace simgap
