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

namespace simgap {

/// Lowercase hex SHA-256 of a byte buffer.
std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& s);

/// Hash of one file's contents. Throws on IO failure.
std::string sha256_file(const std::string& path);

/// Deterministic hash over a directory tree: each regular file contributes
/// "relpath\n<hash>\n" in sorted relpath order, and the digest of that listing
/// is returned. Two trees with identical contents hash identically regardless
/// of mtime or traversal order.
std::string sha256_tree(const std::string& dir);

}  // namespace simgap
