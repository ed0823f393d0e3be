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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "simgap/optim.hpp"
#include "simgap/tape.hpp"

namespace simgap {

/// Single-file checkpoint, schema "ckpt/1": a magic line, a little-endian
/// u64 JSON header length, the JSON header, then one little-endian f32 blob
/// holding every tensor back to back. The header records each tensor's shape
/// and float offset, so files are self-describing and diffable via metadata
/// alone. Loading restores values into already-constructed stores/optimizers
/// and fails loudly on any name or shape mismatch.
struct CheckpointRefs {
  std::vector<std::pair<std::string, ParamStoreT<float>*>> stores;
  std::vector<std::pair<std::string, AdamT<float>*>> optims;
  std::vector<std::pair<std::string, Rng*>> rngs;
};

void save_checkpoint(const std::string& path, const nlohmann::json& meta,
                     const CheckpointRefs& refs);

/// Returns the meta object. refs must name the same stores/optims/rngs that
/// were saved (extra saved entries are an error, missing ones too).
nlohmann::json load_checkpoint(const std::string& path, const CheckpointRefs& refs);

nlohmann::json read_checkpoint_meta(const std::string& path);

}  // namespace simgap
