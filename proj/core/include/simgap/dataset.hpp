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

#include <array>
#include <string>
#include <vector>

#include "simgap/camera.hpp"
#include "simgap/episode.hpp"
#include "simgap/render.hpp"

namespace simgap {

struct FrameRef {
  int episode = 0;
  int frame = 0;
  std::string image_rel;  // path under the dataset root
  double steering = 0.0;  // expert label, quantized to 6 decimals on disk
  VehicleState pose;
  double lateral = 0.0;
  double heading_err = 0.0;
};

struct Dataset {
  std::string root;
  std::string style;  // render style name
  uint64_t seed = 0;
  int image_width = 64;
  int image_height = 48;
  std::vector<FrameRef> frames;
  std::vector<uint64_t> world_seeds;  // one entry per episode
  int episode_count() const { return static_cast<int>(world_seeds.size()); }
};

struct CollectParams {
  CenterlineParams road;
  double lane_width = 3.5;
  EpisodeParams episode;
  Camera camera = Camera::standard(64, 48);
  RenderStyle style = RenderStyle::kSim;
  int target_frames = 2000;  // whole episodes are driven, the tail is trimmed
  int max_episodes = 64;
};

/// Drives expert episodes over freshly generated worlds until target_frames
/// frames exist, rendering every frame in the chosen style and writing
/// images plus a dataset/1 manifest under out_dir. Deterministic in
/// (params, seed).
Dataset collect_dataset(const CollectParams& params, uint64_t seed, const std::string& out_dir);

/// dataset/1: { "format": "dataset/1", "style", "seed", "imageWidth",
/// "imageHeight", "episodes": [ { "id", "worldSeed", "frames": [ { "image",
/// "steering": "%.6f", "pose": [x,y,heading], "lateral", "headingErr" } ] } ] }
void save_manifest(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& dir);

/// Steering quantization used on disk; labels compare exactly after a
/// save/load round trip.
double quantize_steering(double a);
std::string steering_string(double a);

/// Eight steering bins. assign() maps [-1,1] commands to 0..7; values in
/// [edge_i, edge_{i+1}) fall in bin i and 1.0 closes the last bin.
struct BinSpec {
  static const std::array<double, 9>& edges();
  static int assign(double a);
  static constexpr int kCount = 8;
};

/// Per-bin counts over labels.
std::array<int64_t, BinSpec::kCount> bin_histogram(const std::vector<double>& labels);

/// Index plan that equalizes bin mass: every original index once, in order,
/// then for each nonempty bin (ascending) enough with-replacement redraws
/// from that bin (seeded per bin) to reach the largest bin count. Empty bins
/// stay empty.
std::vector<int> balanced_index_plan(const std::vector<double>& labels, uint64_t seed);

/// Episode-level split. Episodes are shuffled by seed and partitioned by the
/// fractions; every episode lands in exactly one part and train is never
/// empty for nonzero fractions.
struct EpisodeSplit {
  std::vector<int> train, val, test;
};
EpisodeSplit split_episodes(int episode_count, double train_frac, double val_frac, uint64_t seed);

/// Frame indices of ds belonging to the given episode set, in manifest order.
std::vector<int> frames_of_episodes(const Dataset& ds, const std::vector<int>& episodes);

/// All frame images decoded once into an interleaved uint8 cache; training
/// converts slices to [-1,1] float batches on the fly.
struct PixelCache {
  int width = 0, height = 0;
  std::vector<std::vector<uint8_t>> frames;
};
PixelCache load_pixel_cache(const Dataset& ds);

}  // namespace simgap
