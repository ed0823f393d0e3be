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

#include "simgap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace simgap {

namespace fs = std::filesystem;
using nlohmann::json;

double quantize_steering(double a) { return std::round(a * 1e6) / 1e6; }

std::string steering_string(double a) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", a);
  return buf;
}

Dataset collect_dataset(const CollectParams& params, uint64_t seed, const std::string& out_dir) {
  if (params.target_frames <= 0) throw std::invalid_argument("collect: target_frames must be > 0");
  fs::create_directories(out_dir);

  Dataset ds;
  ds.root = out_dir;
  ds.style = render_style_name(params.style);
  ds.seed = seed;
  ds.image_width = params.camera.width;
  ds.image_height = params.camera.height;

  int total = 0;
  for (int ep = 0; ep < params.max_episodes && total < params.target_frames; ++ep) {
    uint64_t world_seed = derive_seed(seed, "world:" + std::to_string(ep));
    World world = generate_world(params.road, params.lane_width, world_seed);
    auto steps =
        run_expert_episode(world, params.episode, derive_seed(seed, "drive:" + std::to_string(ep)));
    if (steps.empty()) continue;
    ds.world_seeds.push_back(world_seed);

    char epdir[32];
    std::snprintf(epdir, sizeof(epdir), "ep%03d", ep);
    fs::create_directories(fs::path(out_dir) / "images" / epdir);

    for (size_t i = 0; i < steps.size() && total < params.target_frames; ++i, ++total) {
      const StepRecord& rec = steps[i];
      Rng frame_rng(derive_seed(seed, "render:" + std::to_string(ep) + ":" + std::to_string(i)));
      Image img = render_view(world, params.camera, rec.state.pos, rec.state.heading, params.style,
                              &frame_rng);
      char fname[32];
      std::snprintf(fname, sizeof(fname), "f%05d.png", static_cast<int>(i));
      std::string rel = std::string("images/") + epdir + "/" + fname;
      write_png((fs::path(out_dir) / rel).string(), img);

      FrameRef fr;
      fr.episode = ep;
      fr.frame = static_cast<int>(i);
      fr.image_rel = rel;
      fr.steering = quantize_steering(rec.expert);
      fr.pose = rec.state;
      fr.lateral = rec.lateral;
      fr.heading_err = rec.heading_err;
      ds.frames.push_back(std::move(fr));
    }
  }
  if (total < params.target_frames)
    throw std::runtime_error("collect: episode budget exhausted before target_frames");

  save_manifest(ds, (fs::path(out_dir) / "manifest.json").string());
  return ds;
}

void save_manifest(const Dataset& ds, const std::string& path) {
  json j;
  j["format"] = "dataset/1";
  j["style"] = ds.style;
  j["seed"] = ds.seed;
  j["imageWidth"] = ds.image_width;
  j["imageHeight"] = ds.image_height;
  json episodes = json::array();
  int cur_ep = -1;
  json* cur = nullptr;
  for (const FrameRef& fr : ds.frames) {
    if (fr.episode != cur_ep) {
      cur_ep = fr.episode;
      json e;
      e["id"] = fr.episode;
      size_t ep_index = episodes.size();
      if (ep_index < ds.world_seeds.size()) e["worldSeed"] = ds.world_seeds[ep_index];
      e["frames"] = json::array();
      episodes.push_back(std::move(e));
      cur = &episodes.back();
    }
    json f;
    f["image"] = fr.image_rel;
    f["steering"] = steering_string(fr.steering);
    f["pose"] = {fr.pose.pos.x, fr.pose.pos.y, fr.pose.heading};
    f["lateral"] = fr.lateral;
    f["headingErr"] = fr.heading_err;
    (*cur)["frames"].push_back(std::move(f));
  }
  j["episodes"] = std::move(episodes);

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("save_manifest: cannot open " + path);
  out << j.dump(2) << "\n";
}

Dataset load_dataset(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw std::runtime_error("load_dataset: no manifest under " + dir);
  json j = json::parse(in);
  if (j.value("format", "") != "dataset/1")
    throw std::runtime_error("load_dataset: not a dataset/1 manifest in " + dir);

  Dataset ds;
  ds.root = dir;
  ds.style = j.at("style").get<std::string>();
  ds.seed = j.at("seed").get<uint64_t>();
  ds.image_width = j.at("imageWidth").get<int>();
  ds.image_height = j.at("imageHeight").get<int>();
  for (const auto& e : j.at("episodes")) {
    int id = e.at("id").get<int>();
    ds.world_seeds.push_back(e.value("worldSeed", static_cast<uint64_t>(0)));
    int idx = 0;
    for (const auto& f : e.at("frames")) {
      FrameRef fr;
      fr.episode = id;
      fr.frame = idx++;
      fr.image_rel = f.at("image").get<std::string>();
      fr.steering = std::stod(f.at("steering").get<std::string>());
      auto pose = f.at("pose");
      fr.pose.pos = {pose[0].get<double>(), pose[1].get<double>()};
      fr.pose.heading = pose[2].get<double>();
      fr.lateral = f.at("lateral").get<double>();
      fr.heading_err = f.at("headingErr").get<double>();
      ds.frames.push_back(std::move(fr));
    }
  }
  return ds;
}

const std::array<double, 9>& BinSpec::edges() {
  static const std::array<double, 9> e = {-1.0,   -0.075, -0.05, -0.025, 0.0,
                                          0.025, 0.05,   0.075, 1.0};
  return e;
}

int BinSpec::assign(double a) {
  const auto& e = edges();
  if (a < e.front() || a > e.back()) throw std::invalid_argument("bin assign: command out of range");
  for (int i = 0; i < kCount - 1; ++i)
    if (a < e[static_cast<size_t>(i + 1)]) return i;
  return kCount - 1;  // includes the closing edge 1.0
}

std::array<int64_t, BinSpec::kCount> bin_histogram(const std::vector<double>& labels) {
  std::array<int64_t, BinSpec::kCount> h{};
  for (double v : labels) h[static_cast<size_t>(BinSpec::assign(v))] += 1;
  return h;
}

std::vector<int> balanced_index_plan(const std::vector<double>& labels, uint64_t seed) {
  std::vector<std::vector<int>> members(BinSpec::kCount);
  for (size_t i = 0; i < labels.size(); ++i)
    members[static_cast<size_t>(BinSpec::assign(labels[i]))].push_back(static_cast<int>(i));
  int64_t largest = 0;
  for (const auto& m : members) largest = std::max(largest, static_cast<int64_t>(m.size()));

  std::vector<int> plan;
  plan.reserve(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) plan.push_back(static_cast<int>(i));
  for (int b = 0; b < BinSpec::kCount; ++b) {
    const auto& m = members[static_cast<size_t>(b)];
    if (m.empty()) continue;
    Rng rng(derive_seed(seed, "balance:bin:" + std::to_string(b)));
    for (int64_t k = static_cast<int64_t>(m.size()); k < largest; ++k)
      plan.push_back(m[static_cast<size_t>(rng.uniform_int(m.size()))]);
  }
  return plan;
}

EpisodeSplit split_episodes(int episode_count, double train_frac, double val_frac, uint64_t seed) {
  if (episode_count <= 0) throw std::invalid_argument("split: no episodes");
  if (train_frac < 0 || val_frac < 0 || train_frac + val_frac > 1.0)
    throw std::invalid_argument("split: bad fractions");
  std::vector<int> order(static_cast<size_t>(episode_count));
  for (int i = 0; i < episode_count; ++i) order[static_cast<size_t>(i)] = i;
  Rng rng(derive_seed(seed, "episode-split"));
  for (int i = episode_count - 1; i > 0; --i) {
    int k = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(i) + 1));
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(k)]);
  }
  int n_train = static_cast<int>(std::round(train_frac * episode_count));
  int n_val = static_cast<int>(std::round(val_frac * episode_count));
  if (train_frac > 0 && n_train == 0) n_train = 1;
  n_train = std::min(n_train, episode_count);
  n_val = std::min(n_val, episode_count - n_train);

  EpisodeSplit sp;
  for (int i = 0; i < episode_count; ++i) {
    int ep = order[static_cast<size_t>(i)];
    if (i < n_train)
      sp.train.push_back(ep);
    else if (i < n_train + n_val)
      sp.val.push_back(ep);
    else
      sp.test.push_back(ep);
  }
  std::sort(sp.train.begin(), sp.train.end());
  std::sort(sp.val.begin(), sp.val.end());
  std::sort(sp.test.begin(), sp.test.end());
  return sp;
}

std::vector<int> frames_of_episodes(const Dataset& ds, const std::vector<int>& episodes) {
  std::vector<int> out;
  for (size_t i = 0; i < ds.frames.size(); ++i)
    if (std::find(episodes.begin(), episodes.end(), ds.frames[i].episode) != episodes.end())
      out.push_back(static_cast<int>(i));
  return out;
}

PixelCache load_pixel_cache(const Dataset& ds) {
  PixelCache cache;
  cache.width = ds.image_width;
  cache.height = ds.image_height;
  cache.frames.reserve(ds.frames.size());
  for (const FrameRef& fr : ds.frames) {
    Image img = read_png((fs::path(ds.root) / fr.image_rel).string());
    if (img.width != ds.image_width || img.height != ds.image_height)
      throw std::runtime_error("pixel cache: image size mismatch at " + fr.image_rel);
    cache.frames.push_back(std::move(img.pixels));
  }
  return cache;
}

}  // namespace simgap
