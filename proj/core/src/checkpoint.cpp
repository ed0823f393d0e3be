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

#include "simgap/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace simgap {

namespace {

constexpr char kMagic[] = "simgap-ckpt/1\n";

struct BlobWriter {
  std::vector<float> data;

  int64_t append(const Tensor& t) {
    int64_t off = static_cast<int64_t>(data.size());
    data.insert(data.end(), t.data.begin(), t.data.end());
    return off;
  }
};

nlohmann::json shape_json(const std::vector<int>& shape) {
  return nlohmann::json(shape);
}

std::vector<int> shape_from_json(const nlohmann::json& j) {
  return j.get<std::vector<int>>();
}

void write_u64_le(std::ostream& out, uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), 8);
}

uint64_t read_u64_le(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw std::runtime_error("checkpoint: truncated header length");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
  return v;
}

// Native byte order is little-endian on every target this builds for; the
// static_assert below keeps that assumption loud.
static_assert(sizeof(float) == 4, "f32 blob layout");

nlohmann::json open_header(std::ifstream& in, const std::string& path) {
  std::string magic(sizeof(kMagic) - 1, '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (!in || magic != kMagic) throw std::runtime_error("checkpoint: bad magic in " + path);
  uint64_t hlen = read_u64_le(in);
  std::string htext(hlen, '\0');
  in.read(htext.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw std::runtime_error("checkpoint: truncated header in " + path);
  return nlohmann::json::parse(htext);
}

void read_tensor(std::ifstream& in, std::streampos blob_start, int64_t offset, Tensor& t) {
  in.seekg(blob_start + static_cast<std::streamoff>(offset * 4));
  in.read(reinterpret_cast<char*>(t.data.data()),
          static_cast<std::streamsize>(t.data.size() * 4));
  if (!in) throw std::runtime_error("checkpoint: truncated tensor blob");
}

}  // namespace

void save_checkpoint(const std::string& path, const nlohmann::json& meta,
                     const CheckpointRefs& refs) {
  BlobWriter blob;
  nlohmann::json header;
  header["schema"] = "ckpt/1";
  header["meta"] = meta;

  nlohmann::json jstores = nlohmann::json::array();
  for (const auto& [sname, store] : refs.stores) {
    nlohmann::json js;
    js["name"] = sname;
    nlohmann::json jparams = nlohmann::json::array();
    for (size_t i = 0; i < store->size(); ++i) {
      const auto& p = store->at(i);
      jparams.push_back({{"name", p.name},
                         {"shape", shape_json(p.value.shape)},
                         {"offset", blob.append(p.value)}});
    }
    js["params"] = jparams;
    jstores.push_back(js);
  }
  header["stores"] = jstores;

  nlohmann::json joptims = nlohmann::json::array();
  for (const auto& [oname, adam] : refs.optims) {
    nlohmann::json jo;
    jo["name"] = oname;
    jo["t"] = adam->step_count();
    nlohmann::json jslots = nlohmann::json::array();
    for (const auto& [pname, slot] : adam->slots()) {
      jslots.push_back({{"param", pname},
                        {"shape", shape_json(slot.m.shape)},
                        {"m_offset", blob.append(slot.m)},
                        {"v_offset", blob.append(slot.v)}});
    }
    jo["slots"] = jslots;
    joptims.push_back(jo);
  }
  header["optims"] = joptims;

  nlohmann::json jrngs = nlohmann::json::array();
  for (const auto& [rname, rng] : refs.rngs)
    jrngs.push_back({{"name", rname}, {"state", rng->state()}});
  header["rngs"] = jrngs;
  header["blob_floats"] = static_cast<int64_t>(blob.data.size());

  std::string htext = header.dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  out.write(kMagic, sizeof(kMagic) - 1);
  write_u64_le(out, htext.size());
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  out.write(reinterpret_cast<const char*>(blob.data.data()),
            static_cast<std::streamsize>(blob.data.size() * 4));
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

nlohmann::json load_checkpoint(const std::string& path, const CheckpointRefs& refs) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  nlohmann::json header = open_header(in, path);
  if (header.value("schema", "") != "ckpt/1")
    throw std::runtime_error("checkpoint: unsupported schema in " + path);
  std::streampos blob_start = in.tellg();

  const auto& jstores = header.at("stores");
  if (jstores.size() != refs.stores.size())
    throw std::runtime_error("checkpoint: store count mismatch in " + path);
  for (size_t si = 0; si < refs.stores.size(); ++si) {
    const auto& [sname, store] = refs.stores[si];
    const auto& js = jstores[si];
    if (js.at("name") != sname)
      throw std::runtime_error("checkpoint: expected store " + sname + ", found " +
                               js.at("name").get<std::string>());
    const auto& jparams = js.at("params");
    if (jparams.size() != store->size())
      throw std::runtime_error("checkpoint: param count mismatch in store " + sname);
    for (size_t pi = 0; pi < store->size(); ++pi) {
      auto& p = store->at(pi);
      const auto& jp = jparams[pi];
      if (jp.at("name") != p.name)
        throw std::runtime_error("checkpoint: param order mismatch at " + p.name);
      if (shape_from_json(jp.at("shape")) != p.value.shape)
        throw std::runtime_error("checkpoint: shape mismatch at " + p.name);
      read_tensor(in, blob_start, jp.at("offset").get<int64_t>(), p.value);
    }
  }

  const auto& joptims = header.at("optims");
  if (joptims.size() != refs.optims.size())
    throw std::runtime_error("checkpoint: optimizer count mismatch in " + path);
  for (size_t oi = 0; oi < refs.optims.size(); ++oi) {
    const auto& [oname, adam] = refs.optims[oi];
    const auto& jo = joptims[oi];
    if (jo.at("name") != oname)
      throw std::runtime_error("checkpoint: expected optimizer " + oname);
    adam->set_step_count(jo.at("t").get<int64_t>());
    adam->slots().clear();
    for (const auto& jslot : jo.at("slots")) {
      auto shape = shape_from_json(jslot.at("shape"));
      typename Adam::Slot slot{Tensor::zeros(shape), Tensor::zeros(shape)};
      read_tensor(in, blob_start, jslot.at("m_offset").get<int64_t>(), slot.m);
      read_tensor(in, blob_start, jslot.at("v_offset").get<int64_t>(), slot.v);
      adam->slots().emplace(jslot.at("param").get<std::string>(), std::move(slot));
    }
  }

  const auto& jrngs = header.at("rngs");
  if (jrngs.size() != refs.rngs.size())
    throw std::runtime_error("checkpoint: rng count mismatch in " + path);
  for (size_t ri = 0; ri < refs.rngs.size(); ++ri) {
    const auto& [rname, rng] = refs.rngs[ri];
    const auto& jr = jrngs[ri];
    if (jr.at("name") != rname) throw std::runtime_error("checkpoint: expected rng " + rname);
    rng->set_state(jr.at("state").get<std::string>());
  }

  return header.at("meta");
}

nlohmann::json read_checkpoint_meta(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  nlohmann::json header = open_header(in, path);
  nlohmann::json out;
  out["meta"] = header.at("meta");
  out["schema"] = header.value("schema", "");
  out["blob_floats"] = header.value("blob_floats", 0);
  nlohmann::json stores = nlohmann::json::array();
  for (const auto& js : header.at("stores")) {
    int64_t count = 0;
    for (const auto& jp : js.at("params")) {
      int64_t n = 1;
      for (int d : shape_from_json(jp.at("shape"))) n *= d;
      count += n;
    }
    stores.push_back({{"name", js.at("name")}, {"params", js.at("params").size()},
                      {"floats", count}});
  }
  out["stores"] = stores;
  return out;
}

}  // namespace simgap
