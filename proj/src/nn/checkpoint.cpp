// Copyright 2026 The Amanda Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "amanda/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "amanda/error.hpp"

namespace amanda::nn {

namespace {

constexpr char kMagic[] = "AMTTS1";
constexpr std::size_t kMagicLen = 6;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

}  // namespace

const Mat<double>& Checkpoint::get(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t.value;
  throw ParseError("checkpoint: missing tensor '" + name + "'");
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  nlohmann::json header = ckpt.meta;
  header["tensors"] = nlohmann::json::array();
  for (const auto& t : ckpt.tensors) {
    header["tensors"].push_back({{"name", t.name},
                                 {"shape", {t.value.rows(), t.value.cols()}},
                                 {"dtype", "f32"}});
  }
  const std::string text = header.dump();
  std::string out(kMagic, kMagicLen);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  for (const auto& t : ckpt.tensors) {
    for (Index r = 0; r < t.value.rows(); ++r) {
      for (Index c = 0; c < t.value.cols(); ++c) {
        float f = static_cast<float>(t.value(r, c));
        char b[4];
        std::memcpy(b, &f, 4);
        out.append(b, 4);
      }
    }
  }
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < kMagicLen + 4 || bytes.compare(0, kMagicLen, kMagic) != 0)
    throw ParseError("checkpoint: bad magic bytes");
  std::uint32_t len = 0;
  std::memcpy(&len, bytes.data() + kMagicLen, 4);
  std::size_t pos = kMagicLen + 4;
  if (bytes.size() < pos + len) throw ParseError("checkpoint: truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(pos, len));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("checkpoint: header is not valid JSON: ") + e.what());
  }
  pos += len;
  Checkpoint ckpt;
  if (!header.contains("tensors") || !header["tensors"].is_array())
    throw ParseError("checkpoint: header lacks a tensors array");
  for (const auto& entry : header["tensors"]) {
    if (entry.value("dtype", "") != "f32") throw ParseError("checkpoint: unsupported dtype");
    const auto& shape = entry.at("shape");
    Index rows = shape.at(0).get<Index>();
    Index cols = shape.at(1).get<Index>();
    const std::size_t n = static_cast<std::size_t>(rows * cols);
    if (bytes.size() < pos + 4 * n)
      throw ParseError("checkpoint: truncated data for tensor '" + entry.at("name").get<std::string>() + "'");
    Mat<double> m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) {
        float f;
        std::memcpy(&f, bytes.data() + pos, 4);
        pos += 4;
        m(r, c) = f;
      }
    }
    ckpt.tensors.push_back({entry.at("name").get<std::string>(), std::move(m)});
  }
  if (pos != bytes.size()) throw ParseError("checkpoint: trailing bytes after tensor data");
  header.erase("tensors");
  ckpt.meta = std::move(header);
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("checkpoint: cannot open " + path.string() + " for writing");
  const std::string bytes = encode_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_checkpoint(ss.str());
}

}  // namespace amanda::nn
