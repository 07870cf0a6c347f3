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

#pragma once

// Checkpoint container: the magic "AMTTS1", a little-endian uint32 byte
// length, a UTF-8 JSON header, then each tensor as row-major little-endian
// float32 in header order.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "amanda/nn/tensor.hpp"

namespace amanda::nn {

struct NamedTensor {
  std::string name;
  Mat<double> value;
};

struct Checkpoint {
  nlohmann::json meta = nlohmann::json::object();  // everything in the header besides "tensors"
  std::vector<NamedTensor> tensors;

  const Mat<double>& get(const std::string& name) const;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace amanda::nn
