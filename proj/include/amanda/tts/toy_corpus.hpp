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

// Synthetic copy task: each of eight symbols ('a'..'h') expands to its own
// fixed block of frames, so the ideal alignment is a staircase diagonal.

#include <cstdint>
#include <vector>

#include "amanda/tts/train.hpp"

namespace amanda::tts {

struct CopyTaskSpec {
  Index symbols = 8;
  Index frames_per_symbol = 4;
  Index n_mels = 8;
  Index min_length = 2;
  Index max_length = 5;
  std::uint64_t seed = 1234;
};

// symbols x (frames_per_symbol * n_mels): symbol i's frames, row-flattened.
Mat copy_task_patterns(const CopyTaskSpec& spec);

Example copy_task_example(const std::vector<Index>& symbol_indices, const Mat& patterns, const CopyTaskSpec& spec);

std::vector<Example> copy_task_corpus(const CopyTaskSpec& spec, std::size_t count);

// Fraction of attention mass with |(t + 0.5)/T_y - (k + 0.5)/T_x| < band,
// averaged over rows.
double diagonal_mass(const Mat& alpha, double band = 0.2);

}  // namespace amanda::tts
