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

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace amanda::tts {

using Index = Eigen::Index;

// Character ids x_1..x_{T_x}. Never empty once produced by encode_text.
struct TextSequence {
  std::vector<Index> ids;

  Index length() const { return static_cast<Index>(ids.size()); }
};

// Fixed character inventory: padding, unknown, then the symbols below.
class Vocabulary {
 public:
  static constexpr Index kPad = 0;
  static constexpr Index kUnknown = 1;

  static const std::string& symbols();
  static Index size();

  // Lowercases ASCII letters; anything outside the inventory maps to kUnknown.
  static TextSequence encode(std::string_view text);
  static Index id_of(char c);
  static std::string decode(const TextSequence& seq);
};

}  // namespace amanda::tts
