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

#include "amanda/tts/vocabulary.hpp"

#include <cctype>

#include "amanda/error.hpp"

namespace amanda::tts {

const std::string& Vocabulary::symbols() {
  static const std::string kSymbols = " abcdefghijklmnopqrstuvwxyz0123456789'.,?!-:;";
  return kSymbols;
}

Index Vocabulary::size() { return static_cast<Index>(symbols().size()) + 2; }

Index Vocabulary::id_of(char c) {
  const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto pos = symbols().find(lower);
  return pos == std::string::npos ? kUnknown : static_cast<Index>(pos) + 2;
}

TextSequence Vocabulary::encode(std::string_view text) {
  TextSequence seq;
  for (char c : text) seq.ids.push_back(id_of(c));
  if (seq.ids.empty()) throw ValidationError("text sequence is empty");
  return seq;
}

std::string Vocabulary::decode(const TextSequence& seq) {
  std::string out;
  for (Index id : seq.ids) {
    if (id >= 2 && id < size()) out.push_back(symbols()[static_cast<std::size_t>(id - 2)]);
    else out.push_back('?');
  }
  return out;
}

}  // namespace amanda::tts
