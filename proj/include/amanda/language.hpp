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

#include "amanda/error.hpp"

namespace amanda {

enum class Language { En, Zh };

inline std::string_view language_name(Language l) { return l == Language::En ? "en" : "zh"; }

inline Language parse_language(std::string_view s) {
  if (s == "en") return Language::En;
  if (s == "zh") return Language::Zh;
  throw ValidationError("unknown language '" + std::string(s) + "' (expected en or zh)");
}

}  // namespace amanda
