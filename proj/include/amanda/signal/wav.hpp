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

// RIFF/WAVE mono 16-bit PCM. Samples map to [-1, 1) by division by 32768.

#include <filesystem>
#include <string>

#include "amanda/signal/audio.hpp"

namespace amanda::signal {

std::string encode_wav(const AudioClip& clip);
AudioClip decode_wav(const std::string& bytes);

void write_wav(const std::filesystem::path& path, const AudioClip& clip);
AudioClip read_wav(const std::filesystem::path& path);

}  // namespace amanda::signal
