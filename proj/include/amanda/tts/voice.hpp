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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "amanda/signal/audio.hpp"
#include "amanda/signal/mel.hpp"
#include "amanda/tts/model.hpp"
#include "amanda/tts/train.hpp"

namespace amanda::tts {

// Feature extraction shared by training data and the vocoder.
struct AudioFeatures {
  signal::StftConfig stft;
  signal::MelConfig mel;

  nlohmann::json to_json() const;
  static AudioFeatures from_json(const nlohmann::json& j);
  Mat filterbank() const;
  void validate() const;
};

struct Voice {
  TtsModelParams params;
  AudioFeatures features;
  long step = 0;

  static Voice load(const std::filesystem::path& checkpoint);
};

void save_voice(const std::filesystem::path& path, const TtsModelParams& params, const AudioFeatures& features,
                long step);

struct SpeechOptions {
  Index max_frames_per_sentence = 400;
  int griffin_lim_iterations = 32;
  std::size_t sentence_split_chars = 200;  // longer texts are synthesized sentence by sentence
};

struct Speech {
  signal::AudioClip audio;
  std::vector<Index> stop_steps;  // one per synthesized chunk
};

std::vector<std::string> split_sentences(std::string_view text);
Speech speak(const Voice& voice, std::string_view text, const SpeechOptions& opts = {});

// Samples produced by inverting `frames` STFT frames.
inline Index samples_for_frames(Index frames, const signal::StftConfig& cfg) {
  return frames == 0 ? 0 : (frames - 1) * cfg.hop + cfg.n_fft;
}

// A directory holding metadata.csv ("id|transcript" per line) and id.wav files.
std::vector<Example> load_speech_corpus(const std::filesystem::path& dir, const AudioFeatures& features);

}  // namespace amanda::tts
