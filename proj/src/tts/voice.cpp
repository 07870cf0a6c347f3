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

#include "amanda/tts/voice.hpp"

#include <fstream>

#include "amanda/signal/griffin_lim.hpp"
#include "amanda/signal/wav.hpp"

namespace amanda::tts {

nlohmann::json AudioFeatures::to_json() const {
  return {{"sample_rate", mel.sample_rate},
          {"n_fft", stft.n_fft},
          {"hop", stft.hop},
          {"window", signal::window_name(stft.window)},
          {"n_mels", mel.n_mels},
          {"f_min", mel.f_min},
          {"f_max", mel.f_max},
          {"log_floor", mel.log_floor}};
}

AudioFeatures AudioFeatures::from_json(const nlohmann::json& j) {
  AudioFeatures f;
  f.mel.sample_rate = j.value("sample_rate", f.mel.sample_rate);
  f.stft.n_fft = j.value("n_fft", f.stft.n_fft);
  f.stft.hop = j.value("hop", f.stft.hop);
  if (j.contains("window")) f.stft.window = signal::parse_window(j["window"].get<std::string>());
  f.mel.n_mels = j.value("n_mels", f.mel.n_mels);
  f.mel.f_min = j.value("f_min", f.mel.f_min);
  f.mel.f_max = j.value("f_max", f.mel.f_max);
  f.mel.log_floor = j.value("log_floor", f.mel.log_floor);
  f.validate();
  return f;
}

Mat AudioFeatures::filterbank() const {
  return signal::mel_filterbank<double>(stft.n_fft, mel.n_mels, mel.sample_rate, mel.f_min, mel.f_max);
}

void AudioFeatures::validate() const {
  stft.validate();
  if (mel.sample_rate <= 0 || !(mel.log_floor > 0)) throw ValidationError("audio features: bad sample rate or floor");
  if (!(mel.f_max <= mel.sample_rate / 2.0)) throw ValidationError("audio features: f_max above Nyquist");
}

Voice Voice::load(const std::filesystem::path& checkpoint) {
  const auto ckpt = nn::load_checkpoint(checkpoint);
  Voice v;
  v.params = params_from_checkpoint(ckpt);
  v.features = AudioFeatures::from_json(ckpt.meta.value("audio", nlohmann::json::object()));
  v.step = ckpt.meta.contains("schedule") ? ckpt.meta["schedule"].value("step", 0L) : 0L;
  if (v.features.mel.n_mels != v.params.config.n_mels)
    throw ValidationError("checkpoint audio features have " + std::to_string(v.features.mel.n_mels) +
                          " mel bands but the model predicts " + std::to_string(v.params.config.n_mels));
  return v;
}

void save_voice(const std::filesystem::path& path, const TtsModelParams& params, const AudioFeatures& features,
                long step) {
  nn::save_checkpoint(path, to_checkpoint(params, step, {{"audio", features.to_json()}}));
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    cur.push_back(text[i]);
    const bool end = text[i] == '.' || text[i] == '!' || text[i] == '?';
    if (end && (i + 1 == text.size() || text[i + 1] == ' ')) {
      const auto b = cur.find_first_not_of(' ');
      if (b != std::string::npos) out.push_back(cur.substr(b));
      cur.clear();
    }
  }
  const auto b = cur.find_first_not_of(' ');
  if (b != std::string::npos) out.push_back(cur.substr(b));
  return out;
}

Speech speak(const Voice& voice, std::string_view text, const SpeechOptions& opts) {
  std::vector<std::string> chunks;
  if (text.size() > opts.sentence_split_chars)
    chunks = split_sentences(text);
  else
    chunks.emplace_back(text);
  const Mat bank = voice.features.filterbank();
  Speech out;
  out.audio.sample_rate = voice.features.mel.sample_rate;
  for (const auto& chunk : chunks) {
    const auto syn = synthesize(Vocabulary::encode(chunk), voice.params, opts.max_frames_per_sentence);
    signal::MelSpectrogram mel{syn.mel_after, voice.features.mel.log_floor};
    auto clip = signal::mel_to_audio(mel, voice.features.stft, bank, opts.griffin_lim_iterations,
                                     voice.features.mel.sample_rate);
    out.audio.samples.insert(out.audio.samples.end(), clip.samples.begin(), clip.samples.end());
    out.stop_steps.push_back(syn.stop_step);
  }
  return out;
}

std::vector<Example> load_speech_corpus(const std::filesystem::path& dir, const AudioFeatures& features) {
  std::ifstream meta(dir / "metadata.csv");
  if (!meta) throw Error("no metadata.csv in " + dir.string());
  const Mat bank = features.filterbank();
  std::vector<Example> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(meta, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto bar = line.find('|');
    if (bar == std::string::npos || bar == 0 || bar + 1 == line.size())
      throw ParseError("metadata.csv line " + std::to_string(line_no) + ": expected id|transcript");
    const std::string id = line.substr(0, bar);
    auto clip = signal::read_wav(dir / (id + ".wav"));
    if (clip.sample_rate != features.mel.sample_rate)
      throw ValidationError(id + ".wav: sample rate " + std::to_string(clip.sample_rate) + ", expected " +
                            std::to_string(features.mel.sample_rate));
    auto mel = signal::melspectrogram(clip, features.stft, bank, features.mel.log_floor);
    out.push_back({Vocabulary::encode(line.substr(bar + 1)), std::move(mel.frames)});
  }
  if (out.empty()) throw ValidationError("speech corpus " + dir.string() + " is empty");
  return out;
}

}  // namespace amanda::tts
