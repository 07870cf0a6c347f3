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

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "amanda/error.hpp"

namespace amanda::signal {

using Index = Eigen::Index;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr int kDefaultSampleRate = 16000;

template <typename Scalar>
struct BasicAudioClip {
  std::vector<Scalar> samples;
  int sample_rate = kDefaultSampleRate;

  void validate() const {
    if (sample_rate <= 0) throw ValidationError("audio: sample_rate must be positive");
    for (Scalar s : samples)
      if (!std::isfinite(s)) throw ValidationError("audio: non-finite sample");
  }
};

using AudioClip = BasicAudioClip<double>;

enum class Window { Hann, Hamming, Rectangular };

struct StftConfig {
  Index n_fft = 800;  // 50 ms at 16 kHz
  Index hop = 200;    // 12.5 ms
  Window window = Window::Hann;

  Index bins() const { return n_fft / 2 + 1; }

  void validate() const {
    if (n_fft < 2 || n_fft % 2 != 0) throw ValidationError("stft: n_fft must be even and >= 2");
    if (hop <= 0 || hop > n_fft) throw ValidationError("stft: hop must satisfy 0 < hop <= n_fft");
  }
};

// frames: T x (n_fft/2 + 1), nonnegative.
template <typename Scalar>
struct BasicMagnitudeSpectrogram {
  Mat<Scalar> frames;
};

// frames: T x n_mels of log amplitudes, each >= log(log_floor).
template <typename Scalar>
struct BasicMelSpectrogram {
  Mat<Scalar> frames;
  Scalar log_floor = Scalar(1e-5);

  Index n_mels() const { return frames.cols(); }
  Index n_frames() const { return frames.rows(); }
};

using MagnitudeSpectrogram = BasicMagnitudeSpectrogram<double>;
using MelSpectrogram = BasicMelSpectrogram<double>;

// Periodic window of length n.
template <typename Scalar>
std::vector<Scalar> make_window(Window kind, Index n) {
  std::vector<Scalar> w(static_cast<std::size_t>(n));
  const double two_pi = 2.0 * M_PI;
  for (Index i = 0; i < n; ++i) {
    double phase = two_pi * static_cast<double>(i) / static_cast<double>(n);
    double v = 1.0;
    switch (kind) {
      case Window::Hann: v = 0.5 - 0.5 * std::cos(phase); break;
      case Window::Hamming: v = 0.54 - 0.46 * std::cos(phase); break;
      case Window::Rectangular: v = 1.0; break;
    }
    w[static_cast<std::size_t>(i)] = static_cast<Scalar>(v);
  }
  return w;
}

inline Window parse_window(const std::string& name) {
  if (name == "hann") return Window::Hann;
  if (name == "hamming") return Window::Hamming;
  if (name == "rectangular" || name == "rect") return Window::Rectangular;
  throw ValidationError("unknown window '" + name + "'");
}

inline std::string window_name(Window w) {
  switch (w) {
    case Window::Hann: return "hann";
    case Window::Hamming: return "hamming";
    case Window::Rectangular: return "rectangular";
  }
  return "hann";
}

}  // namespace amanda::signal
