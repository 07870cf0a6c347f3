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

#include <algorithm>
#include <cmath>

#include "amanda/signal/stft.hpp"

namespace amanda::signal {

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

struct MelConfig {
  Index n_mels = 80;
  int sample_rate = kDefaultSampleRate;
  double f_min = 0.0;
  double f_max = 8000.0;
  double log_floor = 1e-5;
};

// Center frequencies (Hz) of the n_mels triangles, equally spaced in mel.
inline std::vector<double> mel_centers(Index n_mels, double f_min, double f_max) {
  std::vector<double> points(static_cast<std::size_t>(n_mels + 2));
  const double lo = hz_to_mel(f_min);
  const double hi = hz_to_mel(f_max);
  for (Index i = 0; i < n_mels + 2; ++i)
    points[static_cast<std::size_t>(i)] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_mels + 1));
  return points;
}

// Triangular filters, n_mels x (n_fft/2 + 1), unit peak height, no area
// normalisation.
template <typename Scalar = double>
Mat<Scalar> mel_filterbank(Index n_fft, Index n_mels, int sample_rate, double f_min, double f_max) {
  if (n_mels < 2) throw ValidationError("mel_filterbank: n_mels must be >= 2");
  if (n_fft < 2 || n_fft % 2 != 0) throw ValidationError("mel_filterbank: n_fft must be even and >= 2");
  if (sample_rate <= 0) throw ValidationError("mel_filterbank: sample_rate must be positive");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0))
    throw ValidationError("mel_filterbank: require 0 <= f_min < f_max <= sample_rate/2");
  const Index bins = n_fft / 2 + 1;
  const auto pts = mel_centers(n_mels, f_min, f_max);
  Mat<Scalar> bank = Mat<Scalar>::Zero(n_mels, bins);
  for (Index m = 0; m < n_mels; ++m) {
    const double left = pts[static_cast<std::size_t>(m)];
    const double center = pts[static_cast<std::size_t>(m + 1)];
    const double right = pts[static_cast<std::size_t>(m + 2)];
    for (Index k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
      const double up = (f - left) / (center - left);
      const double down = (right - f) / (right - center);
      bank(m, k) = static_cast<Scalar>(std::max(0.0, std::min(up, down)));
    }
    if (bank.row(m).maxCoeff() <= Scalar(0))
      throw ValidationError("mel_filterbank: filter " + std::to_string(m) +
                            " covers no FFT bin; reduce n_mels or raise n_fft");
  }
  return bank;
}

template <typename Scalar>
BasicMelSpectrogram<Scalar> mel_from_magnitude(const BasicMagnitudeSpectrogram<Scalar>& mag, const Mat<Scalar>& bank,
                                               Scalar log_floor) {
  if (bank.cols() != mag.frames.cols())
    throw DimensionError("melspectrogram: filterbank has " + std::to_string(bank.cols()) +
                         " bins but spectrogram has " + std::to_string(mag.frames.cols()));
  Mat<Scalar> energy = mag.frames * bank.transpose();
  BasicMelSpectrogram<Scalar> out;
  out.log_floor = log_floor;
  out.frames = energy.unaryExpr([log_floor](Scalar e) { return std::log(std::max(e, log_floor)); });
  return out;
}

template <typename Scalar>
BasicMelSpectrogram<Scalar> melspectrogram(const BasicAudioClip<Scalar>& audio, const StftConfig& cfg,
                                           const Mat<Scalar>& bank, Scalar log_floor) {
  if (bank.cols() != cfg.bins()) throw DimensionError("melspectrogram: filterbank does not match n_fft");
  if (!(log_floor > Scalar(0))) throw ValidationError("melspectrogram: log_floor must be positive");
  return mel_from_magnitude(stft(audio, cfg), bank, log_floor);
}

}  // namespace amanda::signal
