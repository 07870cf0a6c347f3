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

#include <unsupported/Eigen/FFT>

#include <complex>
#include <span>
#include <vector>

#include "amanda/signal/audio.hpp"

namespace amanda::signal {

template <typename Scalar>
using ComplexMat = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

inline Index frame_count(std::size_t length, const StftConfig& cfg) {
  if (static_cast<Index>(length) < cfg.n_fft) return 0;
  return (static_cast<Index>(length) - cfg.n_fft) / cfg.hop + 1;
}

// Complex one-sided STFT without implicit padding: T x (n_fft/2 + 1).
template <typename Scalar>
ComplexMat<Scalar> stft_complex(std::span<const Scalar> samples, const StftConfig& cfg) {
  cfg.validate();
  if (samples.empty()) throw ValidationError("stft: empty audio");
  if (static_cast<Index>(samples.size()) < cfg.n_fft)
    throw ValidationError("stft: clip too short (" + std::to_string(samples.size()) + " samples < n_fft " +
                          std::to_string(cfg.n_fft) + ")");
  const Index frames = frame_count(samples.size(), cfg);
  const auto window = make_window<Scalar>(cfg.window, cfg.n_fft);
  Eigen::FFT<Scalar> fft;
  fft.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
  std::vector<Scalar> buf(static_cast<std::size_t>(cfg.n_fft));
  std::vector<std::complex<Scalar>> spec;
  ComplexMat<Scalar> out(frames, cfg.bins());
  for (Index t = 0; t < frames; ++t) {
    const std::size_t off = static_cast<std::size_t>(t * cfg.hop);
    for (std::size_t n = 0; n < buf.size(); ++n) buf[n] = samples[off + n] * window[n];
    fft.fwd(spec, buf);
    for (Index k = 0; k < cfg.bins(); ++k) out(t, k) = spec[static_cast<std::size_t>(k)];
  }
  return out;
}

template <typename Scalar>
BasicMagnitudeSpectrogram<Scalar> stft(const BasicAudioClip<Scalar>& audio, const StftConfig& cfg) {
  return {stft_complex<Scalar>(std::span<const Scalar>(audio.samples), cfg).cwiseAbs()};
}

// Least-squares inverse STFT (weighted overlap-add divided by the summed
// squared window). Samples no window covers are left at zero.
template <typename Scalar>
std::vector<Scalar> istft(const ComplexMat<Scalar>& spec, const StftConfig& cfg) {
  cfg.validate();
  if (spec.cols() != cfg.bins()) throw DimensionError("istft: bin count does not match n_fft");
  const Index frames = spec.rows();
  if (frames == 0) return {};
  const std::size_t length = static_cast<std::size_t>((frames - 1) * cfg.hop + cfg.n_fft);
  const auto window = make_window<Scalar>(cfg.window, cfg.n_fft);
  std::vector<Scalar> out(length, Scalar(0));
  std::vector<Scalar> norm(length, Scalar(0));
  Eigen::FFT<Scalar> fft;
  fft.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
  std::vector<std::complex<Scalar>> half(static_cast<std::size_t>(cfg.bins()));
  std::vector<Scalar> frame;
  for (Index t = 0; t < frames; ++t) {
    for (Index k = 0; k < cfg.bins(); ++k) half[static_cast<std::size_t>(k)] = spec(t, k);
    fft.inv(frame, half, static_cast<int>(cfg.n_fft));
    const std::size_t off = static_cast<std::size_t>(t * cfg.hop);
    for (std::size_t n = 0; n < window.size(); ++n) {
      out[off + n] += window[n] * frame[n];
      norm[off + n] += window[n] * window[n];
    }
  }
  const Scalar tiny = std::numeric_limits<Scalar>::epsilon();
  for (std::size_t i = 0; i < length; ++i) out[i] = norm[i] > tiny ? out[i] / norm[i] : Scalar(0);
  return out;
}

}  // namespace amanda::signal
