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

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <random>

#include "amanda/signal/mel.hpp"

namespace amanda::signal {

// Frobenius-norm ratio || |C| - S || / || S || over the full (two-sided)
// spectrum, i.e. interior one-sided bins count twice.
template <typename Scalar>
Scalar spectral_convergence(const Mat<Scalar>& estimate, const Mat<Scalar>& target) {
  if (estimate.rows() != target.rows() || estimate.cols() != target.cols())
    throw DimensionError("spectral_convergence: shape mismatch");
  const Index bins = target.cols();
  Scalar num = 0, den = 0;
  for (Index k = 0; k < bins; ++k) {
    const Scalar w = (k == 0 || k == bins - 1) ? Scalar(1) : Scalar(2);
    num += w * (estimate.col(k) - target.col(k)).squaredNorm();
    den += w * target.col(k).squaredNorm();
  }
  if (den <= Scalar(0)) return std::sqrt(num);
  return std::sqrt(num / den);
}

struct GriffinLimOptions {
  int iterations = 64;
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct GriffinLimResult {
  BasicAudioClip<Scalar> audio;
  // Spectral convergence of the audio produced by each iteration.
  std::vector<Scalar> convergence;
};

template <typename Scalar>
GriffinLimResult<Scalar> griffin_lim_trace(const BasicMagnitudeSpectrogram<Scalar>& mag, const StftConfig& cfg,
                                           const GriffinLimOptions& opts, int sample_rate = kDefaultSampleRate) {
  cfg.validate();
  if (opts.iterations < 1) throw ValidationError("griffin_lim: iterations must be >= 1");
  if (mag.frames.cols() != cfg.bins()) throw DimensionError("griffin_lim: bin count does not match n_fft");
  const Mat<Scalar>& target = mag.frames;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  ComplexMat<Scalar> spec(target.rows(), target.cols());
  for (Index k = 0; k < target.cols(); ++k)
    for (Index t = 0; t < target.rows(); ++t)
      spec(t, k) = std::polar(target(t, k), static_cast<Scalar>(phase(rng)));

  GriffinLimResult<Scalar> result;
  result.audio.sample_rate = sample_rate;
  for (int it = 0; it < opts.iterations; ++it) {
    result.audio.samples = istft<Scalar>(spec, cfg);
    ComplexMat<Scalar> rebuilt = stft_complex<Scalar>(std::span<const Scalar>(result.audio.samples), cfg);
    Mat<Scalar> rebuilt_mag = rebuilt.cwiseAbs();
    result.convergence.push_back(spectral_convergence<Scalar>(rebuilt_mag, target));
    for (Index k = 0; k < target.cols(); ++k) {
      for (Index t = 0; t < target.rows(); ++t) {
        const Scalar a = rebuilt_mag(t, k);
        spec(t, k) = a > Scalar(0) ? rebuilt(t, k) * (target(t, k) / a) : std::complex<Scalar>(target(t, k), 0);
      }
    }
  }
  return result;
}

template <typename Scalar>
BasicAudioClip<Scalar> griffin_lim(const BasicMagnitudeSpectrogram<Scalar>& mag, const StftConfig& cfg,
                                   int iterations, int sample_rate = kDefaultSampleRate) {
  return griffin_lim_trace(mag, cfg, GriffinLimOptions{iterations, 0}, sample_rate).audio;
}

// Maps log-mel frames back to a linear magnitude spectrogram through the
// bank's pseudo-inverse, clamped at zero. Entries at the floor are silence.
template <typename Scalar>
BasicMagnitudeSpectrogram<Scalar> mel_to_magnitude(const BasicMelSpectrogram<Scalar>& mel, const Mat<Scalar>& bank) {
  if (bank.rows() != mel.n_mels())
    throw DimensionError("mel_to_magnitude: bank has " + std::to_string(bank.rows()) + " bands but mel has " +
                         std::to_string(mel.n_mels()));
  const Scalar floor = mel.log_floor;
  Mat<Scalar> energy = mel.frames.unaryExpr([floor](Scalar v) {
    const Scalar e = std::exp(v);
    return e <= floor * Scalar(1.000001) ? Scalar(0) : e;
  });
  Mat<Scalar> pinv = Eigen::CompleteOrthogonalDecomposition<Mat<Scalar>>(bank).pseudoInverse();
  return {(energy * pinv.transpose()).cwiseMax(Scalar(0))};
}

template <typename Scalar>
BasicAudioClip<Scalar> mel_to_audio(const BasicMelSpectrogram<Scalar>& mel, const StftConfig& cfg,
                                    const Mat<Scalar>& bank, int iterations = 64,
                                    int sample_rate = kDefaultSampleRate) {
  if (bank.cols() != cfg.bins()) throw DimensionError("mel_to_audio: filterbank does not match n_fft");
  auto audio = griffin_lim(mel_to_magnitude(mel, bank), cfg, iterations, sample_rate);
  for (auto& s : audio.samples) s = std::clamp(s, Scalar(-1), Scalar(1));
  return audio;
}

}  // namespace amanda::signal
