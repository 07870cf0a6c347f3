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

#include "amanda/nn/tensor.hpp"

namespace amanda::tts {

using nn::Tensor;
using Mat = nn::Mat<double>;
using nn::Index;

enum class ReconstructionLoss { Squared, Absolute };

// total = l_fwd + l_bwd + l_postnet + lambda * l_consistency.
// objective additionally carries the stop-gate term minimised in training.
struct TtsLoss {
  double l_fwd = 0.0;
  double l_bwd = 0.0;
  double l_postnet = 0.0;
  double l_consistency = 0.0;
  double l_stop = 0.0;
  double lambda = 1.0;
  double total = 0.0;
  double objective = 0.0;
};

struct LossGraph {
  Tensor l_fwd, l_bwd, l_postnet, l_consistency, l_stop, total, objective;
  double lambda = 1.0;

  TtsLoss values() const;
};

// All inputs are T_y-row matrices in forward time order: backward-decoder
// frames and states must already be re-reversed.
LossGraph composite_loss(const Tensor& target, const Tensor& fwd_frames, const Tensor& bwd_frames,
                         const Tensor& mel_after, const Tensor& fwd_states, const Tensor& bwd_states,
                         double lambda = 1.0, ReconstructionLoss kind = ReconstructionLoss::Squared);

// Adds weight * BCE(stop_logits, [0 ... 0 1]) to the objective.
void add_stop_loss(LossGraph& loss, const Tensor& stop_logits, double weight);

TtsLoss compute_loss(const Mat& target, const Mat& fwd_frames, const Mat& bwd_frames, const Mat& mel_after,
                     const Mat& fwd_states, const Mat& bwd_states, double lambda = 1.0,
                     ReconstructionLoss kind = ReconstructionLoss::Squared);

}  // namespace amanda::tts
