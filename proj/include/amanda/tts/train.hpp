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

#include <span>
#include <string>

#include "amanda/error.hpp"
#include "amanda/nn/optim.hpp"
#include "amanda/tts/loss.hpp"
#include "amanda/tts/model.hpp"

namespace amanda::tts {

struct Example {
  TextSequence text;
  Mat mel;  // T_y x n_mels
};

struct TrainOptions {
  double lambda = 1.0;
  double stop_weight = 1.0;
  ReconstructionLoss loss = ReconstructionLoss::Squared;
  nn::LrSchedule schedule;
};

// Raised when a training step produces a non-finite loss; parameters are
// left untouched.
class TrainingError : public Error {
 public:
  using Error::Error;
};

struct TeacherForcedPass {
  Tensor encoder;
  graph::DecoderRun fwd;
  graph::DecoderRun bwd;
  Tensor residual;
  Tensor mel_after;
};

TeacherForcedPass teacher_forced(const TtsModelParams& params, const Example& example);

// Graph for one utterance's loss (including the stop-gate term).
LossGraph example_loss(const TtsModelParams& params, const Example& example, const TrainOptions& opts);

// Batch-mean loss without touching parameters.
TtsLoss evaluate(std::span<const Example> batch, const TtsModelParams& params, const TrainOptions& opts);

// One backward pass over the batch-mean objective plus an Adam update.
// Returns the pre-update loss.
TtsLoss train_step(std::span<const Example> batch, TtsModelParams& params, nn::AdamState& state,
                   const TrainOptions& opts);

}  // namespace amanda::tts
