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

#include "amanda/tts/train.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace amanda::tts {

namespace {

void accumulate(TtsLoss& sum, const TtsLoss& x) {
  sum.l_fwd += x.l_fwd;
  sum.l_bwd += x.l_bwd;
  sum.l_postnet += x.l_postnet;
  sum.l_consistency += x.l_consistency;
  sum.l_stop += x.l_stop;
  sum.total += x.total;
  sum.objective += x.objective;
}

TtsLoss averaged(TtsLoss sum, std::size_t n, double lambda) {
  const double k = 1.0 / static_cast<double>(n);
  sum.l_fwd *= k;
  sum.l_bwd *= k;
  sum.l_postnet *= k;
  sum.l_consistency *= k;
  sum.l_stop *= k;
  sum.total *= k;
  sum.objective *= k;
  sum.lambda = lambda;
  return sum;
}

bool finite(const TtsLoss& l) {
  return std::isfinite(l.l_fwd) && std::isfinite(l.l_bwd) && std::isfinite(l.l_postnet) &&
         std::isfinite(l.l_consistency) && std::isfinite(l.l_stop) && std::isfinite(l.objective);
}

std::string describe(const TtsLoss& l, std::size_t index) {
  std::ostringstream ss;
  ss << "non-finite loss at batch item " << index << ": l_fwd=" << l.l_fwd << " l_bwd=" << l.l_bwd
     << " l_postnet=" << l.l_postnet << " l_consistency=" << l.l_consistency << " l_stop=" << l.l_stop;
  return ss.str();
}

}  // namespace

TeacherForcedPass teacher_forced(const TtsModelParams& params, const Example& example) {
  TeacherForcedPass pass;
  pass.encoder = graph::encode(params, example.text);
  pass.fwd = graph::run_decoder(params, Direction::Forward, pass.encoder, example.mel);
  pass.bwd = graph::run_decoder(params, Direction::Backward, pass.encoder, example.mel);
  pass.residual = graph::postnet_residual(params.postnet, pass.fwd.frames);
  pass.mel_after = nn::add(pass.fwd.frames, pass.residual);
  return pass;
}

LossGraph example_loss(const TtsModelParams& params, const Example& example, const TrainOptions& opts) {
  auto pass = teacher_forced(params, example);
  auto loss = composite_loss(Tensor(example.mel), pass.fwd.frames, pass.bwd.frames, pass.mel_after,
                             pass.fwd.states, pass.bwd.states, opts.lambda, opts.loss);
  add_stop_loss(loss, pass.fwd.stop_logits, opts.stop_weight);
  return loss;
}

TtsLoss evaluate(std::span<const Example> batch, const TtsModelParams& params, const TrainOptions& opts) {
  if (batch.empty()) throw ValidationError("evaluate: empty batch");
  nn::NoGradGuard no_grad;
  TtsLoss sum;
  for (const auto& ex : batch) accumulate(sum, example_loss(params, ex, opts).values());
  return averaged(sum, batch.size(), opts.lambda);
}

TtsLoss train_step(std::span<const Example> batch, TtsModelParams& params, nn::AdamState& state,
                   const TrainOptions& opts) {
  if (batch.empty()) throw ValidationError("train_step: empty batch");
  auto tensors = params.tensors();
  nn::zero_grads(std::span<Tensor>(tensors));
  const double weight = 1.0 / static_cast<double>(batch.size());
  TtsLoss sum;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto loss = example_loss(params, batch[i], opts);
    const auto values = loss.values();
    if (!finite(values)) {
      nn::zero_grads(std::span<Tensor>(tensors));
      throw TrainingError(describe(values, i));
    }
    accumulate(sum, values);
    nn::backward(nn::scale(loss.objective, weight));
  }
  for (auto& t : tensors) {
    if (t.has_grad() && !t.grad().allFinite()) {
      nn::zero_grads(std::span<Tensor>(tensors));
      throw TrainingError("non-finite gradient; parameters left unchanged");
    }
  }
  nn::adam_step(std::span<Tensor>(tensors), state, opts.schedule);
  return averaged(sum, batch.size(), opts.lambda);
}

}  // namespace amanda::tts
