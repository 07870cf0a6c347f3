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

#include "amanda/tts/loss.hpp"

#include <string>

#include "amanda/error.hpp"

namespace amanda::tts {

namespace {

Tensor reconstruction(const Tensor& prediction, const Tensor& target, ReconstructionLoss kind) {
  if (kind == ReconstructionLoss::Squared) return nn::mse(prediction, target);
  return nn::mean(nn::abs(nn::sub(prediction, target)));
}

void check_rows(const char* what, const Tensor& t, Index rows, Index cols) {
  if (t.rows() != rows || t.cols() != cols)
    throw DimensionError(std::string("compute_loss: ") + what + " is " + std::to_string(t.rows()) + "x" +
                         std::to_string(t.cols()) + ", expected " + std::to_string(rows) + "x" +
                         std::to_string(cols));
}

}  // namespace

TtsLoss LossGraph::values() const {
  TtsLoss v;
  v.l_fwd = l_fwd.item();
  v.l_bwd = l_bwd.item();
  v.l_postnet = l_postnet.item();
  v.l_consistency = l_consistency.item();
  v.l_stop = l_stop.item();
  v.lambda = lambda;
  v.total = total.item();
  v.objective = objective.item();
  return v;
}

LossGraph composite_loss(const Tensor& target, const Tensor& fwd_frames, const Tensor& bwd_frames,
                         const Tensor& mel_after, const Tensor& fwd_states, const Tensor& bwd_states, double lambda,
                         ReconstructionLoss kind) {
  const Index steps = target.rows();
  if (steps == 0) throw DimensionError("compute_loss: empty target");
  check_rows("forward prediction", fwd_frames, steps, target.cols());
  check_rows("backward prediction", bwd_frames, steps, target.cols());
  check_rows("post-net prediction", mel_after, steps, target.cols());
  check_rows("backward states", bwd_states, steps, fwd_states.cols());
  if (fwd_states.rows() != steps) check_rows("forward states", fwd_states, steps, fwd_states.cols());
  if (!(lambda >= 0.0)) throw ValidationError("compute_loss: lambda must be >= 0");

  LossGraph g;
  g.lambda = lambda;
  g.l_fwd = reconstruction(fwd_frames, target, kind);
  g.l_bwd = reconstruction(bwd_frames, target, kind);
  g.l_postnet = reconstruction(mel_after, target, kind);
  // (1/T_y) sum_t ||s_fwd_t - s_bwd_t||^2
  g.l_consistency = nn::scale(nn::sum_squares(nn::sub(fwd_states, bwd_states)), 1.0 / static_cast<double>(steps));
  g.total = nn::add(nn::add(nn::add(g.l_fwd, g.l_bwd), g.l_postnet), nn::scale(g.l_consistency, lambda));
  g.l_stop = Tensor::scalar(0.0);
  g.objective = g.total;
  return g;
}

void add_stop_loss(LossGraph& loss, const Tensor& stop_logits, double weight) {
  Mat targets = Mat::Zero(stop_logits.rows(), 1);
  targets(targets.rows() - 1, 0) = 1.0;
  loss.l_stop = nn::bce_with_logits(stop_logits, Tensor(targets));
  loss.objective = nn::add(loss.total, nn::scale(loss.l_stop, weight));
}

TtsLoss compute_loss(const Mat& target, const Mat& fwd_frames, const Mat& bwd_frames, const Mat& mel_after,
                     const Mat& fwd_states, const Mat& bwd_states, double lambda, ReconstructionLoss kind) {
  nn::NoGradGuard no_grad;
  return composite_loss(Tensor(target), Tensor(fwd_frames), Tensor(bwd_frames), Tensor(mel_after),
                        Tensor(fwd_states), Tensor(bwd_states), lambda, kind)
      .values();
}

}  // namespace amanda::tts
