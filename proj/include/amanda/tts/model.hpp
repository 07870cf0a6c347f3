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

// Sequence-to-sequence mel predictor: a GRU encoder shared by two attentive
// GRU decoders (one reading targets left-to-right, one right-to-left) and a
// convolutional Post-Net that adds a residual to the forward prediction.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "amanda/nn/checkpoint.hpp"
#include "amanda/nn/optim.hpp"
#include "amanda/nn/tensor.hpp"
#include "amanda/tts/vocabulary.hpp"

namespace amanda::tts {

using nn::Tensor;
using Mat = nn::Mat<double>;

struct TtsConfig {
  Index vocab_size = Vocabulary::size();
  Index embed_dim = 64;
  Index enc_dim = 64;
  Index dec_dim = 64;
  Index attn_dim = 64;
  Index n_mels = 80;
  Index postnet_channels = 64;
  Index postnet_kernel = 5;

  void validate() const;
  nlohmann::json to_json() const;
  static TtsConfig from_json(const nlohmann::json& j);
};

enum class Direction { Forward, Backward };

// Gated recurrent cell. Gate order in the 3*hidden blocks: update, reset,
// candidate.
struct GruWeights {
  Tensor w_input;      // in x 3h
  Tensor w_gates;      // h x 2h, recurrent part of update/reset
  Tensor w_candidate;  // h x h, applied to (reset * state)
  Tensor bias;         // 1 x 3h

  Index hidden() const { return w_candidate.rows(); }
};

// score(s, h) = v . tanh(s W_q + h W_k + b)
struct AttentionWeights {
  Tensor w_query;  // dec x attn
  Tensor w_key;    // enc x attn
  Tensor bias;     // 1 x attn
  Tensor v;        // attn x 1
};

struct DecoderWeights {
  AttentionWeights attention;
  GruWeights cell;  // input is [y_prev, c_t]
  Tensor w_frame;   // (dec + enc) x n_mels
  Tensor b_frame;   // 1 x n_mels
  Tensor w_stop;    // (dec + enc) x 1
  Tensor b_stop;    // 1 x 1
};

// Two 1-D convolutions over the frame axis with "same" zero padding:
// n_mels -> channels (tanh) -> n_mels.
struct PostnetWeights {
  Tensor w1, b1, w2, b2;
};

struct TtsModelParams {
  TtsConfig config;
  Tensor embedding;  // vocab x embed
  GruWeights encoder;
  DecoderWeights forward;
  DecoderWeights backward;
  PostnetWeights postnet;

  static TtsModelParams initialize(const TtsConfig& config, std::uint64_t seed);

  // Stable name order; handles share storage with this object.
  std::vector<std::pair<std::string, Tensor>> named() const;
  std::vector<Tensor> tensors() const;
  TtsModelParams clone() const;
  void validate() const;

  const DecoderWeights& decoder(Direction d) const { return d == Direction::Forward ? forward : backward; }
};

nn::Checkpoint to_checkpoint(const TtsModelParams& params, long step, const nlohmann::json& extra = {});
TtsModelParams params_from_checkpoint(const nn::Checkpoint& ckpt);

// ---------------------------------------------------------------------------
// Value-level operations.

struct EncoderOutputs {
  Mat h;  // T_x x enc
};

struct DecoderState {
  Direction direction = Direction::Forward;
  Mat s;           // 1 x dec
  Mat prev_frame;  // 1 x n_mels
};

struct AttentionStep {
  Mat energies;  // 1 x T_x
  Mat alpha;     // 1 x T_x
  Mat context;   // 1 x enc
};

struct DecodeStepOutput {
  DecoderState state;
  Mat frame;  // 1 x n_mels
  double stop_logit = 0.0;
};

struct AttentionRecord {
  Mat alpha;     // T_y x T_x
  Mat energies;  // T_y x T_x
};

struct PostnetOutput {
  Mat residual;
  Mat mel_after;
};

struct SynthesisOutput {
  Mat mel_before;
  Mat mel_after;
  Mat residual;
  AttentionRecord attention;
  Index stop_step = 0;
};

DecoderState initial_state(const TtsModelParams& params, Direction direction);

EncoderOutputs encode(const TextSequence& text, const TtsModelParams& params);
AttentionStep attend(const DecoderState& prev, const EncoderOutputs& enc, const TtsModelParams& params);
DecodeStepOutput decode_step(const DecoderState& prev, const Mat& y_prev, const Mat& context,
                             const TtsModelParams& params, Direction direction);
PostnetOutput postnet(const Mat& mel_before, const TtsModelParams& params);

// Autoregressive synthesis with the forward decoder, feeding each predicted
// frame back in. Stops once sigmoid(stop_logit) > 0.5 or at max_frames.
SynthesisOutput synthesize(const TextSequence& text, const TtsModelParams& params, Index max_frames);

// ---------------------------------------------------------------------------
// Graph-level building blocks used for training.

namespace graph {

Tensor encode(const TtsModelParams& params, const TextSequence& text);

// `input_proj` is x W_input + bias for this step.
Tensor gru_step(const GruWeights& w, const Tensor& input_proj, const Tensor& h);

struct Attention {
  Tensor energies;  // 1 x T_x
  Tensor alpha;     // 1 x T_x
  Tensor context;   // 1 x enc
};

// `keys` is enc W_key + bias, precomputed once per utterance.
Attention attend(const AttentionWeights& w, const Tensor& s_prev, const Tensor& keys, const Tensor& enc);
Tensor attention_keys(const AttentionWeights& w, const Tensor& enc);

struct DecoderRun {
  Tensor frames;       // T_y x n_mels, forward time order
  Tensor states;       // T_y x dec, forward time order
  Tensor stop_logits;  // T_y x 1, forward time order
  Mat alpha;           // T_y x T_x
};

// Teacher-forced pass. The backward decoder consumes targets right-to-left;
// its outputs are re-reversed so row t always refers to target frame t.
DecoderRun run_decoder(const TtsModelParams& params, Direction direction, const Tensor& enc, const Mat& targets);

Tensor postnet_residual(const PostnetWeights& w, const Tensor& mel_before);

}  // namespace graph

}  // namespace amanda::tts
