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

#include "amanda/tts/model.hpp"

#include <cmath>
#include <random>

#include "amanda/error.hpp"
#include "amanda/nn/init.hpp"

namespace amanda::tts {

using nn::add;
using nn::concat;
using nn::matmul;
using nn::mul;
using nn::slice;

void TtsConfig::validate() const {
  for (Index v : {vocab_size, embed_dim, enc_dim, dec_dim, attn_dim, n_mels, postnet_channels})
    if (v <= 0) throw ValidationError("tts config: all dimensions must be positive");
  if (postnet_kernel <= 0 || postnet_kernel % 2 == 0)
    throw ValidationError("tts config: postnet_kernel must be a positive odd number");
}

nlohmann::json TtsConfig::to_json() const {
  return {{"vocab_size", vocab_size},   {"embed_dim", embed_dim},
          {"enc_dim", enc_dim},         {"dec_dim", dec_dim},
          {"attn_dim", attn_dim},       {"n_mels", n_mels},
          {"postnet_channels", postnet_channels}, {"postnet_kernel", postnet_kernel}};
}

TtsConfig TtsConfig::from_json(const nlohmann::json& j) {
  TtsConfig c;
  c.vocab_size = j.at("vocab_size").get<Index>();
  c.embed_dim = j.at("embed_dim").get<Index>();
  c.enc_dim = j.at("enc_dim").get<Index>();
  c.dec_dim = j.at("dec_dim").get<Index>();
  c.attn_dim = j.at("attn_dim").get<Index>();
  c.n_mels = j.at("n_mels").get<Index>();
  c.postnet_channels = j.at("postnet_channels").get<Index>();
  c.postnet_kernel = j.at("postnet_kernel").get<Index>();
  c.validate();
  return c;
}

namespace {

template <typename Params, typename F>
void visit_gru(const std::string& prefix, Params& g, F&& f) {
  f(prefix + ".w_input", g.w_input);
  f(prefix + ".w_gates", g.w_gates);
  f(prefix + ".w_candidate", g.w_candidate);
  f(prefix + ".bias", g.bias);
}

template <typename Params, typename F>
void visit_decoder(const std::string& prefix, Params& d, F&& f) {
  f(prefix + ".attention.w_query", d.attention.w_query);
  f(prefix + ".attention.w_key", d.attention.w_key);
  f(prefix + ".attention.bias", d.attention.bias);
  f(prefix + ".attention.v", d.attention.v);
  visit_gru(prefix + ".cell", d.cell, f);
  f(prefix + ".w_frame", d.w_frame);
  f(prefix + ".b_frame", d.b_frame);
  f(prefix + ".w_stop", d.w_stop);
  f(prefix + ".b_stop", d.b_stop);
}

template <typename Params, typename F>
void visit(Params& p, F&& f) {
  f(std::string("embedding"), p.embedding);
  visit_gru("encoder", p.encoder, f);
  visit_decoder("forward", p.forward, f);
  visit_decoder("backward", p.backward, f);
  f(std::string("postnet.w1"), p.postnet.w1);
  f(std::string("postnet.b1"), p.postnet.b1);
  f(std::string("postnet.w2"), p.postnet.w2);
  f(std::string("postnet.b2"), p.postnet.b2);
}

GruWeights init_gru(Index in, Index hidden, std::mt19937_64& rng) {
  return {nn::uniform_param(in, 3 * hidden, in, rng), nn::uniform_param(hidden, 2 * hidden, hidden, rng),
          nn::uniform_param(hidden, hidden, hidden, rng), nn::zero_param(1, 3 * hidden)};
}

DecoderWeights init_decoder(const TtsConfig& c, std::mt19937_64& rng) {
  DecoderWeights d;
  d.attention = {nn::uniform_param(c.dec_dim, c.attn_dim, c.dec_dim, rng),
                 nn::uniform_param(c.enc_dim, c.attn_dim, c.enc_dim, rng), nn::zero_param(1, c.attn_dim),
                 nn::uniform_param(c.attn_dim, 1, c.attn_dim, rng)};
  d.cell = init_gru(c.n_mels + c.enc_dim, c.dec_dim, rng);
  const Index proj_in = c.dec_dim + c.enc_dim;
  d.w_frame = nn::uniform_param(proj_in, c.n_mels, proj_in, rng);
  d.b_frame = nn::zero_param(1, c.n_mels);
  d.w_stop = nn::uniform_param(proj_in, 1, proj_in, rng);
  d.b_stop = nn::zero_param(1, 1);
  return d;
}

void expect_shape(const Tensor& t, Index rows, Index cols, const std::string& name) {
  if (t.rows() != rows || t.cols() != cols)
    throw DimensionError("tts params: " + name + " has shape " + std::to_string(t.rows()) + "x" +
                         std::to_string(t.cols()) + ", expected " + std::to_string(rows) + "x" +
                         std::to_string(cols));
}

Tensor constant(Mat m) { return Tensor(std::move(m), false); }

// [y_prev, c] W_input + bias, then one recurrent update, then projections.
struct StepGraph {
  Tensor s, frame, stop_logit;
};

StepGraph decoder_step_graph(const DecoderWeights& w, const Tensor& s_prev, const Tensor& y_prev,
                             const Tensor& context) {
  auto proj = add(matmul(concat({y_prev, context}, 1), w.cell.w_input), w.cell.bias);
  auto s = graph::gru_step(w.cell, proj, s_prev);
  auto sc = concat({s, context}, 1);
  return {s, add(matmul(sc, w.w_frame), w.b_frame), add(matmul(sc, w.w_stop), w.b_stop)};
}

}  // namespace

TtsModelParams TtsModelParams::initialize(const TtsConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  TtsModelParams p;
  p.config = config;
  p.embedding = nn::uniform_param(config.vocab_size, config.embed_dim, 1, rng);
  p.encoder = init_gru(config.embed_dim, config.enc_dim, rng);
  p.forward = init_decoder(config, rng);
  p.backward = init_decoder(config, rng);
  const Index k = config.postnet_kernel;
  p.postnet.w1 = nn::uniform_param(k * config.n_mels, config.postnet_channels, k * config.n_mels, rng);
  p.postnet.b1 = nn::zero_param(1, config.postnet_channels);
  p.postnet.w2 = nn::uniform_param(k * config.postnet_channels, config.n_mels, k * config.postnet_channels, rng);
  p.postnet.b2 = nn::zero_param(1, config.n_mels);
  return p;
}

std::vector<std::pair<std::string, Tensor>> TtsModelParams::named() const {
  std::vector<std::pair<std::string, Tensor>> out;
  visit(*this, [&](const std::string& name, const Tensor& t) { out.emplace_back(name, t); });
  return out;
}

std::vector<Tensor> TtsModelParams::tensors() const {
  std::vector<Tensor> out;
  visit(*this, [&](const std::string&, const Tensor& t) { out.push_back(t); });
  return out;
}

TtsModelParams TtsModelParams::clone() const {
  TtsModelParams out = *this;
  visit(out, [](const std::string&, Tensor& t) { t = Tensor(t.value(), true); });
  return out;
}

void TtsModelParams::validate() const {
  const auto& c = config;
  c.validate();
  expect_shape(embedding, c.vocab_size, c.embed_dim, "embedding");
  auto gru = [](const GruWeights& g, Index in, Index h, const std::string& name) {
    expect_shape(g.w_input, in, 3 * h, name + ".w_input");
    expect_shape(g.w_gates, h, 2 * h, name + ".w_gates");
    expect_shape(g.w_candidate, h, h, name + ".w_candidate");
    expect_shape(g.bias, 1, 3 * h, name + ".bias");
  };
  gru(encoder, c.embed_dim, c.enc_dim, "encoder");
  for (const auto* d : {&forward, &backward}) {
    const std::string name = d == &forward ? "forward" : "backward";
    expect_shape(d->attention.w_query, c.dec_dim, c.attn_dim, name + ".attention.w_query");
    expect_shape(d->attention.w_key, c.enc_dim, c.attn_dim, name + ".attention.w_key");
    expect_shape(d->attention.bias, 1, c.attn_dim, name + ".attention.bias");
    expect_shape(d->attention.v, c.attn_dim, 1, name + ".attention.v");
    gru(d->cell, c.n_mels + c.enc_dim, c.dec_dim, name + ".cell");
    expect_shape(d->w_frame, c.dec_dim + c.enc_dim, c.n_mels, name + ".w_frame");
    expect_shape(d->b_frame, 1, c.n_mels, name + ".b_frame");
    expect_shape(d->w_stop, c.dec_dim + c.enc_dim, 1, name + ".w_stop");
    expect_shape(d->b_stop, 1, 1, name + ".b_stop");
  }
  const Index k = c.postnet_kernel;
  expect_shape(postnet.w1, k * c.n_mels, c.postnet_channels, "postnet.w1");
  expect_shape(postnet.b1, 1, c.postnet_channels, "postnet.b1");
  expect_shape(postnet.w2, k * c.postnet_channels, c.n_mels, "postnet.w2");
  expect_shape(postnet.b2, 1, c.n_mels, "postnet.b2");
}

nn::Checkpoint to_checkpoint(const TtsModelParams& params, long step, const nlohmann::json& extra) {
  nn::Checkpoint ckpt;
  if (extra.is_object()) ckpt.meta = extra;
  ckpt.meta["format"] = "amanda-tts";
  ckpt.meta["config"] = params.config.to_json();
  ckpt.meta["schedule"]["step"] = step;
  for (const auto& [name, t] : params.named()) ckpt.tensors.push_back({name, t.value()});
  return ckpt;
}

TtsModelParams params_from_checkpoint(const nn::Checkpoint& ckpt) {
  if (ckpt.meta.value("format", "") != "amanda-tts") throw ParseError("checkpoint is not a TTS model");
  auto params = TtsModelParams::initialize(TtsConfig::from_json(ckpt.meta.at("config")), 0);
  visit(params, [&](const std::string& name, Tensor& t) {
    const auto& v = ckpt.get(name);
    expect_shape(Tensor(v), t.rows(), t.cols(), name);
    t.mutable_value() = v;
  });
  return params;
}

// ---------------------------------------------------------------------------

namespace graph {

Tensor gru_step(const GruWeights& w, const Tensor& input_proj, const Tensor& h) {
  const Index hidden = w.hidden();
  auto zr = nn::sigmoid(add(slice(input_proj, 1, 0, 2 * hidden), matmul(h, w.w_gates)));
  auto z = slice(zr, 1, 0, hidden);
  auto r = slice(zr, 1, hidden, hidden);
  auto n = nn::tanh(add(slice(input_proj, 1, 2 * hidden, hidden), matmul(mul(r, h), w.w_candidate)));
  // (1 - z) * n + z * h
  return add(n, mul(z, nn::sub(h, n)));
}

Tensor encode(const TtsModelParams& params, const TextSequence& text) {
  if (text.ids.empty()) throw ValidationError("encode: empty text sequence");
  for (Index id : text.ids)
    if (id < 0 || id >= params.config.vocab_size)
      throw ValidationError("encode: id " + std::to_string(id) + " outside vocabulary");
  auto x = nn::gather_rows(params.embedding, text.ids);
  auto proj = add(matmul(x, params.encoder.w_input), params.encoder.bias);
  Tensor h = Tensor::zeros(1, params.config.enc_dim);
  std::vector<Tensor> rows;
  rows.reserve(text.ids.size());
  for (Index t = 0; t < text.length(); ++t) {
    h = gru_step(params.encoder, slice(proj, 0, t, 1), h);
    rows.push_back(h);
  }
  return concat(rows, 0);
}

Tensor attention_keys(const AttentionWeights& w, const Tensor& enc) { return add(matmul(enc, w.w_key), w.bias); }

Attention attend(const AttentionWeights& w, const Tensor& s_prev, const Tensor& keys, const Tensor& enc) {
  auto query = matmul(s_prev, w.w_query);
  auto energies = nn::transpose(matmul(nn::tanh(add(keys, query)), w.v));
  auto alpha = nn::softmax(energies, 1);
  return {energies, alpha, matmul(alpha, enc)};
}

DecoderRun run_decoder(const TtsModelParams& params, Direction direction, const Tensor& enc, const Mat& targets) {
  const auto& c = params.config;
  const auto& w = params.decoder(direction);
  const Index steps = targets.rows();
  if (steps == 0) throw ValidationError("run_decoder: empty target");
  if (targets.cols() != c.n_mels)
    throw DimensionError("run_decoder: target has " + std::to_string(targets.cols()) + " bins, model expects " +
                         std::to_string(c.n_mels));
  // Teacher-forced inputs in processing order; the first step sees a zero frame.
  Mat prev = Mat::Zero(steps, c.n_mels);
  for (Index j = 1; j < steps; ++j)
    prev.row(j) = direction == Direction::Forward ? targets.row(j - 1) : targets.row(steps - j);

  auto w_y = slice(w.cell.w_input, 0, 0, c.n_mels);
  auto w_c = slice(w.cell.w_input, 0, c.n_mels, c.enc_dim);
  auto y_proj = add(matmul(constant(prev), w_y), w.cell.bias);
  auto keys = attention_keys(w.attention, enc);

  Tensor s = Tensor::zeros(1, c.dec_dim);
  std::vector<Tensor> states, contexts;
  states.reserve(static_cast<std::size_t>(steps));
  contexts.reserve(static_cast<std::size_t>(steps));
  Mat alpha(steps, enc.rows());
  for (Index j = 0; j < steps; ++j) {
    auto att = attend(w.attention, s, keys, enc);
    alpha.row(j) = att.alpha.value();
    auto proj = add(slice(y_proj, 0, j, 1), matmul(att.context, w_c));
    s = gru_step(w.cell, proj, s);
    states.push_back(s);
    contexts.push_back(att.context);
  }
  auto states_m = concat(states, 0);
  auto sc = concat({states_m, concat(contexts, 0)}, 1);
  DecoderRun run{add(matmul(sc, w.w_frame), w.b_frame), states_m, add(matmul(sc, w.w_stop), w.b_stop), alpha};
  if (direction == Direction::Backward) {
    std::vector<Index> reversed(static_cast<std::size_t>(steps));
    for (Index j = 0; j < steps; ++j) reversed[static_cast<std::size_t>(j)] = steps - 1 - j;
    run.frames = nn::gather_rows(run.frames, reversed);
    run.states = nn::gather_rows(run.states, reversed);
    run.stop_logits = nn::gather_rows(run.stop_logits, reversed);
    run.alpha = Mat(run.alpha.colwise().reverse());
  }
  return run;
}

namespace {

// Rows t-p..t+p of a zero-padded copy side by side: T x (kernel * cols).
Tensor unfold_frames(const Tensor& x, Index kernel) {
  const Index pad = kernel / 2;
  const Index steps = x.rows();
  Tensor zeros = Tensor::zeros(pad, x.cols());
  auto padded = pad > 0 ? concat({zeros, x, zeros}, 0) : x;
  std::vector<Tensor> taps;
  taps.reserve(static_cast<std::size_t>(kernel));
  for (Index k = 0; k < kernel; ++k) taps.push_back(slice(padded, 0, k, steps));
  return concat(taps, 1);
}

}  // namespace

Tensor postnet_residual(const PostnetWeights& w, const Tensor& mel_before) {
  const Index kernel = w.w1.rows() / mel_before.cols();
  auto hidden = nn::tanh(add(matmul(unfold_frames(mel_before, kernel), w.w1), w.b1));
  return add(matmul(unfold_frames(hidden, kernel), w.w2), w.b2);
}

}  // namespace graph

// ---------------------------------------------------------------------------

DecoderState initial_state(const TtsModelParams& params, Direction direction) {
  return {direction, Mat::Zero(1, params.config.dec_dim), Mat::Zero(1, params.config.n_mels)};
}

EncoderOutputs encode(const TextSequence& text, const TtsModelParams& params) {
  nn::NoGradGuard no_grad;
  return {graph::encode(params, text).value()};
}

AttentionStep attend(const DecoderState& prev, const EncoderOutputs& enc, const TtsModelParams& params) {
  nn::NoGradGuard no_grad;
  const auto& w = params.decoder(prev.direction).attention;
  Tensor h = constant(enc.h);
  auto att = graph::attend(w, constant(prev.s), graph::attention_keys(w, h), h);
  return {att.energies.value(), att.alpha.value(), att.context.value()};
}

DecodeStepOutput decode_step(const DecoderState& prev, const Mat& y_prev, const Mat& context,
                             const TtsModelParams& params, Direction direction) {
  if (prev.direction != direction) throw ValidationError("decode_step: state direction does not match weights");
  nn::NoGradGuard no_grad;
  auto out = decoder_step_graph(params.decoder(direction), constant(prev.s), constant(y_prev), constant(context));
  DecodeStepOutput result;
  result.frame = out.frame.value();
  result.state = {direction, out.s.value(), result.frame};
  result.stop_logit = out.stop_logit.item();
  return result;
}

PostnetOutput postnet(const Mat& mel_before, const TtsModelParams& params) {
  nn::NoGradGuard no_grad;
  Tensor before = constant(mel_before);
  auto residual = graph::postnet_residual(params.postnet, before);
  return {residual.value(), nn::add(before, residual).value()};
}

SynthesisOutput synthesize(const TextSequence& text, const TtsModelParams& params, Index max_frames) {
  if (max_frames < 1) throw ValidationError("synthesize: max_frames must be >= 1");
  nn::NoGradGuard no_grad;
  const auto& w = params.forward;
  auto enc = graph::encode(params, text);
  auto keys = graph::attention_keys(w.attention, enc);
  Tensor s = Tensor::zeros(1, params.config.dec_dim);
  Tensor y_prev = Tensor::zeros(1, params.config.n_mels);
  std::vector<Mat> frames, alphas, energies;
  Index stop_step = max_frames;
  for (Index t = 0; t < max_frames; ++t) {
    auto att = graph::attend(w.attention, s, keys, enc);
    auto step = decoder_step_graph(w, s, y_prev, att.context);
    frames.push_back(step.frame.value());
    alphas.push_back(att.alpha.value());
    energies.push_back(att.energies.value());
    s = step.s;
    y_prev = step.frame;
    if (1.0 / (1.0 + std::exp(-step.stop_logit.item())) > 0.5) {
      stop_step = t + 1;
      break;
    }
  }
  const Index steps = static_cast<Index>(frames.size());
  SynthesisOutput out;
  out.stop_step = stop_step;
  out.mel_before.resize(steps, params.config.n_mels);
  out.attention.alpha.resize(steps, enc.rows());
  out.attention.energies.resize(steps, enc.rows());
  for (Index t = 0; t < steps; ++t) {
    out.mel_before.row(t) = frames[static_cast<std::size_t>(t)];
    out.attention.alpha.row(t) = alphas[static_cast<std::size_t>(t)];
    out.attention.energies.row(t) = energies[static_cast<std::size_t>(t)];
  }
  auto post = postnet(out.mel_before, params);
  out.residual = std::move(post.residual);
  out.mel_after = std::move(post.mel_after);
  return out;
}

}  // namespace amanda::tts
