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

// amanda: operator command line for training, synthesis, evaluation and serving.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <random>
#include <thread>

#include <CLI11.hpp>

#include "amanda/dialogue/dialogue.hpp"
#include "amanda/eval/eval.hpp"
#include "amanda/nlu/nlu.hpp"
#include "amanda/service/http.hpp"
#include "amanda/signal/wav.hpp"
#include "amanda/tts/voice.hpp"

namespace {

using namespace amanda;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kFailure = 2;

struct TrainTtsArgs {
  std::string data, out;
  long steps = 1000;
  std::size_t batch = 32;
  double lr = 1e-3;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  long log_every = 50;
  tts::TtsConfig model;
  int n_mels = 80;
};

int train_tts(const TrainTtsArgs& a) {
  tts::AudioFeatures features;
  features.mel.n_mels = a.n_mels;
  features.validate();
  auto config = a.model;
  config.n_mels = a.n_mels;
  config.validate();
  auto params = tts::TtsModelParams::initialize(config, a.seed);
  if (a.steps > 0) {
    const auto corpus = tts::load_speech_corpus(a.data, features);
    std::cerr << "loaded " << corpus.size() << " utterances from " << a.data << "\n";
    tts::TrainOptions opts;
    opts.lambda = a.lambda;
    opts.schedule.initial_lr = a.lr;
    nn::AdamState state;
    std::mt19937_64 rng(a.seed);
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), 0);
    std::size_t cursor = order.size();
    std::vector<tts::Example> batch;
    for (long step = 1; step <= a.steps; ++step) {
      batch.clear();
      while (batch.size() < std::min(a.batch, corpus.size())) {
        if (cursor == order.size()) {
          std::shuffle(order.begin(), order.end(), rng);
          cursor = 0;
        }
        batch.push_back(corpus[order[cursor++]]);
      }
      const auto loss = tts::train_step(batch, params, state, opts);
      if (step == 1 || step % a.log_every == 0 || step == a.steps)
        std::cerr << "step " << step << " lr " << opts.schedule.at(step) << " total " << loss.total << " (fwd "
                  << loss.l_fwd << ", bwd " << loss.l_bwd << ", postnet " << loss.l_postnet << ", consistency "
                  << loss.l_consistency << ")\n";
    }
  }
  tts::save_voice(a.out, params, features, a.steps);
  std::cout << "wrote " << a.out << " after " << a.steps << " steps\n";
  return kOk;
}

int synth(const std::string& ckpt, const std::string& text, const std::string& out, const tts::SpeechOptions& opts) {
  const auto voice = tts::Voice::load(ckpt);
  const auto speech = tts::speak(voice, text, opts);
  signal::write_wav(out, speech.audio);
  Eigen::Index frames = 0;
  for (auto s : speech.stop_steps) frames += s;
  std::cout << "frames " << frames << " samples " << speech.audio.samples.size() << " -> " << out << "\n";
  return kOk;
}

int train_nlu(const std::string& corpus_path, const std::string& out, const nlu::NluTrainOptions& opts) {
  const auto corpus = nlu::load_corpus(corpus_path);
  nlu::NluTrainReport report;
  const auto model = nlu::train_intents(corpus, opts, &report);
  std::size_t hits = 0;
  for (const auto& ex : corpus.examples)
    hits += nlu::predict_intent(ex.text, ex.language, model).top().first == ex.intent;
  nlu::save_model(model, out);
  std::cout << corpus.intents.size() << " intents, " << corpus.examples.size() << " examples; loss "
            << report.initial_loss << " -> " << report.final_loss << "; training accuracy " << hits << "/"
            << corpus.examples.size() << "\nwrote " << out << "\n";
  return kOk;
}

int chat(const std::string& kb_path, const std::string& model_path, const std::string& lang,
         const dialogue::Thresholds& th) {
  const auto kb = dialogue::load_kb(kb_path);
  const auto model = nlu::load_model(model_path);
  const auto predictor = dialogue::model_predictor(model);
  dialogue::DialogueState state;
  state.session_id = "terminal";
  state.language = parse_language(lang);
  std::cout << "Type a question (\"/lang en|zh\" switches language, Ctrl-D quits).\n";
  std::string line;
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    if (line.rfind("/lang ", 0) == 0) {
      state = dialogue::switch_language(state, parse_language(line.substr(6)));
      continue;
    }
    const auto turn = dialogue::handle_message(state, line, predictor, kb, th);
    state = turn.state;
    std::cout << "[" << dialogue::reply_kind_name(turn.reply.kind) << "] " << turn.reply.text << "\n";
    for (const auto& s : turn.reply.suggestions) std::cout << "  - " << s << "\n";
  }
  std::cout << "\n";
  return kOk;
}

template <typename T>
bool report_row_errors(const eval::Ingested<T>& in, const std::string& path) {
  for (const auto& e : in.errors) std::cerr << path << ":" << e.line << ": " << e.message << "\n";
  return in.errors.empty();
}

int eval_mos(const std::string& path, const std::string& reported, bool as_json) {
  const auto in = eval::ingest_mos_csv(path);
  if (!report_row_errors(in, path)) return kInvalid;
  const auto table = eval::mos_aggregate(in.rows);
  const auto cmp = eval::compare_reported(table, eval::parse_reported(reported));
  if (as_json)
    std::cout << eval::mos_report_json(table, cmp).dump(2) << "\n";
  else
    std::cout << eval::format_mos_report(table, cmp);
  return kOk;
}

int eval_sus(const std::string& path, bool as_json) {
  const auto in = eval::ingest_sus_csv(path);
  if (!report_row_errors(in, path)) return kInvalid;
  const auto summary = eval::sus_summary(in.rows);
  if (as_json)
    std::cout << eval::sus_report_json(summary).dump(2) << "\n";
  else
    std::cout << eval::format_sus_report(summary);
  return kOk;
}

int serve(std::string config_path) {
  if (config_path.empty()) {
    const char* env = std::getenv("AMANDA_CONFIG");
    if (!env) throw ValidationError("serve needs --config or AMANDA_CONFIG");
    config_path = env;
  }
  auto config = service::ServiceConfig::load(config_path);
  service::ChatService svc(config);
  service::HttpServer server(svc);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  const int port = server.bind(config.host, config.port);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  std::cout << "listening on http://" << config.host << ":" << port << std::endl;
  server.listen();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diabetes self-care conversational agent: NLU, dialogue, TTS and evaluation tools"};
  app.require_subcommand(1);
  std::function<int()> run;

  TrainTtsArgs tt;
  auto* c_tt = app.add_subcommand("train-tts", "Train the text-to-speech model on a speech corpus directory");
  c_tt->add_option("--data", tt.data, "Directory with metadata.csv (id|transcript) and id.wav files");
  c_tt->add_option("--steps", tt.steps, "Training steps (0 writes the initialized model)")->check(CLI::NonNegativeNumber);
  c_tt->add_option("--batch", tt.batch, "Batch size")->check(CLI::PositiveNumber);
  c_tt->add_option("--lr", tt.lr, "Initial learning rate")->check(CLI::PositiveNumber);
  c_tt->add_option("--lambda", tt.lambda, "Weight of the forward/backward consistency term")->check(CLI::NonNegativeNumber);
  c_tt->add_option("--seed", tt.seed, "Random seed");
  c_tt->add_option("--n-mels", tt.n_mels, "Mel bands")->check(CLI::Range(2, 512));
  c_tt->add_option("--dim", tt.model.dec_dim, "Encoder/decoder/attention width")->check(CLI::PositiveNumber);
  c_tt->add_option("--log-every", tt.log_every, "Log interval in steps")->check(CLI::PositiveNumber);
  c_tt->add_option("--out", tt.out, "Output checkpoint")->required();
  c_tt->callback([&] {
    tt.model.enc_dim = tt.model.attn_dim = tt.model.dec_dim;
    if (tt.steps > 0 && tt.data.empty()) throw CLI::ValidationError("--data", "required when --steps > 0");
    run = [&] { return train_tts(tt); };
  });

  std::string ckpt, text, wav_out;
  tts::SpeechOptions speech;
  auto* c_syn = app.add_subcommand("synth", "Synthesize speech from text with a trained checkpoint");
  c_syn->add_option("--ckpt", ckpt, "TTS checkpoint")->required()->check(CLI::ExistingFile);
  c_syn->add_option("--text", text, "Text to speak")->required();
  c_syn->add_option("--out", wav_out, "Output WAV")->required();
  c_syn->add_option("--max-frames", speech.max_frames_per_sentence, "Frame cap per sentence")->check(CLI::PositiveNumber);
  c_syn->add_option("--iterations", speech.griffin_lim_iterations, "Griffin-Lim iterations")->check(CLI::PositiveNumber);
  c_syn->callback([&] { run = [&] { return synth(ckpt, text, wav_out, speech); }; });

  std::string corpus, model_out;
  nlu::NluTrainOptions nopts;
  auto* c_nlu = app.add_subcommand("train-nlu", "Train the intent classifier");
  c_nlu->add_option("--corpus", corpus, "JSON array of {text, language, intent}")->required()->check(CLI::ExistingFile);
  c_nlu->add_option("--out", model_out, "Output model")->required();
  c_nlu->add_option("--epochs", nopts.epochs, "Epochs")->check(CLI::NonNegativeNumber);
  c_nlu->add_option("--lr", nopts.lr, "Learning rate")->check(CLI::PositiveNumber);
  c_nlu->add_option("--seed", nopts.seed, "Shuffle seed");
  c_nlu->callback([&] { run = [&] { return train_nlu(corpus, model_out, nopts); }; });

  std::string kb, model, lang = "en";
  dialogue::Thresholds th;
  auto* c_chat = app.add_subcommand("chat", "Chat in the terminal");
  c_chat->add_option("--kb", kb, "Knowledge base JSON")->required()->check(CLI::ExistingFile);
  c_chat->add_option("--model", model, "NLU model")->required()->check(CLI::ExistingFile);
  c_chat->add_option("--lang", lang, "Session language")->check(CLI::IsMember({"en", "zh"}));
  c_chat->add_option("--direct", th.direct, "Confidence needed to answer without confirming");
  c_chat->add_option("--confirm", th.confirm, "Confidence below which the user is referred to a professional");
  c_chat->callback([&] { run = [&] { return chat(kb, model, lang, th); }; });

  std::string csv, reported;
  bool as_json = false;
  auto* c_mos = app.add_subcommand("eval-mos", "Aggregate mean opinion scores");
  c_mos->add_option("--csv", csv, "judge_id,sample_id,condition,measure,score")->required()->check(CLI::ExistingFile);
  c_mos->add_option("--reported", reported, "Published overall values to check, e.g. naturalness=4.07,accent=3.98");
  c_mos->add_flag("--json", as_json, "Emit JSON");
  c_mos->callback([&] { run = [&] { return eval_mos(csv, reported, as_json); }; });

  auto* c_sus = app.add_subcommand("eval-sus", "Score System Usability Scale responses");
  c_sus->add_option("--csv", csv, "participant_id,q1,...,q10")->required()->check(CLI::ExistingFile);
  c_sus->add_flag("--json", as_json, "Emit JSON");
  c_sus->callback([&] { run = [&] { return eval_sus(csv, as_json); }; });

  std::string config;
  auto* c_serve = app.add_subcommand("serve", "Run the HTTP chat service");
  c_serve->add_option("--config", config, "Service config JSON (default: $AMANDA_CONFIG)");
  c_serve->callback([&] { run = [&] { return serve(config); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  try {
    return run();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return kFailure;
  }
}
