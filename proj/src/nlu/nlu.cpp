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

#include "amanda/nlu/nlu.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "amanda/nn/optim.hpp"

namespace amanda::nlu {
namespace {

using json = nlohmann::json;

constexpr std::string_view kFormat = "amanda-nlu";

// Decodes one UTF-8 code point starting at text[i]; malformed bytes decode as themselves.
char32_t next_code_point(std::string_view text, std::size_t& i, std::size_t& len) {
  const auto b = static_cast<unsigned char>(text[i]);
  len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 1;
  if (i + len > text.size()) len = 1;
  char32_t cp = len == 1 ? b : len == 2 ? (b & 0x1F) : len == 3 ? (b & 0x0F) : (b & 0x07);
  for (std::size_t k = 1; k < len; ++k) {
    const auto c = static_cast<unsigned char>(text[i + k]);
    if ((c & 0xC0) != 0x80) {
      len = 1;
      return b;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  return cp;
}

bool is_wide_punct(char32_t cp) {
  return (cp >= 0x2000 && cp <= 0x206F) || (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFF01 && cp <= 0xFF0F) ||
         (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(ws) - b + 1));
}

Eigen::RowVectorXd softmax_row(Eigen::RowVectorXd z) {
  z.array() -= z.maxCoeff();
  z = z.array().exp().matrix();
  return z / z.sum();
}

}  // namespace

std::string_view topic_name(Topic t) {
  switch (t) {
    case Topic::DiabetesCare: return "diabetes_care";
    case Topic::GlucoseMonitoring: return "glucose_monitoring";
    case Topic::Complications: return "complications";
    case Topic::SmallTalk: return "small_talk";
    case Topic::OutOfScope: return "out_of_scope";
  }
  return "";
}

Topic parse_topic(std::string_view s) {
  for (Topic t : {Topic::DiabetesCare, Topic::GlucoseMonitoring, Topic::Complications, Topic::SmallTalk,
                  Topic::OutOfScope})
    if (topic_name(t) == s) return t;
  throw ValidationError("unknown topic '" + std::string(s) + "'");
}

const IntentLabel* NluModel::find(std::string_view id) const {
  for (const auto& l : intents)
    if (l.id == id) return &l;
  return nullptr;
}

void NluModel::validate() const {
  if (intents.size() < 2) throw ValidationError("nlu model needs at least 2 intents");
  if (weights.rows() != kHashSize || weights.cols() != size() || bias.rows() != 1 || bias.cols() != size())
    throw DimensionError("nlu model weights do not match " + std::to_string(size()) + " intents");
}

std::vector<std::string> tokenize(std::string_view text, Language language) {
  std::vector<std::string> tokens;
  if (language == Language::En) {
    std::string cur;
    for (char ch : text) {
      const auto c = static_cast<unsigned char>(ch);
      if (std::isspace(c)) {
        if (!cur.empty()) tokens.push_back(std::move(cur));
        cur.clear();
      } else if (c >= 0x80 || std::isalnum(c)) {
        cur.push_back(static_cast<char>(std::tolower(c)));
      }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
  }
  for (std::size_t i = 0, len = 0; i < text.size(); i += len) {
    const char32_t cp = next_code_point(text, i, len);
    if (cp < 0x80) {
      const auto c = static_cast<unsigned char>(cp);
      if (std::isspace(c) || std::ispunct(c)) continue;
      tokens.emplace_back(1, static_cast<char>(std::tolower(c)));
    } else if (!is_wide_punct(cp)) {
      tokens.emplace_back(text.substr(i, len));
    }
  }
  return tokens;
}

Index feature_index(std::string_view gram) { return static_cast<Index>(fnv1a(gram) % kHashSize); }

Features featurize(const std::vector<std::string>& tokens) {
  Features x(kHashSize);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    x.coeffRef(feature_index(tokens[i])) += 1.0;
    if (i + 1 < tokens.size()) x.coeffRef(feature_index(tokens[i] + '\x1f' + tokens[i + 1])) += 1.0;
  }
  const double n = x.norm();
  if (n > 0) x /= n;
  return x;
}

std::vector<NumericEntity> extract_numbers(std::string_view text) {
  std::vector<NumericEntity> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j + 1 < text.size() && text[j] == '.' && std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
      ++j;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    }
    NumericEntity e;
    e.text = std::string(text.substr(i, j - i));
    e.offset = i;
    std::from_chars(e.text.data(), e.text.data() + e.text.size(), e.value);
    out.push_back(std::move(e));
    i = j;
  }
  return out;
}

Corpus make_corpus(std::vector<TrainingExample> examples, const std::vector<IntentLabel>& known) {
  Corpus c;
  c.intents = known;
  for (auto& ex : examples) {
    if (trim(ex.text).empty()) throw ValidationError("training example for '" + ex.intent + "' has empty text");
    if (ex.intent.empty()) throw ValidationError("training example '" + ex.text + "' has no intent");
    const bool seen = std::any_of(c.intents.begin(), c.intents.end(), [&](const auto& l) { return l.id == ex.intent; });
    if (!seen) c.intents.push_back({ex.intent, ex.intent == "out_of_scope" ? Topic::OutOfScope : Topic::DiabetesCare});
  }
  c.examples = std::move(examples);
  return c;
}

Corpus parse_corpus(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("nlu corpus: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("nlu corpus: expected a JSON array of {text, language, intent}");
  std::vector<TrainingExample> examples;
  std::vector<IntentLabel> labels;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    if (!e.is_object() || !e.contains("text") || !e.contains("intent") || !e["text"].is_string() ||
        !e["intent"].is_string())
      throw ParseError("nlu corpus: entry " + std::to_string(i) + " needs string fields text and intent");
    TrainingExample ex{e["text"], parse_language(e.value("language", "en")), e["intent"]};
    if (e.contains("topic")) {
      const Topic t = parse_topic(e["topic"].get<std::string>());
      auto it = std::find_if(labels.begin(), labels.end(), [&](const auto& l) { return l.id == ex.intent; });
      if (it == labels.end())
        labels.push_back({ex.intent, t});
      else if (it->topic != t)
        throw ValidationError("nlu corpus: intent '" + ex.intent + "' given two topics");
    }
    examples.push_back(std::move(ex));
  }
  auto corpus = make_corpus(std::move(examples));
  for (auto& l : corpus.intents)
    for (const auto& given : labels)
      if (given.id == l.id) l.topic = given.topic;
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open nlu corpus " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str());
}

Eigen::RowVectorXd intent_probabilities(const Features& x, const NluModel& model) {
  Eigen::RowVectorXd z = model.bias.row(0);
  for (Features::InnerIterator it(x); it; ++it) z += it.value() * model.weights.row(it.index());
  return softmax_row(std::move(z));
}

double corpus_loss(const NluModel& model, const Corpus& corpus) {
  double total = 0;
  for (const auto& ex : corpus.examples) {
    const auto p = intent_probabilities(featurize(tokenize(ex.text, ex.language)), model);
    const auto it = std::find_if(model.intents.begin(), model.intents.end(), [&](const auto& l) { return l.id == ex.intent; });
    if (it == model.intents.end()) throw ValidationError("intent '" + ex.intent + "' unknown to the model");
    total -= std::log(std::max(p(it - model.intents.begin()), 1e-300));
  }
  return corpus.examples.empty() ? 0.0 : total / static_cast<double>(corpus.examples.size());
}

NluModel train_intents(const Corpus& corpus, const NluTrainOptions& opts, NluTrainReport* report) {
  if (corpus.intents.size() < 2) throw ValidationError("train_intents needs at least 2 distinct intents");
  if (opts.epochs < 0 || opts.lr <= 0 || opts.batch == 0) throw ValidationError("train_intents: bad options");
  const Index classes = static_cast<Index>(corpus.intents.size());
  std::vector<Index> label(corpus.examples.size());
  std::vector<Features> feats;
  std::vector<bool> covered(corpus.intents.size(), false);
  for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
    const auto& ex = corpus.examples[i];
    auto it = std::find_if(corpus.intents.begin(), corpus.intents.end(), [&](const auto& l) { return l.id == ex.intent; });
    if (it == corpus.intents.end()) throw ValidationError("example intent '" + ex.intent + "' not among the intents");
    label[i] = it - corpus.intents.begin();
    covered[label[i]] = true;
    feats.push_back(featurize(tokenize(ex.text, ex.language)));
  }
  for (std::size_t k = 0; k < covered.size(); ++k)
    if (!covered[k]) throw ValidationError("intent '" + corpus.intents[k].id + "' has no training examples");

  NluModel model{corpus.intents, Mat::Zero(kHashSize, classes), Mat::Zero(1, classes)};
  if (report) report->initial_loss = corpus_loss(model, corpus);

  nn::Tensor w(model.weights, true), b(model.bias, true);
  std::vector<nn::Tensor> params{w, b};
  nn::AdamState state;
  nn::LrSchedule schedule{.initial_lr = opts.lr, .decay_start_step = std::numeric_limits<long>::max()};
  std::mt19937_64 rng(opts.seed);
  std::vector<std::size_t> order(feats.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += opts.batch) {
      const std::size_t end = std::min(order.size(), start + opts.batch);
      const Index rows = static_cast<Index>(end - start);
      // Logits = A * W[active rows] + b, where A holds each example's feature values.
      std::vector<Index> active;
      std::vector<std::tuple<Index, Index, double>> entries;
      Mat targets = Mat::Zero(rows, classes);
      for (std::size_t r = start; r < end; ++r) {
        const Index row = static_cast<Index>(r - start);
        targets(row, label[order[r]]) = 1.0;
        for (Features::InnerIterator it(feats[order[r]]); it; ++it) {
          entries.emplace_back(row, static_cast<Index>(active.size()), it.value());
          active.push_back(it.index());
        }
      }
      nn::Tensor logits = nn::add(nn::Tensor(Mat::Zero(rows, classes)), b);
      if (!active.empty()) {
        Mat a = Mat::Zero(rows, static_cast<Index>(active.size()));
        for (const auto& [r, c, v] : entries) a(r, c) = v;
        logits = nn::add(nn::matmul(nn::Tensor(a), nn::gather_rows(w, active)), b);
      }
      nn::zero_grads(std::span<nn::Tensor>(params));
      nn::backward(nn::softmax_cross_entropy(logits, nn::Tensor(targets)));
      nn::adam_step(std::span<nn::Tensor>(params), state, schedule);
    }
  }
  model.weights = w.value();
  model.bias = b.value();
  if (report) report->final_loss = corpus_loss(model, corpus);
  return model;
}

IntentPrediction predict_intent(std::string_view text, Language language, const NluModel& model) {
  const std::string t = trim(text);
  if (t.empty()) throw ValidationError("empty input");
  const auto p = intent_probabilities(featurize(tokenize(t, language)), model);
  std::vector<Index> order(static_cast<std::size_t>(model.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return p(a) > p(b); });
  IntentPrediction out;
  for (Index k : order) out.ranked.emplace_back(model.intents[static_cast<std::size_t>(k)].id, p(k));
  out.numbers = extract_numbers(t);
  return out;
}

nn::Checkpoint to_checkpoint(const NluModel& model) {
  model.validate();
  nn::Checkpoint ckpt;
  ckpt.meta["format"] = kFormat;
  ckpt.meta["hash_size"] = kHashSize;
  json intents = json::array();
  for (const auto& l : model.intents) intents.push_back({{"id", l.id}, {"topic", topic_name(l.topic)}});
  ckpt.meta["intents"] = intents;
  ckpt.tensors = {{"weights", model.weights}, {"bias", model.bias}};
  return ckpt;
}

NluModel model_from_checkpoint(const nn::Checkpoint& ckpt) {
  if (ckpt.meta.value("format", "") != kFormat) throw ParseError("checkpoint is not an nlu model");
  if (ckpt.meta.value("hash_size", Index{0}) != kHashSize) throw ParseError("nlu model hash size mismatch");
  NluModel m;
  try {
    for (const auto& l : ckpt.meta.at("intents")) m.intents.push_back({l.at("id"), parse_topic(l.at("topic").get<std::string>())});
  } catch (const json::exception& e) {
    throw ParseError(std::string("nlu model intents: ") + e.what());
  }
  m.weights = ckpt.get("weights");
  m.bias = ckpt.get("bias");
  m.validate();
  return m;
}

void save_model(const NluModel& model, const std::filesystem::path& path) {
  nn::save_checkpoint(path, to_checkpoint(model));
}

NluModel load_model(const std::filesystem::path& path) { return model_from_checkpoint(nn::load_checkpoint(path)); }

}  // namespace amanda::nlu
