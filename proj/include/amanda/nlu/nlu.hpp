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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "amanda/language.hpp"
#include "amanda/nn/checkpoint.hpp"
#include "amanda/nn/tensor.hpp"

namespace amanda::nlu {

using nn::Index;
using Mat = nn::Mat<double>;
using Features = Eigen::SparseVector<double>;

inline constexpr Index kHashSize = Index{1} << 15;

enum class Topic { DiabetesCare, GlucoseMonitoring, Complications, SmallTalk, OutOfScope };

std::string_view topic_name(Topic t);
Topic parse_topic(std::string_view s);

struct IntentLabel {
  std::string id;
  Topic topic = Topic::DiabetesCare;
};

struct TrainingExample {
  std::string text;
  Language language = Language::En;
  std::string intent;
};

struct Corpus {
  std::vector<IntentLabel> intents;  // first-appearance order
  std::vector<TrainingExample> examples;
};

// A number mentioned in the text, e.g. a glucose reading.
struct NumericEntity {
  double value = 0;
  std::string text;
  std::size_t offset = 0;
};

struct IntentPrediction {
  std::vector<std::pair<std::string, double>> ranked;
  std::vector<NumericEntity> numbers;

  const std::pair<std::string, double>& top() const { return ranked.front(); }
};

struct NluModel {
  std::vector<IntentLabel> intents;
  Mat weights;  // kHashSize x intents
  Mat bias;     // 1 x intents

  Index size() const { return static_cast<Index>(intents.size()); }
  const IntentLabel* find(std::string_view id) const;
  void validate() const;
};

struct NluTrainOptions {
  int epochs = 60;
  double lr = 0.05;
  std::size_t batch = 16;
  std::uint64_t seed = 0;
};

struct NluTrainReport {
  double initial_loss = 0;
  double final_loss = 0;
};

// en: lowercase ASCII, drop punctuation, split on whitespace.
// zh: one token per non-space, non-punctuation code point.
std::vector<std::string> tokenize(std::string_view text, Language language);

Index feature_index(std::string_view gram);
Features featurize(const std::vector<std::string>& tokens);

std::vector<NumericEntity> extract_numbers(std::string_view text);

Corpus make_corpus(std::vector<TrainingExample> examples, const std::vector<IntentLabel>& known = {});
Corpus parse_corpus(std::string_view json_text);
Corpus load_corpus(const std::filesystem::path& path);

// Mean cross-entropy of the model over the corpus.
double corpus_loss(const NluModel& model, const Corpus& corpus);

NluModel train_intents(const Corpus& corpus, const NluTrainOptions& opts = {},
                       NluTrainReport* report = nullptr);

Eigen::RowVectorXd intent_probabilities(const Features& x, const NluModel& model);
IntentPrediction predict_intent(std::string_view text, Language language, const NluModel& model);

nn::Checkpoint to_checkpoint(const NluModel& model);
NluModel model_from_checkpoint(const nn::Checkpoint& ckpt);
void save_model(const NluModel& model, const std::filesystem::path& path);
NluModel load_model(const std::filesystem::path& path);

}  // namespace amanda::nlu
