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

#include <cmath>
#include <filesystem>

#include "amanda/nlu/nlu.hpp"
#include "gtest/gtest.h"

namespace amanda::nlu {
namespace {

const std::filesystem::path kRoot = AMANDA_SOURCE_DIR;

void expect_distribution(const IntentPrediction& p) {
  ASSERT_FALSE(p.ranked.empty());
  double sum = 0;
  for (std::size_t i = 0; i < p.ranked.size(); ++i) {
    EXPECT_GE(p.ranked[i].second, 0.0);
    EXPECT_LE(p.ranked[i].second, 1.0);
    if (i > 0) EXPECT_LE(p.ranked[i].second, p.ranked[i - 1].second);
    sum += p.ranked[i].second;
  }
  EXPECT_NEAR(sum, 1.0, 1e-6);
}

double accuracy(const Corpus& corpus, const NluModel& model) {
  int hits = 0;
  for (const auto& ex : corpus.examples) hits += predict_intent(ex.text, ex.language, model).top().first == ex.intent;
  return static_cast<double>(hits) / static_cast<double>(corpus.examples.size());
}

class DisjointCorpus : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    train_ = new Corpus(load_corpus(kRoot / "tests/fixtures/nlu_disjoint_train.json"));
    model_ = new NluModel(train_intents(*train_, {}, &report_));
  }
  static void TearDownTestSuite() {
    delete train_;
    delete model_;
  }
  static Corpus* train_;
  static NluModel* model_;
  static NluTrainReport report_;
};
Corpus* DisjointCorpus::train_ = nullptr;
NluModel* DisjointCorpus::model_ = nullptr;
NluTrainReport DisjointCorpus::report_;

TEST(Tokenize, English) {
  EXPECT_EQ(tokenize("What is diabetes?", Language::En), (std::vector<std::string>{"what", "is", "diabetes"}));
  EXPECT_TRUE(tokenize("", Language::En).empty());
  EXPECT_EQ(tokenize("  Blood-Sugar  7.5 ", Language::En), (std::vector<std::string>{"bloodsugar", "75"}));
}

TEST(Tokenize, ChinesePerCharacter) {
  EXPECT_EQ(tokenize("糖尿病", Language::Zh).size(), 3u);
  EXPECT_EQ(tokenize("糖尿病？", Language::Zh), (std::vector<std::string>{"糖", "尿", "病"}));
  EXPECT_TRUE(tokenize("", Language::Zh).empty());
}

TEST(Featurize, EmptyIsZero) { EXPECT_EQ(featurize({}).nonZeros(), 0); }

TEST(Featurize, UnitNormAndDeterministic) {
  for (const auto* text : {"a", "high blood sugar", "low low low", "糖尿病"}) {
    auto toks = tokenize(text, Language::Zh);
    auto x = featurize(toks);
    EXPECT_NEAR(x.norm(), 1.0, 1e-12) << text;
    EXPECT_TRUE(x.isApprox(featurize(toks)));
  }
}

TEST(Featurize, BigramsSeparateHighFromLow) {
  auto high = featurize(tokenize("high blood sugar", Language::En));
  auto low = featurize(tokenize("low blood sugar", Language::En));
  EXPECT_LT(high.dot(low), 1.0 - 1e-6);
  EXPECT_GT(high.dot(low), 0.0);
}

TEST(Numbers, ExtractsDecimals) {
  auto n = extract_numbers("my reading was 7.5 then 12. later 3");
  ASSERT_EQ(n.size(), 3u);
  EXPECT_DOUBLE_EQ(n[0].value, 7.5);
  EXPECT_EQ(n[0].offset, 15u);
  EXPECT_DOUBLE_EQ(n[1].value, 12.0);
  EXPECT_EQ(n[1].text, "12");
  EXPECT_DOUBLE_EQ(n[2].value, 3.0);
  EXPECT_TRUE(extract_numbers("no digits").empty());
}

TEST(Train, SingleIntentRejected) {
  auto c = make_corpus({{"hello", Language::En, "greet"}, {"hi", Language::En, "greet"}});
  EXPECT_THROW(train_intents(c), ValidationError);
}

TEST(Train, IntentWithoutExamplesRejected) {
  auto c = make_corpus({{"hello", Language::En, "greet"}}, {{"bye", Topic::SmallTalk}, {"greet", Topic::SmallTalk}});
  EXPECT_THROW(train_intents(c), ValidationError);
}

TEST(Train, DuplicatesAreFine) {
  auto c = make_corpus({{"hello", Language::En, "greet"},
                        {"hello", Language::En, "greet"},
                        {"bye", Language::En, "bye"},
                        {"bye", Language::En, "bye"}});
  auto m = train_intents(c);
  EXPECT_EQ(predict_intent("hello", Language::En, m).top().first, "greet");
}

TEST(Train, DeterministicGivenSeed) {
  auto c = load_corpus(kRoot / "tests/fixtures/nlu_disjoint_train.json");
  auto a = train_intents(c, {.seed = 3});
  auto b = train_intents(c, {.seed = 3});
  EXPECT_TRUE(a.weights == b.weights);
  EXPECT_TRUE(a.bias == b.bias);
}

TEST_F(DisjointCorpus, LossDecreases) { EXPECT_LT(report_.final_loss, report_.initial_loss); }

TEST_F(DisjointCorpus, PerfectTrainingAccuracy) {
  for (const auto& ex : train_->examples)
    EXPECT_EQ(predict_intent(ex.text, ex.language, *model_).top().first, ex.intent) << ex.text;
}

TEST_F(DisjointCorpus, HeldOutParaphrases) {
  auto held = load_corpus(kRoot / "tests/fixtures/nlu_disjoint_heldout.json");
  EXPECT_GE(accuracy(held, *model_), 0.8);
}

TEST_F(DisjointCorpus, ConfidencesAreDistributions) {
  for (const auto* text : {"glucose", "feet", "zzz", "?", "what should I eat for my feet glucose"})
    expect_distribution(predict_intent(text, Language::En, *model_));
}

TEST_F(DisjointCorpus, InvariantToCaseAndOuterWhitespace) {
  for (const auto& ex : train_->examples) {
    auto a = predict_intent(ex.text, Language::En, *model_);
    std::string shouted = ex.text;
    for (auto& c : shouted) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    auto b = predict_intent("  \t" + shouted + " \n", Language::En, *model_);
    ASSERT_EQ(a.ranked.size(), b.ranked.size());
    for (std::size_t i = 0; i < a.ranked.size(); ++i) {
      EXPECT_EQ(a.ranked[i].first, b.ranked[i].first);
      EXPECT_EQ(a.ranked[i].second, b.ranked[i].second);
    }
  }
}

TEST_F(DisjointCorpus, UnseenTokensFallBackToBias) {
  const std::string unseen = "xylophone";
  const Index idx = feature_index(unseen);
  ASSERT_EQ(model_->weights.row(idx).cwiseAbs().maxCoeff(), 0.0) << "hash collision with a training feature";
  auto p = predict_intent(unseen, Language::En, *model_);
  Eigen::RowVectorXd z = model_->bias.row(0);
  Eigen::RowVectorXd expected = (z.array() - z.maxCoeff()).exp();
  expected /= expected.sum();
  for (const auto& [id, conf] : p.ranked) {
    const auto k = model_->find(id) - model_->intents.data();
    EXPECT_NEAR(conf, expected(k), 1e-15);
  }
  // punctuation-only input has no features at all
  auto q = predict_intent("?!", Language::En, *model_);
  EXPECT_EQ(q.ranked, p.ranked);
}

TEST_F(DisjointCorpus, EmptyInputIsAnError) {
  EXPECT_THROW(predict_intent("", Language::En, *model_), ValidationError);
  EXPECT_THROW(predict_intent("   ", Language::En, *model_), ValidationError);
}

TEST_F(DisjointCorpus, CheckpointRoundTrip) {
  auto back = model_from_checkpoint(nn::decode_checkpoint(nn::encode_checkpoint(to_checkpoint(*model_))));
  ASSERT_EQ(back.intents.size(), model_->intents.size());
  for (const auto& ex : train_->examples)
    EXPECT_EQ(predict_intent(ex.text, ex.language, back).top().first, ex.intent);
  auto ckpt = to_checkpoint(*model_);
  ckpt.meta["format"] = "amanda-tts";
  EXPECT_THROW(model_from_checkpoint(ckpt), ParseError);
}

TEST(BundledCorpus, TrainsAndGeneralises) {
  auto corpus = load_corpus(kRoot / "data/nlu_corpus.json");
  EXPECT_GE(corpus.intents.size(), 12u);
  EXPECT_EQ(corpus.intents.back().topic, Topic::OutOfScope);
  auto model = train_intents(corpus);
  EXPECT_GE(accuracy(corpus, model), 0.95);
  auto held = load_corpus(kRoot / "data/nlu_heldout.json");
  EXPECT_GE(accuracy(held, model), 0.8);
  expect_distribution(predict_intent("糖尿病", Language::Zh, model));
}

TEST(Corpus, ParseErrors) {
  EXPECT_THROW(parse_corpus(""), ParseError);
  EXPECT_THROW(parse_corpus("{}"), ParseError);
  EXPECT_THROW(parse_corpus(R"([{"text": "hi"}])"), ParseError);
  EXPECT_THROW(parse_corpus(R"([{"text": "", "intent": "x"}])"), ValidationError);
  EXPECT_THROW(parse_corpus(R"([{"text": "hi", "intent": "x", "language": "fr"}])"), ValidationError);
}

}  // namespace
}  // namespace amanda::nlu
