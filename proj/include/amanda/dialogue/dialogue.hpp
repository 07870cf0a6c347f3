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

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amanda/language.hpp"
#include "amanda/nlu/nlu.hpp"

namespace amanda::dialogue {

using nlu::Topic;

struct FaqEntry {
  std::string intent_id;
  Topic topic = Topic::DiabetesCare;
  std::map<Language, std::string> question;
  std::map<Language, std::string> answer;
  std::vector<std::string> related;
};

// Immutable after loading; share freely between sessions.
struct KnowledgeBase {
  std::vector<FaqEntry> entries;

  const FaqEntry* find(std::string_view intent_id) const;
};

struct KbViolation {
  std::string entry_id;
  std::string message;
};

KnowledgeBase parse_kb(std::string_view json_text);
std::vector<KbViolation> validate_kb(const KnowledgeBase& kb);
// Parses and validates; throws ValidationError listing every violation.
KnowledgeBase load_kb(const std::filesystem::path& path);

enum class Phase { Idle, AwaitingConfirmation };
enum class ReplyKind { Answer, Confirmation, Clarification, Handoff, SmallTalk };

std::string_view phase_name(Phase p);
std::string_view reply_kind_name(ReplyKind k);

struct DialogueState {
  std::string session_id;
  Language language = Language::En;
  Phase phase = Phase::Idle;
  std::string candidate;  // intent awaiting confirmation
  int turn_count = 0;
};

struct BotReply {
  std::string text;
  ReplyKind kind = ReplyKind::Clarification;
  std::vector<std::string> suggestions;
  std::optional<std::string> audio_ref;
  std::string intent;  // the intent answered or proposed, if any
};

struct Thresholds {
  double direct = 1.01;  // above any softmax confidence: always confirm first
  double confirm = 0.35;

  void validate() const;
};

enum class Affirmation { Yes, No, Neither };

// Accepts both languages' lexicons, plus the UI's "yes"/"no" button payloads.
Affirmation classify_affirmation(std::string_view text);

using IntentPredictor = std::function<nlu::IntentPrediction(std::string_view, Language)>;

IntentPredictor model_predictor(const nlu::NluModel& model);

struct Turn {
  DialogueState state;
  BotReply reply;
};

Turn handle_message(const DialogueState& state, std::string_view text, const IntentPredictor& nlu,
                    const KnowledgeBase& kb, const Thresholds& thresholds = {});

std::vector<std::string> suggest_related(std::string_view intent_id, const KnowledgeBase& kb, Language language);

DialogueState switch_language(DialogueState state, Language language);

}  // namespace amanda::dialogue
