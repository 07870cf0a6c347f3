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

#include "amanda/dialogue/dialogue.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace amanda::dialogue {
namespace {

using json = nlohmann::json;

struct Phrases {
  const char* handoff;
  const char* rephrase;
  const char* empty;
  const char* ask_question;
  const char* confirm_prefix;
  const char* confirm_suffix;
};

const Phrases& phrases(Language l) {
  static const Phrases en{
      "I'm sorry, I can't help with that question. Please consult your nurse or a doctor instead.",
      "Sorry about that. Could you please rephrase your question?",
      "I didn't catch that. Please type your question.",
      "Please ask me a question about diabetes care and I will do my best to help.",
      "Did you mean: \"",
      "\"?"};
  static const Phrases zh{"抱歉，我无法回答这个问题。请咨询您的护士或医生。",
                          "抱歉，请您换一种说法再问一次。",
                          "我没有收到您的问题，请输入您的问题。",
                          "请向我提出关于糖尿病护理的问题，我会尽力帮助您。",
                          "您是想问：“",
                          "”吗？"};
  return l == Language::En ? en : zh;
}

std::string normalise(std::string_view text) {
  std::string s;
  for (char ch : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  const auto* strip = " \t\r\n.!?,";
  const auto b = s.find_first_not_of(strip);
  if (b == std::string::npos) return {};
  s = s.substr(b, s.find_last_not_of(strip) - b + 1);
  // trailing full-width punctuation
  for (const std::string tail : {"。", "！", "？", "，"})
    while (s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0)
      s.erase(s.size() - tail.size());
  return s;
}

BotReply make_reply(ReplyKind kind, std::string text, std::string intent = {}) {
  BotReply r;
  r.kind = kind;
  r.text = std::move(text);
  r.intent = std::move(intent);
  return r;
}

BotReply answer(const FaqEntry& e, const KnowledgeBase& kb, Language l) {
  auto r = make_reply(ReplyKind::Answer, e.answer.at(l), e.intent_id);
  r.suggestions = suggest_related(e.intent_id, kb, l);
  return r;
}

std::map<Language, std::string> parse_texts(const json& j, const std::string& id, const char* key) {
  std::map<Language, std::string> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_object()) throw ParseError("kb entry '" + id + "': " + key + " must be an object keyed by language");
  for (const auto& [lang, text] : j[key].items()) {
    if (!text.is_string()) throw ParseError("kb entry '" + id + "': " + key + "." + lang + " must be a string");
    out[parse_language(lang)] = text.get<std::string>();
  }
  return out;
}

}  // namespace

const FaqEntry* KnowledgeBase::find(std::string_view intent_id) const {
  for (const auto& e : entries)
    if (e.intent_id == intent_id) return &e;
  return nullptr;
}

KnowledgeBase parse_kb(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("kb: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("kb: expected a JSON array of entries");
  KnowledgeBase kb;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& j = doc[i];
    if (!j.is_object() || !j.contains("intent_id") || !j["intent_id"].is_string())
      throw ParseError("kb: entry " + std::to_string(i) + " has no string intent_id");
    FaqEntry e;
    e.intent_id = j["intent_id"];
    e.topic = nlu::parse_topic(j.value("topic", "diabetes_care"));
    e.question = parse_texts(j, e.intent_id, "question");
    e.answer = parse_texts(j, e.intent_id, "answer");
    if (j.contains("related")) {
      if (!j["related"].is_array()) throw ParseError("kb entry '" + e.intent_id + "': related must be an array");
      for (const auto& r : j["related"]) e.related.push_back(r.get<std::string>());
    }
    kb.entries.push_back(std::move(e));
  }
  return kb;
}

std::vector<KbViolation> validate_kb(const KnowledgeBase& kb) {
  std::vector<KbViolation> out;
  std::set<std::string> seen;
  for (const auto& e : kb.entries) {
    if (!seen.insert(e.intent_id).second) out.push_back({e.intent_id, "duplicate intent_id"});
    for (Language l : {Language::En, Language::Zh}) {
      const std::string lang(language_name(l));
      auto q = e.question.find(l);
      auto a = e.answer.find(l);
      if (q == e.question.end() || q->second.empty()) out.push_back({e.intent_id, "missing question." + lang});
      if (a == e.answer.end() || a->second.empty()) out.push_back({e.intent_id, "missing answer." + lang});
    }
    if (e.related.size() > 3) out.push_back({e.intent_id, "more than 3 related questions"});
    for (const auto& r : e.related) {
      if (r == e.intent_id)
        out.push_back({e.intent_id, "related refers to itself"});
      else if (!kb.find(r))
        out.push_back({e.intent_id, "dangling related id '" + r + "'"});
    }
  }
  return out;
}

KnowledgeBase load_kb(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open kb " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto kb = parse_kb(ss.str());
  auto violations = validate_kb(kb);
  if (!violations.empty()) {
    std::string msg = "kb " + path.string() + " failed validation:";
    for (const auto& v : violations) msg += "\n  " + v.entry_id + ": " + v.message;
    throw ValidationError(msg);
  }
  return kb;
}

std::string_view phase_name(Phase p) { return p == Phase::Idle ? "Idle" : "AwaitingConfirmation"; }

std::string_view reply_kind_name(ReplyKind k) {
  switch (k) {
    case ReplyKind::Answer: return "Answer";
    case ReplyKind::Confirmation: return "Confirmation";
    case ReplyKind::Clarification: return "Clarification";
    case ReplyKind::Handoff: return "Handoff";
    case ReplyKind::SmallTalk: return "SmallTalk";
  }
  return "";
}

void Thresholds::validate() const {
  if (!(confirm >= 0.0 && confirm <= direct))
    throw ValidationError("thresholds need 0 <= confirm <= direct (got confirm " + std::to_string(confirm) +
                          ", direct " + std::to_string(direct) + ")");
}

Affirmation classify_affirmation(std::string_view text) {
  static const std::set<std::string> yes{"yes", "y", "yeah", "yep", "yup", "ok", "okay", "correct", "right", "sure",
                                         "是", "是的", "对", "对的", "好", "好的", "没错", "正确"};
  static const std::set<std::string> no{"no", "n", "nope", "nah", "wrong", "incorrect", "not really",
                                        "不", "不是", "不对", "错", "错了", "没有"};
  const std::string s = normalise(text);
  if (yes.count(s)) return Affirmation::Yes;
  if (no.count(s)) return Affirmation::No;
  return Affirmation::Neither;
}

IntentPredictor model_predictor(const nlu::NluModel& model) {
  return [&model](std::string_view text, Language l) { return nlu::predict_intent(text, l, model); };
}

Turn handle_message(const DialogueState& state, std::string_view text, const IntentPredictor& nlu,
                    const KnowledgeBase& kb, const Thresholds& thresholds) {
  thresholds.validate();
  Turn out{state, {}};
  auto& next = out.state;
  const Language lang = state.language;
  const Phrases& say = phrases(lang);
  next.turn_count = state.turn_count + 1;

  if (normalise(text).empty()) {
    out.reply = make_reply(ReplyKind::Clarification, say.empty);
    return out;
  }

  const Affirmation aff = classify_affirmation(text);
  const bool awaiting = state.phase == Phase::AwaitingConfirmation;
  next.phase = Phase::Idle;
  next.candidate.clear();
  if (awaiting && aff == Affirmation::Yes) {
    if (const auto* e = kb.find(state.candidate)) {
      out.reply = answer(*e, kb, lang);
    } else {
      out.reply = make_reply(ReplyKind::Handoff, say.handoff);
    }
    return out;
  }
  if (awaiting && aff == Affirmation::No) {
    out.reply = make_reply(ReplyKind::Clarification, say.rephrase);
    return out;
  }
  if (aff != Affirmation::Neither) {
    out.reply = make_reply(ReplyKind::Clarification, say.ask_question);
    return out;
  }

  const auto prediction = nlu(text, lang);
  const auto& [intent, confidence] = prediction.top();
  const FaqEntry* entry = kb.find(intent);
  if (!entry || entry->topic == Topic::OutOfScope || intent == "out_of_scope" || confidence < thresholds.confirm) {
    out.reply = make_reply(ReplyKind::Handoff, say.handoff, entry ? intent : std::string{});
    return out;
  }
  if (entry->topic == Topic::SmallTalk) {
    out.reply = make_reply(ReplyKind::SmallTalk, entry->answer.at(lang), intent);
    return out;
  }
  if (confidence >= thresholds.direct) {
    out.reply = answer(*entry, kb, lang);
    return out;
  }
  out.reply = make_reply(ReplyKind::Confirmation,
                         std::string(say.confirm_prefix) + entry->question.at(lang) + say.confirm_suffix, intent);
  next.phase = Phase::AwaitingConfirmation;
  next.candidate = intent;
  return out;
}

std::vector<std::string> suggest_related(std::string_view intent_id, const KnowledgeBase& kb, Language language) {
  std::vector<std::string> out;
  const auto* e = kb.find(intent_id);
  if (!e) return out;
  for (const auto& r : e->related) {
    if (out.size() == 3) break;
    const auto* other = kb.find(r);
    if (!other) continue;
    auto q = other->question.find(language);
    if (q != other->question.end()) out.push_back(q->second);
  }
  return out;
}

DialogueState switch_language(DialogueState state, Language language) {
  state.language = language;
  return state;
}

}  // namespace amanda::dialogue
