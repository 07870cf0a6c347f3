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

#include "amanda/service/archive.hpp"

#include <chrono>

#include "amanda/error.hpp"

namespace amanda::service {
namespace {

constexpr const char* kSessions = "sessions";
constexpr const char* kExchanges = "exchanges";
constexpr const char* kSecurity = "security";

std::string module_name(Module m) {
  switch (m) {
    case Module::Nlu: return "nlu";
    case Module::Dialogue: return "dialogue";
    case Module::Tts: return "tts";
    case Module::Api: return "api";
  }
  return "";
}

Module parse_module(const std::string& s) {
  for (Module m : {Module::Nlu, Module::Dialogue, Module::Tts, Module::Api})
    if (module_name(m) == s) return m;
  throw ParseError("unknown log module '" + s + "'");
}

std::string severity_name(Severity s) {
  switch (s) {
    case Severity::Info: return "info";
    case Severity::Warn: return "warn";
    case Severity::Error: return "error";
  }
  return "";
}

Severity parse_severity(const std::string& s) {
  for (Severity v : {Severity::Info, Severity::Warn, Severity::Error})
    if (severity_name(v) == s) return v;
  throw ParseError("unknown log severity '" + s + "'");
}

}  // namespace

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

json to_json(const ChatRecord& r) {
  json j{{"session_id", r.session_id},
         {"timestamp", r.timestamp_ms},
         {"direction", r.direction == Speaker::User ? "user" : "bot"},
         {"text", r.text},
         {"language", language_name(r.language)}};
  if (r.reply_kind) j["reply_kind"] = *r.reply_kind;
  if (r.audio_ref) j["audio_ref"] = *r.audio_ref;
  if (r.intent) j["intent"] = *r.intent;
  return j;
}

ChatRecord record_from_json(const json& j) {
  try {
    ChatRecord r;
    r.session_id = j.at("session_id");
    r.timestamp_ms = j.at("timestamp");
    const std::string dir = j.at("direction");
    if (dir != "user" && dir != "bot") throw ParseError("bad direction '" + dir + "'");
    r.direction = dir == "user" ? Speaker::User : Speaker::Bot;
    r.text = j.at("text");
    r.language = parse_language(j.at("language").get<std::string>());
    if (j.contains("reply_kind")) r.reply_kind = j["reply_kind"];
    if (j.contains("audio_ref")) r.audio_ref = j["audio_ref"];
    if (j.contains("intent")) r.intent = j["intent"];
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("chat record: ") + e.what());
  }
}

json to_json(const SecurityLogEntry& e) {
  return {{"timestamp", e.timestamp_ms},
          {"module", module_name(e.module)},
          {"severity", severity_name(e.severity)},
          {"detail", e.detail}};
}

SecurityLogEntry security_entry_from_json(const json& j) {
  try {
    return {j.at("timestamp"), parse_module(j.at("module")), parse_severity(j.at("severity")), j.at("detail")};
  } catch (const json::exception& e) {
    throw ParseError(std::string("security log entry: ") + e.what());
  }
}

ChatArchive::ChatArchive(DocumentStore& store) : store_(store) {
  for (const auto& doc : store_.scan(kSessions)) sessions_[doc.at("session_id").get<std::string>()];
  for (const auto& doc : store_.scan(kExchanges))
    for (const auto& r : doc.at("records")) {
      auto rec = record_from_json(r);
      sessions_[rec.session_id].push_back(std::move(rec));
    }
  for (const auto& doc : store_.scan(kSecurity)) security_.push_back(security_entry_from_json(doc));
}

bool ChatArchive::open_session(const std::string& session_id) {
  std::lock_guard lock(mu_);
  if (sessions_.count(session_id)) return false;
  store_.append(kSessions, {{"session_id", session_id}, {"created", now_ms()}});
  sessions_[session_id];
  return true;
}

bool ChatArchive::has_session(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  return sessions_.count(session_id) > 0;
}

void ChatArchive::append_exchange(ChatRecord user, ChatRecord bot) {
  if (user.session_id != bot.session_id) throw ValidationError("exchange spans two sessions");
  user.direction = Speaker::User;
  bot.direction = Speaker::Bot;
  std::lock_guard lock(mu_);
  auto& records = sessions_[user.session_id];
  std::int64_t t = now_ms();
  if (!records.empty()) t = std::max(t, records.back().timestamp_ms);
  user.timestamp_ms = std::max(user.timestamp_ms, t);
  bot.timestamp_ms = std::max(bot.timestamp_ms, user.timestamp_ms);
  store_.append(kExchanges, {{"records", json::array({to_json(user), to_json(bot)})}});
  records.push_back(std::move(user));
  records.push_back(std::move(bot));
}

std::vector<ChatRecord> ChatArchive::history(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session_id);
  return it == sessions_.end() ? std::vector<ChatRecord>{} : it->second;
}

void ChatArchive::log(Module module, Severity severity, std::string detail) {
  SecurityLogEntry e{now_ms(), module, severity, std::move(detail)};
  std::lock_guard lock(mu_);
  store_.append(kSecurity, to_json(e));
  security_.push_back(std::move(e));
}

std::vector<SecurityLogEntry> ChatArchive::security_log() const {
  std::lock_guard lock(mu_);
  return security_;
}

}  // namespace amanda::service
