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
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "amanda/language.hpp"
#include "amanda/service/store.hpp"

namespace amanda::service {

enum class Speaker { User, Bot };

struct ChatRecord {
  std::string session_id;
  std::int64_t timestamp_ms = 0;  // UTC
  Speaker direction = Speaker::User;
  std::string text;
  Language language = Language::En;
  std::optional<std::string> reply_kind;  // bot turns
  std::optional<std::string> audio_ref;
  std::optional<std::string> intent;  // bot turns that answer or propose an intent
};

json to_json(const ChatRecord& r);
ChatRecord record_from_json(const json& j);

enum class Module { Nlu, Dialogue, Tts, Api };
enum class Severity { Info, Warn, Error };

// Metadata only: never the user's message text.
struct SecurityLogEntry {
  std::int64_t timestamp_ms = 0;
  Module module = Module::Api;
  Severity severity = Severity::Info;
  std::string detail;
};

json to_json(const SecurityLogEntry& e);
SecurityLogEntry security_entry_from_json(const json& j);

std::int64_t now_ms();

// Chat history and security log over a document store. The user turn and
// bot reply of one exchange go to the store as a single document.
class ChatArchive {
 public:
  explicit ChatArchive(DocumentStore& store);

  // Returns false if the session already existed.
  bool open_session(const std::string& session_id);
  bool has_session(const std::string& session_id) const;

  // Stamps both records with a timestamp no earlier than the session's last.
  void append_exchange(ChatRecord user, ChatRecord bot);
  std::vector<ChatRecord> history(const std::string& session_id) const;

  void log(Module module, Severity severity, std::string detail);
  std::vector<SecurityLogEntry> security_log() const;

 private:
  DocumentStore& store_;
  mutable std::mutex mu_;
  std::map<std::string, std::vector<ChatRecord>> sessions_;
  std::vector<SecurityLogEntry> security_;
};

}  // namespace amanda::service
