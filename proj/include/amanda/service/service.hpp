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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "amanda/dialogue/dialogue.hpp"
#include "amanda/nlu/nlu.hpp"
#include "amanda/service/archive.hpp"
#include "amanda/service/store.hpp"
#include "amanda/tts/voice.hpp"

namespace amanda::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path kb;
  std::filesystem::path nlu_model;
  std::optional<std::filesystem::path> tts_checkpoint;
  dialogue::Thresholds thresholds;
  std::filesystem::path store_dir = "amanda-store";
  bool tts_enabled = false;
  std::optional<std::filesystem::path> static_dir;
  tts::SpeechOptions speech;
  std::size_t max_body_bytes = 16 * 1024;

  // Relative paths resolve against base_dir.
  static ServiceConfig from_json(const json& j, const std::filesystem::path& base_dir = {});
  static ServiceConfig load(const std::filesystem::path& path);
  // Referenced files must exist.
  void validate() const;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class ChatService {
 public:
  // Uses a FileStore under config.store_dir unless a store is supplied.
  explicit ChatService(ServiceConfig config, std::unique_ptr<DocumentStore> store = nullptr);
  // For tests: skip loading model files.
  ChatService(ServiceConfig config, dialogue::KnowledgeBase kb, dialogue::IntentPredictor nlu,
              std::unique_ptr<DocumentStore> store, std::optional<tts::Voice> voice = std::nullopt);

  HttpResponse post_chat(std::string_view body);
  HttpResponse post_session(std::string_view body);
  HttpResponse get_history(std::string_view session_id);
  HttpResponse get_audio(std::string_view id);

  // Logs the failure and returns a response that reveals nothing about it.
  HttpResponse internal_error(Module module, std::string_view what);

  const ServiceConfig& config() const { return config_; }
  ChatArchive& archive() { return *archive_; }

 private:
  struct Session {
    std::mutex mu;
    std::optional<dialogue::DialogueState> state;
  };

  Session& session(const std::string& id);
  dialogue::DialogueState restore_state(const std::string& id, Language fallback) const;
  std::optional<std::string> synthesize(const std::string& text);
  HttpResponse bad_request(std::string detail, std::string message);

  ServiceConfig config_;
  dialogue::KnowledgeBase kb_;
  std::optional<nlu::NluModel> model_;
  dialogue::IntentPredictor nlu_;
  std::optional<tts::Voice> voice_;
  std::unique_ptr<DocumentStore> store_;
  std::unique_ptr<ChatArchive> archive_;
  std::mutex sessions_mu_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
};

std::string random_id();

}  // namespace amanda::service
