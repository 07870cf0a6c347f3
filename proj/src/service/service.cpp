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

#include "amanda/service/service.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "amanda/signal/wav.hpp"

namespace amanda::service {
namespace {

constexpr std::size_t kMaxSessionId = 128;

json error_body(std::string_view message) { return {{"error", message}}; }

HttpResponse json_response(int status, const json& j) { return {status, "application/json", j.dump()}; }

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

bool valid_session_id(const std::string& id) {
  if (id.empty() || id.size() > kMaxSessionId) return false;
  for (unsigned char c : id)
    if (c < 0x21 || c == 0x7f) return false;
  return true;
}

}  // namespace

std::string random_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream os;
  os << std::hex;
  for (int i = 0; i < 2; ++i) {
    const auto v = rng();
    for (int b = 60; b >= 0; b -= 4) os << ((v >> b) & 0xF);
  }
  return os.str();
}

ServiceConfig ServiceConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  ServiceConfig c;
  try {
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.kb = resolve(j.at("kb").get<std::string>(), base_dir);
    c.nlu_model = resolve(j.at("nlu_model").get<std::string>(), base_dir);
    if (j.contains("tts_checkpoint") && !j["tts_checkpoint"].is_null())
      c.tts_checkpoint = resolve(j["tts_checkpoint"].get<std::string>(), base_dir);
    if (j.contains("thresholds")) {
      c.thresholds.direct = j["thresholds"].value("direct", c.thresholds.direct);
      c.thresholds.confirm = j["thresholds"].value("confirm", c.thresholds.confirm);
    }
    c.store_dir = resolve(j.value("store_dir", c.store_dir.string()), base_dir);
    c.tts_enabled = j.value("tts_enabled", c.tts_enabled);
    if (j.contains("static_dir") && !j["static_dir"].is_null())
      c.static_dir = resolve(j["static_dir"].get<std::string>(), base_dir);
    c.speech.griffin_lim_iterations = j.value("griffin_lim_iterations", c.speech.griffin_lim_iterations);
    c.speech.max_frames_per_sentence = j.value("max_frames", c.speech.max_frames_per_sentence);
    c.max_body_bytes = j.value("max_body_bytes", c.max_body_bytes);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("service config: ") + e.what());
  }
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("config " + path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw ValidationError("port out of range");
  thresholds.validate();
  if (!std::filesystem::is_regular_file(kb)) throw ValidationError("kb file not found: " + kb.string());
  if (!std::filesystem::is_regular_file(nlu_model))
    throw ValidationError("nlu model not found: " + nlu_model.string());
  if (tts_enabled && !tts_checkpoint) throw ValidationError("tts_enabled needs tts_checkpoint");
  if (tts_checkpoint && !std::filesystem::is_regular_file(*tts_checkpoint))
    throw ValidationError("tts checkpoint not found: " + tts_checkpoint->string());
  if (static_dir && !std::filesystem::is_directory(*static_dir))
    throw ValidationError("static_dir not found: " + static_dir->string());
}

ChatService::ChatService(ServiceConfig config, std::unique_ptr<DocumentStore> store) : config_(std::move(config)) {
  config_.validate();
  kb_ = dialogue::load_kb(config_.kb);
  model_ = nlu::load_model(config_.nlu_model);
  nlu_ = dialogue::model_predictor(*model_);
  if (config_.tts_enabled) voice_ = tts::Voice::load(*config_.tts_checkpoint);
  store_ = store ? std::move(store) : std::make_unique<FileStore>(config_.store_dir);
  archive_ = std::make_unique<ChatArchive>(*store_);
}

ChatService::ChatService(ServiceConfig config, dialogue::KnowledgeBase kb, dialogue::IntentPredictor nlu,
                         std::unique_ptr<DocumentStore> store, std::optional<tts::Voice> voice)
    : config_(std::move(config)),
      kb_(std::move(kb)),
      nlu_(std::move(nlu)),
      voice_(std::move(voice)),
      store_(std::move(store)) {
  config_.thresholds.validate();
  if (!store_) throw ValidationError("ChatService needs a store");
  archive_ = std::make_unique<ChatArchive>(*store_);
}

ChatService::Session& ChatService::session(const std::string& id) {
  std::lock_guard lock(sessions_mu_);
  auto& slot = sessions_[id];
  if (!slot) slot = std::make_unique<Session>();
  return *slot;
}

// Rebuilds the dialogue state from stored history so a restart resumes mid-confirmation.
dialogue::DialogueState ChatService::restore_state(const std::string& id, Language fallback) const {
  dialogue::DialogueState s;
  s.session_id = id;
  s.language = fallback;
  const auto records = archive_->history(id);
  for (const auto& r : records) {
    if (r.direction == Speaker::User) ++s.turn_count;
    s.language = r.language;
  }
  if (!records.empty()) {
    const auto& last = records.back();
    if (last.direction == Speaker::Bot && last.reply_kind == "Confirmation" && last.intent && kb_.find(*last.intent)) {
      s.phase = dialogue::Phase::AwaitingConfirmation;
      s.candidate = *last.intent;
    }
  }
  return s;
}

HttpResponse ChatService::bad_request(std::string detail, std::string message) {
  archive_->log(Module::Api, Severity::Warn, std::move(detail));
  return json_response(400, error_body(message));
}

HttpResponse ChatService::internal_error(Module module, std::string_view what) {
  archive_->log(module, Severity::Error, std::string(what));
  return json_response(500, error_body("internal error"));
}

std::optional<std::string> ChatService::synthesize(const std::string& text) {
  try {
    auto speech = tts::speak(*voice_, text, config_.speech);
    const std::string id = random_id();
    store_->put_blob(id + ".wav", signal::encode_wav(speech.audio));
    return id;
  } catch (const std::exception& e) {
    archive_->log(Module::Tts, Severity::Error, std::string("synthesis failed: ") + e.what());
    return std::nullopt;
  }
}

HttpResponse ChatService::post_chat(std::string_view body) {
  if (body.size() > config_.max_body_bytes) {
    archive_->log(Module::Api, Severity::Warn, "oversized chat payload: " + std::to_string(body.size()) + " bytes");
    return json_response(413, error_body("payload too large"));
  }
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object()) return bad_request("malformed chat body: not a JSON object", "malformed JSON body");
  if (!req.contains("session_id") || !req["session_id"].is_string() || !req.contains("text") || !req["text"].is_string())
    return bad_request("chat body missing session_id or text", "session_id and text must be strings");
  const std::string sid = req["session_id"];
  if (!valid_session_id(sid)) return bad_request("chat body has an invalid session_id", "invalid session_id");
  std::optional<Language> lang;
  if (req.contains("language")) {
    try {
      lang = parse_language(req["language"].is_string() ? req["language"].get<std::string>() : "");
    } catch (const ValidationError&) {
      return bad_request("chat body has an unsupported language", "language must be en or zh");
    }
  }
  const std::string text = req["text"];

  try {
    Session& s = session(sid);
    std::lock_guard lock(s.mu);
    if (!s.state) s.state = restore_state(sid, lang.value_or(Language::En));
    auto state = lang ? dialogue::switch_language(*s.state, *lang) : *s.state;
    dialogue::Turn turn;
    try {
      turn = dialogue::handle_message(state, text, nlu_, kb_, config_.thresholds);
    } catch (const std::exception& e) {
      return internal_error(Module::Dialogue, std::string("dialogue failure: ") + e.what());
    }
    if (turn.reply.kind == dialogue::ReplyKind::Handoff)
      archive_->log(Module::Dialogue, Severity::Info, "handoff issued in session " + sid);

    if (config_.tts_enabled && voice_ && state.language == Language::En)
      turn.reply.audio_ref = synthesize(turn.reply.text);

    ChatRecord user{sid, now_ms(), Speaker::User, text, state.language, std::nullopt, std::nullopt, std::nullopt};
    ChatRecord bot{sid, 0, Speaker::Bot, turn.reply.text, state.language,
                   std::string(dialogue::reply_kind_name(turn.reply.kind)), turn.reply.audio_ref,
                   turn.reply.intent.empty() ? std::nullopt : std::optional<std::string>(turn.reply.intent)};
    archive_->append_exchange(std::move(user), std::move(bot));
    s.state = turn.state;

    json out{{"session_id", sid},
             {"reply_text", turn.reply.text},
             {"kind", dialogue::reply_kind_name(turn.reply.kind)},
             {"suggestions", turn.reply.suggestions},
             {"state_phase", dialogue::phase_name(turn.state.phase)},
             {"language", language_name(turn.state.language)}};
    if (turn.reply.audio_ref) out["audio_url"] = "/api/audio/" + *turn.reply.audio_ref;
    return json_response(200, out);
  } catch (const std::exception& e) {
    return internal_error(Module::Api, std::string("chat failure: ") + e.what());
  }
}

HttpResponse ChatService::post_session(std::string_view body) {
  if (body.size() > config_.max_body_bytes) {
    archive_->log(Module::Api, Severity::Warn, "oversized session payload");
    return json_response(413, error_body("payload too large"));
  }
  std::string sid;
  if (!body.empty()) {
    json req = json::parse(body, nullptr, false);
    if (req.is_discarded() || !req.is_object()) return bad_request("malformed session body", "malformed JSON body");
    if (req.contains("session_id")) {
      if (!req["session_id"].is_string() || !valid_session_id(req["session_id"]))
        return bad_request("session body has an invalid session_id", "invalid session_id");
      sid = req["session_id"];
    }
  }
  if (sid.empty()) sid = random_id();
  try {
    const bool created = archive_->open_session(sid);
    return json_response(created ? 201 : 200, {{"session_id", sid}, {"created", created}});
  } catch (const std::exception& e) {
    return internal_error(Module::Api, std::string("session failure: ") + e.what());
  }
}

HttpResponse ChatService::get_history(std::string_view session_id) {
  const std::string sid(session_id);
  if (!archive_->has_session(sid)) return json_response(404, error_body("unknown session"));
  json out = json::array();
  for (const auto& r : archive_->history(sid)) out.push_back(to_json(r));
  return json_response(200, out);
}

HttpResponse ChatService::get_audio(std::string_view id) {
  std::string name(id);
  if (name.size() > 4 && name.substr(name.size() - 4) == ".wav") name.resize(name.size() - 4);
  for (char c : name)
    if (!std::isxdigit(static_cast<unsigned char>(c))) return json_response(404, error_body("unknown audio id"));
  auto bytes = name.empty() ? std::nullopt : store_->get_blob(name + ".wav");
  if (!bytes) return json_response(404, error_body("unknown audio id"));
  return {200, "audio/wav", std::move(*bytes)};
}

}  // namespace amanda::service
