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

#include <filesystem>
#include <fstream>
#include <thread>

#include "amanda/service/http.hpp"
#include "amanda/service/service.hpp"
#include "amanda/signal/wav.hpp"
#include "gtest/gtest.h"

// After Eigen: <resolv.h> defines _res, which Eigen uses as a parameter name.
#include <httplib.h>

namespace amanda::service {
namespace {

namespace fs = std::filesystem;
const fs::path kRoot = AMANDA_SOURCE_DIR;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("amanda-test-" + random_id());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

const dialogue::KnowledgeBase& kb() {
  static const auto k = dialogue::load_kb(kRoot / "data/kb.json");
  return k;
}

nlu::IntentPrediction stub(std::string_view text, Language) {
  nlu::IntentPrediction p;
  if (text.find("glucose") != std::string_view::npos)
    p.ranked = {{"monitor_glucose", 0.9}, {"greet", 0.1}};
  else if (text.find("weather") != std::string_view::npos)
    p.ranked = {{"out_of_scope", 0.8}, {"greet", 0.2}};
  else
    p.ranked = {{"target_range", 0.6}, {"greet", 0.4}};
  return p;
}

json body(const HttpResponse& r) { return json::parse(r.body); }

std::string chat(const std::string& sid, const std::string& text, const std::string& lang = "en") {
  return json{{"session_id", sid}, {"text", text}, {"language", lang}}.dump();
}

TEST(FileStore, AppendScanAndTornTail) {
  TempDir dir;
  {
    FileStore s(dir.path());
    s.append("c", {{"n", 1}});
    s.append("c", {{"n", 2}});
  }
  {
    std::ofstream f(dir.path() / "c.jsonl", std::ios::app | std::ios::binary);
    f << R"({"n": 3, "trunc)";  // crash mid-write
  }
  FileStore s(dir.path());
  auto docs = s.scan("c");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[1]["n"], 2);
  EXPECT_GT(s.recovered_bytes(), 0u);
  s.append("c", {{"n", 4}});
  docs = s.scan("c");
  ASSERT_EQ(docs.size(), 3u);
  EXPECT_EQ(docs[2]["n"], 4);
  EXPECT_TRUE(s.scan("empty").empty());
  EXPECT_THROW(s.append("../evil", {}), ValidationError);
}

TEST(FileStore, Blobs) {
  TempDir dir;
  FileStore s(dir.path());
  s.put_blob("a.wav", std::string("\0\1\2", 3));
  EXPECT_EQ(*s.get_blob("a.wav"), std::string("\0\1\2", 3));
  EXPECT_FALSE(s.get_blob("missing.wav"));
  EXPECT_FALSE(s.get_blob("../a.wav"));
}

TEST(Archive, ExchangesAreAtomicAcrossCrash) {
  TempDir dir;
  {
    FileStore s(dir.path());
    ChatArchive a(s);
    a.append_exchange({"s1", 0, Speaker::User, "q1", Language::En}, {"s1", 0, Speaker::Bot, "a1", Language::En});
  }
  // crash point: a second exchange only half written
  const auto path = dir.path() / "exchanges.jsonl";
  std::string line;
  {
    std::ifstream in(path);
    std::getline(in, line);
  }
  {
    std::ofstream f(path, std::ios::app | std::ios::binary);
    f << line.substr(0, line.size() / 2);
  }
  FileStore s(dir.path());
  ChatArchive a(s);
  auto h = a.history("s1");
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].direction, Speaker::User);
  EXPECT_EQ(h[1].direction, Speaker::Bot);
}

TEST(Archive, TimestampsNonDecreasingAndPersisted) {
  TempDir dir;
  {
    FileStore s(dir.path());
    ChatArchive a(s);
    EXPECT_TRUE(a.open_session("fresh"));
    EXPECT_FALSE(a.open_session("fresh"));
    for (int i = 0; i < 5; ++i)
      a.append_exchange({"s", 0, Speaker::User, "u", Language::En}, {"s", 0, Speaker::Bot, "b", Language::En});
    a.log(Module::Api, Severity::Warn, "test entry");
  }
  FileStore s(dir.path());
  ChatArchive a(s);
  EXPECT_TRUE(a.has_session("fresh"));
  EXPECT_TRUE(a.history("fresh").empty());
  auto h = a.history("s");
  ASSERT_EQ(h.size(), 10u);
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i - 1].timestamp_ms, h[i].timestamp_ms);
  ASSERT_EQ(a.security_log().size(), 1u);
  EXPECT_EQ(a.security_log()[0].detail, "test entry");
}

ServiceConfig test_config() {
  ServiceConfig c;
  c.tts_enabled = false;
  return c;
}

TEST(Service, ConfirmThenAnswer) {
  ChatService svc(test_config(), kb(), stub, std::make_unique<MemoryStore>());
  auto r1 = svc.post_chat(chat("s", "how to check glucose"));
  ASSERT_EQ(r1.status, 200);
  EXPECT_EQ(body(r1)["kind"], "Confirmation");
  EXPECT_NE(body(r1)["reply_text"].get<std::string>().find(kb().find("monitor_glucose")->question.at(Language::En)),
            std::string::npos);
  EXPECT_EQ(body(r1)["state_phase"], "AwaitingConfirmation");
  EXPECT_FALSE(body(r1).contains("audio_url"));
  auto r2 = svc.post_chat(chat("s", "yes"));
  EXPECT_EQ(body(r2)["kind"], "Answer");
  EXPECT_LE(body(r2)["suggestions"].size(), 3u);
  EXPECT_GE(body(r2)["suggestions"].size(), 1u);
  EXPECT_FALSE(body(r2).contains("audio_url"));
  auto h = svc.get_history("s");
  ASSERT_EQ(h.status, 200);
  ASSERT_EQ(body(h).size(), 4u);
  EXPECT_EQ(body(h)[0]["direction"], "user");
  EXPECT_EQ(body(h)[3]["reply_kind"], "Answer");
}

TEST(Service, ErrorsAndLogging) {
  ChatService svc(test_config(), kb(), stub, std::make_unique<MemoryStore>());
  auto empty = svc.post_chat(chat("s", ""));
  EXPECT_EQ(empty.status, 200);
  EXPECT_EQ(body(empty)["kind"], "Clarification");
  EXPECT_EQ(svc.post_chat("{not json").status, 400);
  EXPECT_EQ(svc.post_chat(R"({"session_id": 3, "text": "x"})").status, 400);
  EXPECT_EQ(svc.post_chat(chat("s", "x", "fr")).status, 400);
  EXPECT_EQ(svc.post_chat(chat(std::string(200, 'a'), "x")).status, 400);
  EXPECT_EQ(svc.post_chat(chat("s", std::string(20000, 'x'))).status, 413);
  auto oos = svc.post_chat(chat("s", "what is the weather secret-text"));
  EXPECT_EQ(body(oos)["kind"], "Handoff");
  const auto log = svc.archive().security_log();
  EXPECT_GE(log.size(), 6u);
  for (const auto& e : log) EXPECT_EQ(e.detail.find("secret-text"), std::string::npos);
  EXPECT_EQ(svc.get_history("nobody").status, 404);
  EXPECT_EQ(svc.get_audio("abc123").status, 404);
  EXPECT_EQ(svc.get_audio("../etc").status, 404);
}

TEST(Service, InternalErrorsDoNotLeak) {
  auto broken = [](std::string_view, Language) -> nlu::IntentPrediction { throw std::runtime_error("secret stack"); };
  ChatService svc(test_config(), kb(), broken, std::make_unique<MemoryStore>());
  auto r = svc.post_chat(chat("s", "anything"));
  EXPECT_EQ(r.status, 500);
  EXPECT_EQ(r.body.find("secret"), std::string::npos);
  ASSERT_FALSE(svc.archive().security_log().empty());
  EXPECT_EQ(svc.archive().security_log().back().severity, Severity::Error);
  EXPECT_TRUE(svc.archive().history("s").empty());  // no orphaned user turn
}

TEST(Service, SessionEndpoint) {
  ChatService svc(test_config(), kb(), stub, std::make_unique<MemoryStore>());
  auto r = svc.post_session("");
  EXPECT_EQ(r.status, 201);
  const std::string sid = body(r)["session_id"];
  auto h = svc.get_history(sid);
  EXPECT_EQ(h.status, 200);
  EXPECT_EQ(body(h).size(), 0u);
  EXPECT_EQ(svc.post_session(json{{"session_id", sid}}.dump()).status, 200);
  EXPECT_EQ(svc.post_session("[1]").status, 400);
}

TEST(Service, RestartResumesConfirmation) {
  TempDir dir;
  {
    ChatService svc(test_config(), kb(), stub, std::make_unique<FileStore>(dir.path()));
    EXPECT_EQ(body(svc.post_chat(chat("s", "check glucose")))["kind"], "Confirmation");
  }
  ChatService svc(test_config(), kb(), stub, std::make_unique<FileStore>(dir.path()));
  auto r = svc.post_chat(chat("s", "yes"));
  EXPECT_EQ(body(r)["kind"], "Answer");
  EXPECT_EQ(body(r)["reply_text"], kb().find("monitor_glucose")->answer.at(Language::En));
  EXPECT_EQ(body(svc.get_history("s")).size(), 4u);
}

TEST(Service, LanguageSwitchPerRequest) {
  ChatService svc(test_config(), kb(), stub, std::make_unique<MemoryStore>());
  svc.post_chat(chat("s", "check glucose"));
  auto r = svc.post_chat(chat("s", "是", "zh"));
  EXPECT_EQ(body(r)["reply_text"], kb().find("monitor_glucose")->answer.at(Language::Zh));
  EXPECT_EQ(body(r)["suggestions"][0], kb().find(kb().find("monitor_glucose")->related[0])->question.at(Language::Zh));
}

TEST(Service, DistinctSessionsDoNotInterleave) {
  ChatService svc(test_config(), kb(), stub, std::make_unique<MemoryStore>());
  constexpr int kThreads = 8, kTurns = 20;
  std::vector<std::thread> pool;
  for (int t = 0; t < kThreads; ++t)
    pool.emplace_back([&, t] {
      const std::string sid = "session-" + std::to_string(t);
      for (int i = 0; i < kTurns; ++i) svc.post_chat(chat(sid, i % 2 ? "yes" : "check glucose"));
    });
  for (auto& th : pool) th.join();
  for (int t = 0; t < kThreads; ++t) {
    auto h = svc.archive().history("session-" + std::to_string(t));
    ASSERT_EQ(h.size(), 2u * kTurns);
    for (int i = 0; i < kTurns; ++i) {
      EXPECT_EQ(h[2 * i].direction, Speaker::User);
      EXPECT_EQ(h[2 * i + 1].reply_kind, i % 2 ? "Answer" : "Confirmation");
    }
  }
}

tts::Voice tiny_voice() {
  tts::TtsConfig c;
  c.embed_dim = 4;
  c.enc_dim = c.dec_dim = c.attn_dim = 8;
  c.n_mels = 8;
  c.postnet_channels = 4;
  c.postnet_kernel = 3;
  tts::Voice v;
  v.params = tts::TtsModelParams::initialize(c, 1);
  v.params.forward.b_stop.mutable_value()(0, 0) = -50.0;
  v.features.stft = {256, 64, signal::Window::Hann};
  v.features.mel.n_mels = 8;
  return v;
}

TEST(Service, SpeechWhenEnabled) {
  auto cfg = test_config();
  cfg.tts_enabled = true;
  cfg.speech.max_frames_per_sentence = 6;
  cfg.speech.griffin_lim_iterations = 4;
  ChatService svc(cfg, kb(), stub, std::make_unique<MemoryStore>(), tiny_voice());
  auto r = svc.post_chat(chat("s", "check glucose"));
  ASSERT_TRUE(body(r).contains("audio_url"));
  const std::string url = body(r)["audio_url"];
  ASSERT_EQ(url.rfind("/api/audio/", 0), 0u);
  const auto id = url.substr(11);
  auto a1 = svc.get_audio(id);
  auto a2 = svc.get_audio(id);
  ASSERT_EQ(a1.status, 200);
  EXPECT_EQ(a1.content_type, "audio/wav");
  EXPECT_EQ(a1.body, a2.body);
  EXPECT_EQ(a1.body.substr(0, 4), "RIFF");
  auto clip = signal::decode_wav(a1.body);
  EXPECT_EQ(clip.sample_rate, 16000);
  EXPECT_EQ(clip.samples.size(), static_cast<std::size_t>(tts::samples_for_frames(6, {256, 64})));
  // long replies are voiced sentence by sentence
  auto ans = svc.post_chat(chat("s", "yes"));
  const std::string text = body(ans)["reply_text"];
  ASSERT_GT(text.size(), 200u);
  auto long_clip = signal::decode_wav(svc.get_audio(body(ans)["audio_url"].get<std::string>().substr(11)).body);
  EXPECT_EQ(long_clip.samples.size(),
            tts::split_sentences(text).size() * static_cast<std::size_t>(tts::samples_for_frames(6, {256, 64})));
  // zh replies carry no audio
  EXPECT_FALSE(body(svc.post_chat(chat("s", "你好", "zh"))).contains("audio_url"));
}

TEST(Http, RoundTripAndStaticHosting) {
  TempDir dir;
  fs::create_directories(dir.path() / "www");
  std::ofstream(dir.path() / "www" / "index.html") << "<html>amanda</html>";
  auto cfg = test_config();
  cfg.static_dir = dir.path() / "www";
  ChatService svc(cfg, kb(), stub, std::make_unique<FileStore>(dir.path() / "store"));
  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen(); });
  server.wait_until_ready();
  httplib::Client cli("127.0.0.1", port);
  auto r = cli.Post("/api/chat", chat("h", "check glucose"), "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body)["kind"], "Confirmation");
  auto bad = cli.Post("/api/chat", "nope", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  auto h = cli.Get("/api/history/h");
  ASSERT_TRUE(h);
  EXPECT_EQ(json::parse(h->body).size(), 2u);
  EXPECT_EQ(cli.Get("/api/history/none")->status, 404);
  EXPECT_EQ(cli.Get("/api/audio/deadbeef")->status, 404);
  auto page = cli.Get("/index.html");
  ASSERT_TRUE(page);
  EXPECT_EQ(page->body, "<html>amanda</html>");
  server.stop();
  th.join();
}

TEST(Config, LoadResolvesAndValidates) {
  TempDir dir;
  std::ofstream(dir.path() / "c.json") << R"({"kb": "kb.json", "nlu_model": "m.ckpt", "port": 9000,
      "thresholds": {"direct": 0.9}, "store_dir": "st"})";
  auto c = ServiceConfig::load(dir.path() / "c.json");
  EXPECT_EQ(c.kb, dir.path() / "kb.json");
  EXPECT_EQ(c.store_dir, dir.path() / "st");
  EXPECT_EQ(c.port, 9000);
  EXPECT_DOUBLE_EQ(c.thresholds.direct, 0.9);
  EXPECT_DOUBLE_EQ(c.thresholds.confirm, 0.35);
  EXPECT_THROW(c.validate(), ValidationError);  // files missing
  EXPECT_THROW(ServiceConfig::from_json(json::object()), ValidationError);
}

}  // namespace
}  // namespace amanda::service
