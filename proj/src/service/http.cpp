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

#include "amanda/service/http.hpp"

#include <httplib.h>

namespace amanda::service {

struct HttpServer::Impl {
  explicit Impl(ChatService& s) : service(s) {}
  ChatService& service;
  httplib::Server server;
};

namespace {

void send(httplib::Response& res, const HttpResponse& r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

}  // namespace

HttpServer::HttpServer(ChatService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  ChatService* svc = &service;
  srv.set_payload_max_length(1 << 20);
  srv.Post("/api/chat", [svc](const httplib::Request& req, httplib::Response& res) { send(res, svc->post_chat(req.body)); });
  srv.Post("/api/session",
           [svc](const httplib::Request& req, httplib::Response& res) { send(res, svc->post_session(req.body)); });
  srv.Get(R"(/api/history/([^/]+))", [svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc->get_history(req.matches[1].str()));
  });
  srv.Get(R"(/api/audio/([^/]+))", [svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc->get_audio(req.matches[1].str()));
  });
  srv.set_exception_handler([svc](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "unknown exception";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, svc->internal_error(Module::Api, "unhandled: " + what));
  });
  if (const auto& dir = service.config().static_dir) srv.set_mount_point("/", dir->string());
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  if (port == 0) return srv.bind_to_any_port(host);
  if (!srv.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace amanda::service
