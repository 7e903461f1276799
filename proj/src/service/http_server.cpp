/*
 * Copyright 2026 The tbt Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tbt/service/http_server.hpp"

#include <sys/socket.h>

#include "httplib.h"

namespace tbt::service {

HttpServer::HttpServer(Service& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto forward = [this](const httplib::Request& request,
                        httplib::Response& response) {
    std::map<std::string, std::string> query;
    for (const auto& [key, value] : request.params) query[key] = value;
    const Response result =
        service_.Handle(request.method, request.path, query, request.body);
    response.status = result.status;
    response.set_content(result.body, "application/json; charset=utf-8");
  };
  server_->Get(R"(/.*)", forward);
  server_->Post(R"(/.*)", forward);
  server_->Put(R"(/.*)", forward);
  server_->Delete(R"(/.*)", forward);
  // httplib's default sets SO_REUSEPORT, which lets a second server bind a
  // port that is already in use.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
}

HttpServer::~HttpServer() { Stop(); }

bool HttpServer::Bind(const std::string& host, int port) {
  return server_->bind_to_port(host, port);
}

int HttpServer::BindAnyPort(const std::string& host) {
  return server_->bind_to_any_port(host);
}

bool HttpServer::Listen() { return server_->listen_after_bind(); }

void HttpServer::Stop() {
  if (server_->is_running()) server_->stop();
}

void HttpServer::WaitUntilReady() { server_->wait_until_ready(); }

}  // namespace tbt::service
