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

#ifndef TBT_SERVICE_HTTP_SERVER_HPP_
#define TBT_SERVICE_HTTP_SERVER_HPP_

#include <memory>
#include <string>

#include "tbt/service/service.hpp"

namespace httplib {
class Server;
}

namespace tbt::service {

// HTTP/1.1 front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Returns false if the address cannot be bound.
  bool Bind(const std::string& host, int port);
  // Binds an ephemeral port and returns it, or -1 on failure.
  int BindAnyPort(const std::string& host);
  // Serves until Stop(); requires a successful bind.
  bool Listen();
  void Stop();
  void WaitUntilReady();

 private:
  Service& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace tbt::service

#endif  // TBT_SERVICE_HTTP_SERVER_HPP_
