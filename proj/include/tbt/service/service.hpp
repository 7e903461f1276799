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

#ifndef TBT_SERVICE_SERVICE_HPP_
#define TBT_SERVICE_SERVICE_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "json.hpp"
#include "tbt/error.hpp"
#include "tbt/session/session.hpp"

namespace tbt::service {

inline constexpr int kDefaultPort = 8642;

struct Response {
  int status = 200;
  std::string body;  // always JSON
};

int HttpStatus(ErrorCode code);

// {"code", "message", "detail"}; detail is null when absent.
nlohmann::json ApiErrorJson(const Error& error);

struct DatasetSource {
  std::filesystem::path train_csv;
  // Held-out file; when absent sessions split train_csv.
  std::optional<std::filesystem::path> test_csv;
};

// In-memory session registry plus the JSON API over it. Transport-agnostic:
// HttpServer forwards requests to Handle(), and tests may call it directly.
// Thread-safe.
class Service {
 public:
  Service() = default;
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void RegisterDataset(const std::string& name, DatasetSource source);
  // Registers every "<stem>.csv" in `dir` under its stem, pairing it with
  // "<stem>.test.csv" when that file exists. Returns the registered names.
  std::vector<std::string> RegisterDatasetsFromDir(
      const std::filesystem::path& dir);
  std::vector<std::string> DatasetNames() const;

  // Routes one request. Never throws: failures become ApiError bodies.
  Response Handle(std::string_view method, std::string_view path,
                  const std::map<std::string, std::string>& query,
                  std::string_view body);

  // Typed entry points behind the routes. These throw tbt::Error.
  nlohmann::json CreateSession(const nlohmann::json& request);
  nlohmann::json ImportSession(const nlohmann::json& request);
  nlohmann::json PostOperation(const std::string& id,
                               const nlohmann::json& request);
  nlohmann::json GetView(const std::string& id, std::string_view view,
                         const std::map<std::string, std::string>& query);
  std::string ExportSession(const std::string& id);

  // Immutable view of the session's current state.
  std::shared_ptr<const session::Session> Snapshot(const std::string& id) const;
  size_t num_sessions() const;

 private:
  struct SessionSlot {
    // Serializes writers of this session.
    std::mutex write;
    // Guards `current` only; held briefly.
    mutable std::mutex publish;
    std::shared_ptr<const session::Session> current;
  };

  std::shared_ptr<SessionSlot> Find(const std::string& id) const;
  std::string Register(session::Session session);

  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
  std::map<std::string, DatasetSource> datasets_;
};

// Random 128-bit token as 32 lowercase hex digits.
std::string NewSessionId();

}  // namespace tbt::service

#endif  // TBT_SERVICE_SERVICE_HPP_
