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

#include "tbt/service/service.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <random>
#include <vector>

#include "tbt/boosting/model_json.hpp"
#include "tbt/canonical_json.hpp"
#include "tbt/data/dataset.hpp"
#include "tbt/session/views.hpp"

namespace tbt::service {
namespace {

using nlohmann::json;
using session::Session;

Response JsonResponse(int status, const json& body) {
  return {status, DumpCanonical(body)};
}

Response ErrorResponse(const Error& error) {
  return JsonResponse(HttpStatus(error.code()), ApiErrorJson(error));
}

std::vector<std::string_view> SplitPath(std::string_view path) {
  std::vector<std::string_view> parts;
  size_t pos = 0;
  while (pos < path.size()) {
    const size_t next = path.find('/', pos);
    const size_t end = next == std::string_view::npos ? path.size() : next;
    if (end > pos) parts.push_back(path.substr(pos, end - pos));
    pos = end + 1;
  }
  return parts;
}

int ParseIntArg(std::string_view text, const char* name) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw BadRequest(std::string("argument must be an integer: ") + name,
                     {{"argument", name}, {"value", std::string(text)}});
  }
  return value;
}

int QueryInt(const std::map<std::string, std::string>& query,
             const char* name) {
  const auto it = query.find(name);
  if (it == query.end()) {
    throw BadRequest(std::string("missing query parameter: ") + name,
                     {{"argument", name}});
  }
  return ParseIntArg(it->second, name);
}

json ParseBody(std::string_view body) {
  if (body.empty()) return json::object();
  json parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded()) throw BadRequest("request body is not JSON");
  if (!parsed.is_object()) throw BadRequest("request body must be an object");
  return parsed;
}

template <typename T>
T Field(const json& body, const char* name, T fallback) {
  if (!body.contains(name) || body.at(name).is_null()) return fallback;
  try {
    return body.at(name).get<T>();
  } catch (const json::exception&) {
    throw BadRequest(std::string("argument has the wrong type: ") + name,
                     {{"argument", name}});
  }
}

data::CsvOptions CsvOptionsFrom(const json& body) {
  data::CsvOptions options;
  if (body.contains("label_column")) {
    const json& label = body.at("label_column");
    if (label.is_string()) {
      options.label_column = label.get<std::string>();
    } else if (label.is_number_integer()) {
      options.label_column = label.get<int>();
    } else {
      throw BadRequest("label_column must be a name or an index",
                       {{"argument", "label_column"}});
    }
  }
  if (body.contains("positive_label") && !body.at("positive_label").is_null()) {
    options.positive_label =
        Field<std::string>(body, "positive_label", std::string());
  }
  return options;
}

}  // namespace

int HttpStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadRequest:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
      return 409;
    case ErrorCode::kInternal:
      return 500;
  }
  return 500;
}

json ApiErrorJson(const Error& error) {
  return {{"code", ErrorCodeName(error.code())},
          {"message", error.what()},
          {"detail", error.detail()}};
}

std::string NewSessionId() {
  std::random_device device;
  std::uniform_int_distribution<uint64_t> dist;
  const uint64_t hi = dist(device);
  const uint64_t lo = dist(device);
  char buffer[33];
  std::snprintf(buffer, sizeof(buffer), "%016llx%016llx",
                static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buffer;
}

void Service::RegisterDataset(const std::string& name, DatasetSource source) {
  std::unique_lock lock(registry_mutex_);
  datasets_[name] = std::move(source);
}

std::vector<std::string> Service::RegisterDatasetsFromDir(
    const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw NotFound("data directory not found", {{"path", dir.string()}});
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const fs::path& path = entry.path();
    if (!entry.is_regular_file() || path.extension() != ".csv") continue;
    const std::string stem = path.stem().string();
    if (stem.ends_with(".test")) continue;
    DatasetSource source{path, std::nullopt};
    const fs::path test = dir / (stem + ".test.csv");
    if (fs::is_regular_file(test, ec)) source.test_csv = test;
    RegisterDataset(stem, std::move(source));
    names.push_back(stem);
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<std::string> Service::DatasetNames() const {
  std::shared_lock lock(registry_mutex_);
  std::vector<std::string> names;
  for (const auto& [name, source] : datasets_) names.push_back(name);
  return names;
}

std::shared_ptr<Service::SessionSlot> Service::Find(
    const std::string& id) const {
  std::shared_lock lock(registry_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw NotFound("unknown session", {{"session_id", id}});
  }
  return it->second;
}

std::string Service::Register(Session session) {
  auto slot = std::make_shared<SessionSlot>();
  slot->current = std::make_shared<const Session>(std::move(session));
  std::unique_lock lock(registry_mutex_);
  std::string id;
  do {
    id = NewSessionId();
  } while (sessions_.contains(id));
  sessions_.emplace(id, std::move(slot));
  return id;
}

std::shared_ptr<const Session> Service::Snapshot(const std::string& id) const {
  const auto slot = Find(id);
  std::lock_guard lock(slot->publish);
  return slot->current;
}

size_t Service::num_sessions() const {
  std::shared_lock lock(registry_mutex_);
  return sessions_.size();
}

json Service::CreateSession(const json& request) {
  const data::CsvOptions options = CsvOptionsFrom(request);
  std::optional<data::Dataset> full;
  std::optional<data::Dataset> test;
  if (request.contains("dataset")) {
    const auto name = Field<std::string>(request, "dataset", std::string());
    DatasetSource source;
    {
      std::shared_lock lock(registry_mutex_);
      const auto it = datasets_.find(name);
      if (it == datasets_.end()) {
        throw NotFound("unknown dataset", {{"dataset", name}});
      }
      source = it->second;
    }
    full = data::LoadCsv(source.train_csv, options);
    if (source.test_csv) {
      test = data::LoadCsvWithSchema(*source.test_csv, *full, options);
    }
  } else if (request.contains("csv")) {
    full = data::LoadCsvText(Field<std::string>(request, "csv", ""), options);
    if (request.contains("test_csv")) {
      test = data::LoadCsvTextWithSchema(
          Field<std::string>(request, "test_csv", ""), *full, options);
    }
  } else {
    throw BadRequest("request needs a dataset id or csv text",
                     {{"argument", "dataset"}});
  }

  std::shared_ptr<const data::Dataset> train_ptr;
  std::shared_ptr<const data::Dataset> test_ptr;
  if (test) {
    train_ptr = std::make_shared<const data::Dataset>(std::move(*full));
    test_ptr = std::make_shared<const data::Dataset>(std::move(*test));
  } else {
    const auto fraction = Field<double>(request, "test_fraction", 0.3);
    const auto seed = Field<uint64_t>(request, "seed", 42);
    data::TrainTestSplit split = data::SplitTrainTest(*full, fraction, seed);
    train_ptr = std::make_shared<const data::Dataset>(std::move(split.train));
    test_ptr = std::make_shared<const data::Dataset>(std::move(split.test));
  }

  const auto strategy = data::ParseGroupingStrategy(
      Field<std::string>(request, "grouping", std::string("by-prefix")));
  data::FeatureGrouping grouping = data::GroupFeatures(*train_ptr, strategy);
  const boosting::FitParams params = boosting::ParamsFromJson(request);

  Session session = Session::Create(train_ptr, test_ptr, std::move(grouping),
                                    params);
  json response = {{"record", session.history().back().ToJson(false)},
                   {"num_trees", session.model().trees.size()},
                   {"train_size", session.train().num_samples()},
                   {"test_size", session.test().num_samples()}};
  response["session_id"] = Register(std::move(session));
  return response;
}

json Service::ImportSession(const json& request) {
  Session session = Session::Import(request);
  json response = {{"record", session.history().back().ToJson(false)},
                   {"num_trees", session.model().trees.size()},
                   {"history_length", session.history().size()}};
  response["session_id"] = Register(std::move(session));
  return response;
}

json Service::PostOperation(const std::string& id, const json& request) {
  const session::Operation op = session::Operation::FromJson(request);
  const auto slot = Find(id);
  std::lock_guard write(slot->write);
  std::shared_ptr<const Session> current;
  {
    std::lock_guard lock(slot->publish);
    current = slot->current;
  }
  if (request.contains("expected_history_length")) {
    const auto expected = Field<int64_t>(request, "expected_history_length", 0);
    const auto actual = static_cast<int64_t>(current->history().size());
    if (expected != actual) {
      throw Error(ErrorCode::kConflict,
                  "session changed since the operation was prepared",
                  {{"expected_history_length", expected},
                   {"history_length", actual}});
    }
  }
  auto next = std::make_shared<Session>(*current);
  const session::ApplyOutcome outcome = next->Apply(op);
  {
    std::lock_guard lock(slot->publish);
    slot->current = std::move(next);
  }
  return {{"record", outcome.record.ToJson(false)},
          {"changed_trees", outcome.changed_trees},
          {"applied", outcome.applied},
          {"message", outcome.message}};
}

json Service::GetView(const std::string& id, std::string_view view,
                      const std::map<std::string, std::string>& query) {
  const auto current = Snapshot(id);
  if (view == "feature") return session::FeatureView(*current);
  if (view == "forest") return session::ForestView(*current);
  if (view == "history") return session::HistoryView(*current);
  if (view == "path-purity") {
    return session::PathPurityView(*current, QueryInt(query, "tree"),
                                   QueryInt(query, "leaf"));
  }
  if (view.starts_with("tree/")) {
    return session::TreeView(*current, ParseIntArg(view.substr(5), "tree"));
  }
  throw NotFound("unknown view", {{"view", std::string(view)}});
}

std::string Service::ExportSession(const std::string& id) {
  return Snapshot(id)->ExportCanonical();
}

Response Service::Handle(std::string_view method, std::string_view path,
                         const std::map<std::string, std::string>& query,
                         std::string_view body) {
  try {
    const auto parts = SplitPath(path);
    const bool get = method == "GET";
    const bool post = method == "POST";
    if (parts.empty() || parts[0] != "sessions") {
      throw NotFound("no such endpoint", {{"path", std::string(path)}});
    }
    if (parts.size() == 1 && post) {
      return JsonResponse(201, CreateSession(ParseBody(body)));
    }
    if (parts.size() == 2 && parts[1] == "import" && post) {
      const json request = json::parse(body, nullptr, false);
      if (request.is_discarded()) throw BadRequest("request body is not JSON");
      return JsonResponse(201, ImportSession(request));
    }
    if (parts.size() >= 3) {
      const std::string id(parts[1]);
      if (parts[2] == "ops" && parts.size() == 3 && post) {
        return JsonResponse(200, PostOperation(id, ParseBody(body)));
      }
      if (parts[2] == "export" && parts.size() == 3 && get) {
        return {200, ExportSession(id)};
      }
      if (parts[2] == "views" && parts.size() >= 4 && get) {
        std::string view(parts[3]);
        for (size_t i = 4; i < parts.size(); ++i) {
          view += "/";
          view += parts[i];
        }
        return JsonResponse(200, GetView(id, view, query));
      }
    }
    throw NotFound("no such endpoint",
                   {{"method", std::string(method)},
                    {"path", std::string(path)}});
  } catch (const Error& e) {
    return ErrorResponse(e);
  } catch (const std::exception& e) {
    return ErrorResponse(Error(ErrorCode::kInternal, e.what()));
  }
}

}  // namespace tbt::service
