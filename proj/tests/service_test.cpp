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

#include <fstream>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "httplib.h"
#include "support.hpp"
#include "tbt/boosting/model_json.hpp"
#include "tbt/canonical_json.hpp"
#include "tbt/service/http_server.hpp"
#include "tbt/service/service.hpp"

namespace tbt::service {
namespace {

using nlohmann::json;

std::string XorCsv() {
  std::ifstream in(testing::DataDir() / "xor.csv");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

json XorCreateBody() {
  return {{"csv", XorCsv()},        {"test_csv", XorCsv()},
          {"label_column", "label"}, {"num_trees", 2},
          {"max_depth", 2},          {"min_gain", -1e-9}};
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override { service_.RegisterDatasetsFromDir(testing::DataDir()); }

  Response Post(const std::string& path, const json& body) {
    return service_.Handle("POST", path, {}, body.dump());
  }
  Response Get(const std::string& path,
               const std::map<std::string, std::string>& query = {}) {
    return service_.Handle("GET", path, query, "");
  }
  std::string Create(const json& body) {
    const Response r = Post("/sessions", body);
    EXPECT_EQ(r.status, 201) << r.body;
    return json::parse(r.body).at("session_id");
  }
  static void ExpectApiError(const Response& r, int status,
                             const std::string& code) {
    EXPECT_EQ(r.status, status) << r.body;
    const json body = json::parse(r.body);
    EXPECT_EQ(body.at("code"), code);
    EXPECT_TRUE(body.at("message").is_string());
    EXPECT_TRUE(body.contains("detail"));
    EXPECT_EQ(body.size(), 3u);
  }

  Service service_;
};

TEST_F(ServiceTest, RegistersDataDirectoryByStem) {
  const auto names = service_.DatasetNames();
  EXPECT_NE(std::find(names.begin(), names.end(), "mushroom"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "xor"), names.end());
}

TEST_F(ServiceTest, CreateMushroomSession) {
  const Response r = Post("/sessions", {{"dataset", "mushroom"},
                                        {"num_trees", 3},
                                        {"max_depth", 3}});
  ASSERT_EQ(r.status, 201) << r.body;
  const json body = json::parse(r.body);
  const std::string id = body.at("session_id");
  EXPECT_EQ(id.size(), 32u);
  EXPECT_EQ(id.find_first_not_of("0123456789abcdef"), std::string::npos);
  EXPECT_EQ(body["record"]["index"], 0);
  EXPECT_EQ(body["record"]["operation"], "rebuild");
  EXPECT_TRUE(body["record"]["train_error"].is_number());
  EXPECT_TRUE(body["record"]["test_error"].is_number());
  EXPECT_EQ(body["train_size"], 5687);
  EXPECT_EQ(body["test_size"], 2437);
  const json forest = json::parse(Get("/sessions/" + id + "/views/forest").body);
  EXPECT_EQ(forest["trees"].size(), 3u);
}

TEST_F(ServiceTest, UnknownDatasetIsNotFound) {
  ExpectApiError(Post("/sessions", {{"dataset", "nope"}}), 404, "not_found");
}

TEST_F(ServiceTest, PriorOnlySessionReportsMinorityError) {
  const Response r =
      Post("/sessions", {{"dataset", "mushroom"}, {"num_trees", 0}});
  ASSERT_EQ(r.status, 201);
  const std::string id = json::parse(r.body)["session_id"];
  const auto s = service_.Snapshot(id);
  const auto labels = s->train().labels();
  const double pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double n = static_cast<double>(labels.size());
  EXPECT_DOUBLE_EQ(json::parse(r.body)["record"]["train_error"].get<double>(),
                   std::min(pos, n - pos) / n);
}

TEST_F(ServiceTest, BadRequestsCarryOneApiError) {
  ExpectApiError(service_.Handle("POST", "/sessions", {}, "{not json"), 400,
                 "bad_request");
  ExpectApiError(Post("/sessions", {{"dataset", "mushroom"}, {"max_depth", 0}}),
                 400, "bad_request");
  ExpectApiError(Post("/sessions", json::object()), 400, "bad_request");
  ExpectApiError(Get("/sessions/0000/views/forest"), 404, "not_found");
  ExpectApiError(Get("/nowhere"), 404, "not_found");
  const std::string id = Create(XorCreateBody());
  ExpectApiError(Get("/sessions/" + id + "/views/tree/9"), 400, "bad_request");
  ExpectApiError(Get("/sessions/" + id + "/views/tree/x"), 400, "bad_request");
  ExpectApiError(Get("/sessions/" + id + "/views/path-purity", {{"tree", "0"}}),
                 400, "bad_request");
  ExpectApiError(Get("/sessions/" + id + "/views/bogus"), 404, "not_found");
  const Response bad_op = Post("/sessions/" + id + "/ops",
                               {{"kind", "remove_tree"}, {"args", {{"tree", 5}}}});
  ExpectApiError(bad_op, 400, "bad_request");
  EXPECT_EQ(json::parse(bad_op.body)["detail"]["argument"], "tree");
  ExpectApiError(Post("/sessions/" + id + "/ops", {{"kind", "grow_tree"},
                                                   {"expected_history_length", 5}}),
                 409, "conflict");
  EXPECT_EQ(service_.Snapshot(id)->history().size(), 1u);
}

TEST_F(ServiceTest, ViewsRespond) {
  const std::string id = Create(XorCreateBody());
  const std::string base = "/sessions/" + id + "/views/";
  EXPECT_EQ(Get(base + "feature").status, 200);
  EXPECT_EQ(Get(base + "history").status, 200);
  const json tree = json::parse(Get(base + "tree/0").body);
  EXPECT_EQ(tree["nodes"].size(), 7u);
  const Response purity =
      Get(base + "path-purity", {{"tree", "0"}, {"leaf", "3"}});
  ASSERT_EQ(purity.status, 200) << purity.body;
  const json path = json::parse(purity.body)["nodes"];
  ASSERT_EQ(path.size(), 3u);
  EXPECT_EQ(path[0]["n"], 4);
  EXPECT_EQ(path[2]["n"], 1);
}

TEST_F(ServiceTest, RestoreThenExportMatchesSnapshot) {
  const std::string id =
      Create({{"dataset", "mushroom"}, {"num_trees", 2}, {"max_depth", 2}});
  const std::string ops = "/sessions/" + id + "/ops";
  EXPECT_EQ(Post(ops, {{"kind", "grow_tree"}}).status, 200);
  const Response r = Post(ops, {{"kind", "restore"}, {"args", {{"index", 0}}}});
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(json::parse(r.body)["record"]["index"], 2);
  EXPECT_EQ(json::parse(r.body)["changed_trees"], json::array({2}));
  const json exported = json::parse(Get("/sessions/" + id + "/export").body);
  EXPECT_EQ(DumpCanonical(exported["model"]),
            DumpCanonical(exported["history"][0]["snapshot"]));
}

TEST_F(ServiceTest, RemoveNodeAllOnXor) {
  const std::string id = Create(XorCreateBody());
  const Response r =
      Post("/sessions/" + id + "/ops",
           {{"kind", "remove_node_all"}, {"args", {{"tree", 0}, {"node", 1}}}});
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(json::parse(r.body)["changed_trees"], json::array({0, 1}));
  const json exported = json::parse(Get("/sessions/" + id + "/export").body);
  EXPECT_EQ(exported["model"]["constraints"]["forbidden_paths"].size(), 1u);
}

TEST_F(ServiceTest, ExportImportIsByteIdentical) {
  const std::string id = Create(XorCreateBody());
  Post("/sessions/" + id + "/ops", {{"kind", "block_feature"}, {"args", {{"feature", 1}}}});
  Post("/sessions/" + id + "/ops", {{"kind", "grow_tree"}});
  const std::string exported = Get("/sessions/" + id + "/export").body;
  const Response imported =
      service_.Handle("POST", "/sessions/import", {}, exported);
  ASSERT_EQ(imported.status, 201) << imported.body;
  const std::string copy = json::parse(imported.body)["session_id"];
  EXPECT_NE(copy, id);
  EXPECT_EQ(Get("/sessions/" + copy + "/export").body, exported);
  ExpectApiError(service_.Handle("POST", "/sessions/import", {}, "{}"), 400,
                 "bad_request");
}

TEST(HttpServerTest, ServesOverTheNetwork) {
  Service service;
  service.RegisterDatasetsFromDir(testing::DataDir());
  HttpServer server(service);
  const int port = server.BindAnyPort("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread thread([&] { server.Listen(); });
  server.WaitUntilReady();
  httplib::Client client("127.0.0.1", port);
  const auto created = client.Post(
      "/sessions", json({{"dataset", "xor"}, {"label_column", "label"},
                         {"test_fraction", 0.5}, {"min_gain", -1e-9}})
                       .dump(),
      "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201) << created->body;
  EXPECT_NE(created->get_header_value("Content-Type").find("application/json"),
            std::string::npos);
  const std::string id = json::parse(created->body)["session_id"];
  const auto forest = client.Get("/sessions/" + id + "/views/forest");
  ASSERT_TRUE(forest);
  EXPECT_EQ(forest->status, 200);
  const auto missing = client.Get("/sessions/bad/views/forest");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(json::parse(missing->body)["code"], "not_found");
  server.Stop();
  thread.join();
}

}  // namespace
}  // namespace tbt::service
