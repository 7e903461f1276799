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

#include "tbt/session/operation.hpp"

#include <array>
#include <utility>

#include "tbt/error.hpp"

namespace tbt::session {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<OpKind, std::string_view>, 10> kKindNames = {{
    {OpKind::kRebuild, "rebuild"},
    {OpKind::kAllowFeature, "allow_feature"},
    {OpKind::kBlockFeature, "block_feature"},
    {OpKind::kRemoveTree, "remove_tree"},
    {OpKind::kGrowTree, "grow_tree"},
    {OpKind::kRemoveNode, "remove_node"},
    {OpKind::kRemoveNodeAll, "remove_node_all"},
    {OpKind::kExpandNode, "expand_node"},
    {OpKind::kExpandNodeAll, "expand_node_all"},
    {OpKind::kRestore, "restore"},
}};

int RequireInt(const json& args, const char* name) {
  if (!args.contains(name)) {
    throw BadRequest(std::string("missing argument: ") + name,
                     {{"argument", name}});
  }
  const json& value = args.at(name);
  if (!value.is_number_integer()) {
    throw BadRequest(std::string("argument must be an integer: ") + name,
                     {{"argument", name}});
  }
  return value.get<int>();
}

bool TakesTreeAndNode(OpKind kind) {
  return kind == OpKind::kRemoveNode || kind == OpKind::kRemoveNodeAll ||
         kind == OpKind::kExpandNode || kind == OpKind::kExpandNodeAll;
}

}  // namespace

std::string_view OpKindName(OpKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

OpKind ParseOpKind(std::string_view name) {
  for (const auto& [kind, n] : kKindNames) {
    if (n == name) return kind;
  }
  throw BadRequest("unknown operation kind",
                   {{"argument", "kind"}, {"kind", std::string(name)}});
}

Operation Operation::Rebuild(json params) {
  Operation op;
  op.kind = OpKind::kRebuild;
  op.params = std::move(params);
  return op;
}

Operation Operation::AllowFeature(int feature) {
  Operation op;
  op.kind = OpKind::kAllowFeature;
  op.feature = feature;
  return op;
}

Operation Operation::BlockFeature(int feature) {
  Operation op;
  op.kind = OpKind::kBlockFeature;
  op.feature = feature;
  return op;
}

Operation Operation::RemoveTree(int tree) {
  Operation op;
  op.kind = OpKind::kRemoveTree;
  op.tree = tree;
  return op;
}

Operation Operation::GrowTree() { return Operation(); }

Operation Operation::RemoveNode(int tree, int node) {
  Operation op;
  op.kind = OpKind::kRemoveNode;
  op.tree = tree;
  op.node = node;
  return op;
}

Operation Operation::RemoveNodeAll(int tree, int node) {
  Operation op = RemoveNode(tree, node);
  op.kind = OpKind::kRemoveNodeAll;
  return op;
}

Operation Operation::ExpandNode(int tree, int node) {
  Operation op = RemoveNode(tree, node);
  op.kind = OpKind::kExpandNode;
  return op;
}

Operation Operation::ExpandNodeAll(int tree, int node) {
  Operation op = RemoveNode(tree, node);
  op.kind = OpKind::kExpandNodeAll;
  return op;
}

Operation Operation::Restore(int history_index) {
  Operation op;
  op.kind = OpKind::kRestore;
  op.history_index = history_index;
  return op;
}

Operation Operation::FromJson(const json& in) {
  if (!in.is_object()) throw BadRequest("operation must be a JSON object");
  if (!in.contains("kind") || !in.at("kind").is_string()) {
    throw BadRequest("operation needs a string kind", {{"argument", "kind"}});
  }
  Operation op;
  op.kind = ParseOpKind(in.at("kind").get<std::string>());
  const json args = in.value("args", json::object());
  if (!args.is_object()) {
    throw BadRequest("args must be a JSON object", {{"argument", "args"}});
  }
  switch (op.kind) {
    case OpKind::kRebuild:
      op.params = args.value("params", json::object());
      if (!op.params.is_object()) {
        throw BadRequest("params must be a JSON object",
                         {{"argument", "params"}});
      }
      break;
    case OpKind::kAllowFeature:
    case OpKind::kBlockFeature:
      if (args.contains("feature") && args.at("feature").is_string()) {
        op.feature_name = args.at("feature").get<std::string>();
      } else {
        op.feature = RequireInt(args, "feature");
      }
      break;
    case OpKind::kRemoveTree:
      op.tree = RequireInt(args, "tree");
      break;
    case OpKind::kGrowTree:
      break;
    case OpKind::kRestore:
      op.history_index = RequireInt(args, "index");
      break;
    default:
      op.tree = RequireInt(args, "tree");
      op.node = RequireInt(args, "node");
      break;
  }
  return op;
}

json Operation::ArgsJson() const {
  json args = json::object();
  switch (kind) {
    case OpKind::kRebuild:
      args["params"] = params;
      break;
    case OpKind::kAllowFeature:
    case OpKind::kBlockFeature:
      if (feature_name && feature < 0) {
        args["feature"] = *feature_name;
      } else {
        args["feature"] = feature;
      }
      break;
    case OpKind::kRemoveTree:
      args["tree"] = tree;
      break;
    case OpKind::kGrowTree:
      break;
    case OpKind::kRestore:
      args["index"] = history_index;
      break;
    default:
      if (TakesTreeAndNode(kind)) {
        args["tree"] = tree;
        args["node"] = node;
      }
      break;
  }
  return args;
}

json Operation::ToJson() const {
  return {{"kind", OpKindName(kind)}, {"args", ArgsJson()}};
}

json LoggedOperation::ToJson() const {
  json out = op.ToJson();
  out["timestamp"] = timestamp;
  return out;
}

LoggedOperation LoggedOperation::FromJson(const json& in) {
  LoggedOperation logged;
  logged.op = Operation::FromJson(in);
  if (!in.contains("timestamp") || !in.at("timestamp").is_number_integer()) {
    throw BadRequest("logged operation needs an integer timestamp");
  }
  logged.timestamp = in.at("timestamp").get<int64_t>();
  return logged;
}

std::vector<Operation> ParseScript(const json& script) {
  if (!script.is_array()) {
    throw BadRequest("operation script must be a JSON array");
  }
  std::vector<Operation> ops;
  for (size_t i = 0; i < script.size(); ++i) {
    try {
      ops.push_back(Operation::FromJson(script[i]));
    } catch (const Error& e) {
      json detail = e.detail().is_object() ? e.detail() : json::object();
      detail["index"] = i;
      throw Error(e.code(), e.what(), std::move(detail));
    }
  }
  return ops;
}

}  // namespace tbt::session
