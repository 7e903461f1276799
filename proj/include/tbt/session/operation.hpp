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

#ifndef TBT_SESSION_OPERATION_HPP_
#define TBT_SESSION_OPERATION_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace tbt::session {

enum class OpKind {
  kRebuild,
  kAllowFeature,
  kBlockFeature,
  kRemoveTree,
  kGrowTree,
  kRemoveNode,
  kRemoveNodeAll,
  kExpandNode,
  kExpandNodeAll,
  kRestore,
};

std::string_view OpKindName(OpKind kind);
// Throws Error(kBadRequest) for an unknown name.
OpKind ParseOpKind(std::string_view name);

// One user steering operation. Which fields are meaningful depends on kind:
//   rebuild                         params (partial FitParams object)
//   allow_feature, block_feature    feature (id) or feature_name
//   remove_tree                     tree
//   grow_tree                       -
//   remove_node[_all], expand_node[_all]   tree, node
//   restore                         history_index
struct Operation {
  OpKind kind = OpKind::kGrowTree;
  int feature = -1;
  std::optional<std::string> feature_name;
  int tree = -1;
  int node = -1;
  int history_index = -1;
  nlohmann::json params = nlohmann::json::object();

  static Operation Rebuild(nlohmann::json params = nlohmann::json::object());
  static Operation AllowFeature(int feature);
  static Operation BlockFeature(int feature);
  static Operation RemoveTree(int tree);
  static Operation GrowTree();
  static Operation RemoveNode(int tree, int node);
  static Operation RemoveNodeAll(int tree, int node);
  static Operation ExpandNode(int tree, int node);
  static Operation ExpandNodeAll(int tree, int node);
  static Operation Restore(int history_index);

  // Parses {"kind": ..., "args": {...}} and checks that the arguments the
  // kind needs are present and well-typed. State-dependent validation
  // (index ranges) happens when the operation is applied.
  static Operation FromJson(const nlohmann::json& json);
  nlohmann::json ArgsJson() const;
  nlohmann::json ToJson() const;

  bool operator==(const Operation&) const = default;
};

// Entry of the operation log: {"kind", "args", "timestamp"}. The timestamp is
// the logical clock of the session, i.e. the index of the history record the
// operation produced.
struct LoggedOperation {
  Operation op;
  int64_t timestamp = 0;

  nlohmann::json ToJson() const;
  static LoggedOperation FromJson(const nlohmann::json& json);
};

// Parses a whole script, reporting the index of the first malformed entry.
std::vector<Operation> ParseScript(const nlohmann::json& script);

}  // namespace tbt::session

#endif  // TBT_SESSION_OPERATION_HPP_
