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

#ifndef TBT_SESSION_VIEWS_HPP_
#define TBT_SESSION_VIEWS_HPP_

#include "json.hpp"
#include "tbt/session/session.hpp"

namespace tbt::session {

// {"groups": [{"name", "count", "features": [{"id", "name", "kind",
//   "allowed", "selected"}]}]}. A feature is selected when some split in
// the model uses it.
nlohmann::json FeatureView(const Session& session);

// {"trees": [{"index", "gamma", "num_nodes", "num_leaves", "depth",
//   "root_feature", "root_feature_name", "root_rule_text"}]}. Root fields
// are null for a single-leaf tree.
nlohmann::json ForestView(const Session& session);

// {"tree", "gamma", "weight", "nodes": [...], "edges": [{"from", "to",
//   "direction", "n"}]}. Each node carries its rule text (internal) or
// path weight and major class (leaf) along with training counts.
nlohmann::json TreeView(const Session& session, int tree);

// {"tree", "leaf", "nodes": [{"id", "depth", "n", "n_neg", "n_pos",
//   "rule_text", "direction"}]} from the root down to `leaf`. "direction"
// is the branch taken out of the node towards the leaf (null at the leaf).
nlohmann::json PathPurityView(const Session& session, int tree, int leaf);

// {"records": [{"index", "operation", "train_error", "test_error"}]}
nlohmann::json HistoryView(const Session& session);

}  // namespace tbt::session

#endif  // TBT_SESSION_VIEWS_HPP_
