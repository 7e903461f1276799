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

#include "tbt/session/views.hpp"

#include <set>
#include <string>

#include "tbt/error.hpp"

namespace tbt::session {
namespace {

using boosting::Tree;
using boosting::TreeNode;
using nlohmann::json;

const Tree& TreeAt(const Session& session, int tree) {
  const auto& trees = session.model().trees;
  if (tree < 0 || static_cast<size_t>(tree) >= trees.size()) {
    throw BadRequest("tree index out of range",
                     {{"argument", "tree"},
                      {"value", tree},
                      {"num_trees", trees.size()}});
  }
  return trees[tree];
}

// Ties go to the positive class, matching the score >= 0 label rule.
int MajorClass(const boosting::NodeStats& stats) {
  return stats.n_pos >= stats.n_neg ? 1 : 0;
}

}  // namespace

json FeatureView(const Session& session) {
  std::set<int> selected;
  for (const Tree& tree : session.model().trees) {
    for (const TreeNode& node : tree.nodes) {
      if (!node.is_leaf) selected.insert(node.rule.feature);
    }
  }
  const auto& blocked = session.constraints().blocked_features;
  const auto& train = session.train();
  json groups = json::array();
  for (const auto& [name, ids] : session.grouping().groups) {
    json features = json::array();
    for (int id : ids) {
      const auto& meta = train.feature(id);
      features.push_back({{"id", id},
                          {"name", meta.name},
                          {"kind", data::FeatureKindName(meta.kind)},
                          {"allowed", !blocked.contains(id)},
                          {"selected", selected.contains(id)}});
    }
    groups.push_back({{"name", name},
                      {"count", ids.size()},
                      {"features", std::move(features)}});
  }
  return {{"strategy", data::GroupingStrategyName(session.grouping().strategy)},
          {"groups", std::move(groups)}};
}

json ForestView(const Session& session) {
  const auto& model = session.model();
  json trees = json::array();
  for (size_t m = 0; m < model.trees.size(); ++m) {
    const Tree& tree = model.trees[m];
    size_t leaves = 0;
    for (const TreeNode& node : tree.nodes) leaves += node.is_leaf ? 1 : 0;
    json row = {{"index", m},
                {"gamma", model.gammas[m]},
                {"num_nodes", tree.size()},
                {"num_leaves", leaves},
                {"depth", tree.MaxDepth()},
                {"root_feature", nullptr},
                {"root_feature_name", nullptr},
                {"root_rule_text", nullptr}};
    const TreeNode& root = tree.node(0);
    if (!root.is_leaf) {
      row["root_feature"] = root.rule.feature;
      row["root_feature_name"] = session.train().feature(root.rule.feature).name;
      row["root_rule_text"] = boosting::RuleText(root.rule, session.train());
    }
    trees.push_back(std::move(row));
  }
  return {{"trees", std::move(trees)}};
}

json TreeView(const Session& session, int tree_index) {
  const Tree& tree = TreeAt(session, tree_index);
  const double weight = session.model().TreeWeight(tree_index);
  const auto depths = tree.Depths();
  const auto parents = tree.Parents();
  json nodes = json::array();
  json edges = json::array();
  for (const TreeNode& node : tree.nodes) {
    json out = {{"id", node.id},
                {"depth", depths[node.id]},
                {"parent", parents[node.id] < 0 ? json(nullptr)
                                                : json(parents[node.id])},
                {"is_leaf", node.is_leaf},
                {"n", node.stats.n},
                {"n_pos", node.stats.n_pos},
                {"n_neg", node.stats.n_neg},
                {"rule_text", nullptr},
                {"feature", nullptr},
                {"left", nullptr},
                {"right", nullptr},
                {"value", nullptr},
                {"path_weight", nullptr},
                {"major_class", nullptr}};
    if (node.is_leaf) {
      out["value"] = node.value;
      out["path_weight"] = weight * node.value;
      out["major_class"] = MajorClass(node.stats);
    } else {
      out["rule_text"] = boosting::RuleText(node.rule, session.train());
      out["feature"] = node.rule.feature;
      out["left"] = node.left;
      out["right"] = node.right;
      edges.push_back({{"from", node.id},
                       {"to", node.left},
                       {"direction", "left"},
                       {"n", tree.node(node.left).stats.n}});
      edges.push_back({{"from", node.id},
                       {"to", node.right},
                       {"direction", "right"},
                       {"n", tree.node(node.right).stats.n}});
    }
    nodes.push_back(std::move(out));
  }
  return {{"tree", tree_index},
          {"gamma", session.model().gammas[tree_index]},
          {"weight", weight},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)}};
}

json PathPurityView(const Session& session, int tree_index, int leaf) {
  const Tree& tree = TreeAt(session, tree_index);
  if (leaf < 0 || static_cast<size_t>(leaf) >= tree.size()) {
    throw BadRequest("node id out of range",
                     {{"argument", "leaf"}, {"value", leaf}});
  }
  if (!tree.node(leaf).is_leaf) {
    throw BadRequest("path purity needs a leaf node",
                     {{"argument", "leaf"}, {"value", leaf}});
  }
  const auto path = tree.PathTo(leaf);
  json nodes = json::array();
  for (size_t i = 0; i < path.size(); ++i) {
    const TreeNode& node = tree.node(path[i]);
    json out = {{"id", node.id},
                {"depth", i},
                {"n", node.stats.n},
                {"n_neg", node.stats.n_neg},
                {"n_pos", node.stats.n_pos},
                {"rule_text", nullptr},
                {"direction", nullptr}};
    if (!node.is_leaf) {
      out["rule_text"] = boosting::RuleText(node.rule, session.train());
      out["direction"] = path[i + 1] == node.left ? "left" : "right";
    }
    nodes.push_back(std::move(out));
  }
  return {{"tree", tree_index}, {"leaf", leaf}, {"nodes", std::move(nodes)}};
}

json HistoryView(const Session& session) {
  json records = json::array();
  for (const auto& record : session.history()) {
    records.push_back(record.ToJson(false));
  }
  return {{"records", std::move(records)}};
}

}  // namespace tbt::session
