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

#include "tbt/boosting/tree.hpp"

#include <algorithm>
#include <deque>

#include "tbt/canonical_json.hpp"
#include "tbt/error.hpp"

namespace tbt::boosting {

std::string RuleText(const SplitRule& rule, const data::Dataset& schema) {
  const data::FeatureMeta& meta = schema.feature(rule.feature);
  if (rule.test == TestKind::kNumeric) {
    return meta.name + " < " + FormatReal(rule.threshold);
  }
  const auto code = static_cast<size_t>(rule.category);
  const std::string category =
      code < meta.categories.size() ? meta.categories[code]
                                    : "#" + std::to_string(rule.category);
  return meta.name + " = " + category;
}

std::string_view DirectionName(Direction direction) {
  return direction == Direction::kLeft ? "left" : "right";
}

Tree Tree::SingleLeaf(double value, const NodeStats& stats) {
  Tree tree;
  TreeNode root;
  root.value = value;
  root.stats = stats;
  tree.nodes.push_back(root);
  return tree;
}

int Tree::Route(std::span<const double> sample) const {
  int id = 0;
  while (!nodes[id].is_leaf) {
    const TreeNode& node = nodes[id];
    id = node.rule.GoesLeft(sample[node.rule.feature]) ? node.left : node.right;
  }
  return id;
}

int Tree::RouteRow(const data::Dataset& dataset, size_t row) const {
  int id = 0;
  while (!nodes[id].is_leaf) {
    const TreeNode& node = nodes[id];
    id = node.rule.GoesLeft(dataset.value(node.rule.feature, row)) ? node.left
                                                                   : node.right;
  }
  return id;
}

std::vector<int> Tree::Parents() const {
  std::vector<int> parents(nodes.size(), -1);
  for (const TreeNode& node : nodes) {
    if (node.is_leaf) continue;
    parents[node.left] = node.id;
    parents[node.right] = node.id;
  }
  return parents;
}

std::vector<int> Tree::Depths() const {
  std::vector<int> depths(nodes.size(), 0);
  std::deque<int> queue = {0};
  while (!queue.empty()) {
    const TreeNode& node = nodes[queue.front()];
    queue.pop_front();
    if (node.is_leaf) continue;
    depths[node.left] = depths[node.id] + 1;
    depths[node.right] = depths[node.id] + 1;
    queue.push_back(node.left);
    queue.push_back(node.right);
  }
  return depths;
}

int Tree::MaxDepth() const {
  const std::vector<int> depths = Depths();
  return depths.empty() ? 0 : *std::max_element(depths.begin(), depths.end());
}

std::vector<int> Tree::PathTo(int node) const {
  if (node < 0 || static_cast<size_t>(node) >= nodes.size()) {
    throw NotFound("unknown node", {{"node", node}});
  }
  const std::vector<int> parents = Parents();
  std::vector<int> path;
  for (int id = node; id != -1; id = parents[id]) path.push_back(id);
  std::reverse(path.begin(), path.end());
  return path;
}

PathSignature Tree::Signature(int node) const {
  const std::vector<int> path = PathTo(node);
  PathSignature signature;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const TreeNode& step = nodes[path[i]];
    signature.prefix.push_back(
        {step.rule,
         step.left == path[i + 1] ? Direction::kLeft : Direction::kRight});
  }
  const TreeNode& target = nodes[node];
  if (!target.is_leaf) signature.terminal = target.rule;
  return signature;
}

std::vector<int> Tree::FindSignature(const PathSignature& signature) const {
  // Walk the prefix from the root; at most one node can match.
  int id = 0;
  for (const PathStep& step : signature.prefix) {
    const TreeNode& node = nodes[id];
    if (node.is_leaf || node.rule != step.rule) return {};
    id = step.direction == Direction::kLeft ? node.left : node.right;
  }
  const TreeNode& node = nodes[id];
  if (signature.is_leaf() ? node.is_leaf
                          : (!node.is_leaf && node.rule == *signature.terminal)) {
    return {id};
  }
  return {};
}

std::vector<std::vector<size_t>> Tree::NodeSamples(
    const data::Dataset& dataset) const {
  std::vector<std::vector<size_t>> samples(nodes.size());
  for (size_t row = 0; row < dataset.num_samples(); ++row) {
    int id = 0;
    samples[0].push_back(row);
    while (!nodes[id].is_leaf) {
      const TreeNode& node = nodes[id];
      id = node.rule.GoesLeft(dataset.value(node.rule.feature, row))
               ? node.left
               : node.right;
      samples[id].push_back(row);
    }
  }
  return samples;
}

void Tree::Prune(int node) {
  if (node < 0 || static_cast<size_t>(node) >= nodes.size()) {
    throw NotFound("unknown node", {{"node", node}});
  }
  TreeNode& target = nodes[node];
  target.is_leaf = true;
  target.rule = SplitRule();
  target.left = -1;
  target.right = -1;
  Compact();
}

void Tree::Compact() {
  std::vector<TreeNode> compacted;
  std::vector<int> new_id(nodes.size(), -1);
  std::deque<int> queue = {0};
  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    new_id[id] = static_cast<int>(compacted.size());
    compacted.push_back(nodes[id]);
    if (!nodes[id].is_leaf) {
      queue.push_back(nodes[id].left);
      queue.push_back(nodes[id].right);
    }
  }
  for (TreeNode& node : compacted) {
    node.id = new_id[node.id];
    if (!node.is_leaf) {
      node.left = new_id[node.left];
      node.right = new_id[node.right];
    }
  }
  nodes = std::move(compacted);
}

void Tree::CheckStructure() const {
  if (nodes.empty()) throw Error(ErrorCode::kInternal, "tree has no nodes");
  std::vector<int> seen(nodes.size(), 0);
  std::deque<int> queue = {0};
  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    if (id < 0 || static_cast<size_t>(id) >= nodes.size() || seen[id]++) {
      throw Error(ErrorCode::kInternal, "tree nodes do not form a tree",
                  {{"node", id}});
    }
    const TreeNode& node = nodes[id];
    if (node.id != id) {
      throw Error(ErrorCode::kInternal, "node id does not match its index",
                  {{"node", id}});
    }
    if (!node.is_leaf) {
      queue.push_back(node.left);
      queue.push_back(node.right);
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw Error(ErrorCode::kInternal, "tree has unreachable nodes");
  }
}

}  // namespace tbt::boosting
