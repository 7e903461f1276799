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

#ifndef TBT_BOOSTING_TREE_HPP_
#define TBT_BOOSTING_TREE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "tbt/boosting/split_rule.hpp"
#include "tbt/data/dataset.hpp"

namespace tbt::boosting {

// Training-set statistics of the samples that reach a node.
struct NodeStats {
  int64_t n = 0;
  int64_t n_pos = 0;
  int64_t n_neg = 0;
  double grad_sum = 0.0;
  double hess_sum = 0.0;

  bool operator==(const NodeStats&) const = default;
};

struct TreeNode {
  int id = 0;
  bool is_leaf = true;
  SplitRule rule;  // meaningful for internal nodes only
  int left = -1;
  int right = -1;
  double value = 0.0;  // additive score contribution, leaves only
  NodeStats stats;

  bool operator==(const TreeNode&) const = default;
};

// Binary decision tree stored as a node array rooted at index 0, where every
// node's id equals its index. Learned and compacted trees number their nodes
// in breadth-first order.
struct Tree {
  std::vector<TreeNode> nodes;

  static Tree SingleLeaf(double value, const NodeStats& stats);

  const TreeNode& node(int id) const { return nodes.at(id); }
  size_t size() const { return nodes.size(); }
  bool IsSingleLeaf() const { return nodes.size() == 1; }

  // Leaf reached by a feature vector.
  int Route(std::span<const double> sample) const;
  int RouteRow(const data::Dataset& dataset, size_t row) const;
  double Predict(std::span<const double> sample) const {
    return nodes[Route(sample)].value;
  }
  double PredictRow(const data::Dataset& dataset, size_t row) const {
    return nodes[RouteRow(dataset, row)].value;
  }

  // Parent id per node (-1 for the root).
  std::vector<int> Parents() const;
  // Depth per node, counted in edges from the root.
  std::vector<int> Depths() const;
  int MaxDepth() const;
  // Node ids from the root down to `node`, inclusive.
  std::vector<int> PathTo(int node) const;
  PathSignature Signature(int node) const;
  // Ids of all nodes whose signature equals `signature`.
  std::vector<int> FindSignature(const PathSignature& signature) const;

  // Training rows reaching each node, ascending within every node.
  std::vector<std::vector<size_t>> NodeSamples(
      const data::Dataset& dataset) const;

  // Turns `node` into a leaf (dropping its subtree) and renumbers the
  // remaining nodes breadth-first.
  void Prune(int node);
  // Renumbers reachable nodes in breadth-first order.
  void Compact();

  // Throws Error(kInternal) if the node array is not a single binary tree
  // rooted at 0 with consistent ids.
  void CheckStructure() const;

  bool operator==(const Tree&) const = default;
};

}  // namespace tbt::boosting

#endif  // TBT_BOOSTING_TREE_HPP_
