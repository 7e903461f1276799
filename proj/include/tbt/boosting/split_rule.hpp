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

#ifndef TBT_BOOSTING_SPLIT_RULE_HPP_
#define TBT_BOOSTING_SPLIT_RULE_HPP_

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "tbt/data/dataset.hpp"

namespace tbt::boosting {

enum class TestKind { kNumeric, kCategorical };

// A decision rule on one feature. Numeric rules send a sample left iff its
// value is strictly below the threshold; categorical rules send it left iff
// its category code equals `category`. Unknown categories therefore go right.
struct SplitRule {
  int feature = -1;
  TestKind test = TestKind::kNumeric;
  double threshold = 0.0;
  int category = -1;

  static SplitRule Numeric(int feature, double threshold) {
    return {feature, TestKind::kNumeric, threshold, -1};
  }
  static SplitRule Categorical(int feature, int category) {
    return {feature, TestKind::kCategorical, 0.0, category};
  }

  bool GoesLeft(double value) const {
    return test == TestKind::kNumeric ? value < threshold
                                      : value == static_cast<double>(category);
  }

  // threshold for numeric rules, code for categorical ones.
  double ThresholdOrCode() const {
    return test == TestKind::kNumeric ? threshold : category;
  }

  auto operator<=>(const SplitRule&) const = default;
  bool operator==(const SplitRule&) const = default;
};

// Human-readable rule, e.g. "odor = n" or "glucose < 120.5".
std::string RuleText(const SplitRule& rule, const data::Dataset& schema);

enum class Direction { kLeft, kRight };

std::string_view DirectionName(Direction direction);

struct PathStep {
  SplitRule rule;
  Direction direction = Direction::kLeft;

  auto operator<=>(const PathStep&) const = default;
  bool operator==(const PathStep&) const = default;
};

// Root-to-node identification of a tree node: the (rule, direction) pairs
// taken from the root, then the node's own rule, or nothing for a leaf.
// Nodes in different trees denote "the same path" iff signatures are equal.
struct PathSignature {
  std::vector<PathStep> prefix;
  std::optional<SplitRule> terminal;

  bool is_leaf() const { return !terminal.has_value(); }

  auto operator<=>(const PathSignature&) const = default;
  bool operator==(const PathSignature&) const = default;
};

}  // namespace tbt::boosting

#endif  // TBT_BOOSTING_SPLIT_RULE_HPP_
