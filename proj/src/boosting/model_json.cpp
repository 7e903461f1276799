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

#include "tbt/boosting/model_json.hpp"

#include <cmath>

#include "tbt/canonical_json.hpp"
#include "tbt/error.hpp"

namespace tbt::boosting {
namespace {

using nlohmann::json;

template <typename Fn>
auto Parsing(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed ") + what + ": " + e.what());
  }
}

TestKind ParseTestKind(const std::string& name) {
  if (name == "numeric") return TestKind::kNumeric;
  if (name == "categorical") return TestKind::kCategorical;
  throw DataError("unknown test kind", {{"test_kind", name}});
}

const char* TestKindName(TestKind kind) {
  return kind == TestKind::kNumeric ? "numeric" : "categorical";
}

json RuleFields(const SplitRule& rule) {
  json out = {{"feature", rule.feature}, {"test_kind", TestKindName(rule.test)}};
  if (rule.test == TestKind::kNumeric) {
    out["threshold_or_code"] = rule.threshold;
  } else {
    out["threshold_or_code"] = rule.category;
  }
  return out;
}

}  // namespace

json RuleToJson(const SplitRule& rule) { return RuleFields(rule); }

SplitRule RuleFromJson(const json& in) {
  return Parsing("rule", [&] {
    const int feature = in.at("feature").get<int>();
    const TestKind kind = ParseTestKind(in.at("test_kind").get<std::string>());
    if (kind == TestKind::kNumeric) {
      const double threshold = in.at("threshold_or_code").get<double>();
      if (!std::isfinite(threshold)) throw DataError("non-finite threshold");
      return SplitRule::Numeric(feature, threshold);
    }
    return SplitRule::Categorical(feature,
                                  in.at("threshold_or_code").get<int>());
  });
}

json TreeToJson(const Tree& tree) {
  json nodes = json::array();
  for (const TreeNode& node : tree.nodes) {
    json entry = {{"id", node.id},
                  {"kind", node.is_leaf ? "leaf" : "split"},
                  {"value", node.value},
                  {"n", node.stats.n},
                  {"n_pos", node.stats.n_pos},
                  {"n_neg", node.stats.n_neg},
                  {"G", node.stats.grad_sum},
                  {"H", node.stats.hess_sum}};
    if (node.is_leaf) {
      entry["feature"] = nullptr;
      entry["test_kind"] = nullptr;
      entry["threshold_or_code"] = nullptr;
      entry["left"] = nullptr;
      entry["right"] = nullptr;
    } else {
      entry.update(RuleFields(node.rule));
      entry["left"] = node.left;
      entry["right"] = node.right;
    }
    nodes.push_back(std::move(entry));
  }
  return {{"nodes", std::move(nodes)}};
}

Tree TreeFromJson(const json& in) {
  Tree tree = Parsing("tree", [&] {
    Tree parsed;
    for (const json& entry : in.at("nodes")) {
      TreeNode node;
      node.id = entry.at("id").get<int>();
      const std::string kind = entry.at("kind").get<std::string>();
      if (kind != "leaf" && kind != "split") {
        throw DataError("unknown node kind", {{"kind", kind}});
      }
      node.is_leaf = kind == "leaf";
      node.value = entry.at("value").get<double>();
      node.stats.n = entry.at("n").get<int64_t>();
      node.stats.n_pos = entry.at("n_pos").get<int64_t>();
      node.stats.n_neg = entry.at("n_neg").get<int64_t>();
      node.stats.grad_sum = entry.at("G").get<double>();
      node.stats.hess_sum = entry.at("H").get<double>();
      if (!node.is_leaf) {
        node.rule = RuleFromJson(entry);
        node.left = entry.at("left").get<int>();
        node.right = entry.at("right").get<int>();
      }
      parsed.nodes.push_back(node);
    }
    return parsed;
  });
  try {
    tree.CheckStructure();
  } catch (const Error& e) {
    throw DataError(std::string("invalid tree: ") + e.what());
  }
  return tree;
}

json EnsembleToJson(const Ensemble& ensemble) {
  json trees = json::array();
  for (const Tree& tree : ensemble.trees) trees.push_back(TreeToJson(tree));
  json gammas = json::array();
  for (const double g : ensemble.gammas) gammas.push_back(g);
  return {{"base_score", ensemble.base_score},
          {"shrinkage", ensemble.shrinkage},
          {"lambda", ensemble.lambda},
          {"gammas", std::move(gammas)},
          {"trees", std::move(trees)}};
}

Ensemble EnsembleFromJson(const json& in) {
  Ensemble ensemble = Parsing("model", [&] {
    Ensemble parsed;
    parsed.base_score = in.at("base_score").get<double>();
    parsed.shrinkage = in.at("shrinkage").get<double>();
    parsed.lambda = in.at("lambda").get<double>();
    parsed.gammas = in.at("gammas").get<std::vector<double>>();
    for (const json& tree : in.at("trees")) {
      parsed.trees.push_back(TreeFromJson(tree));
    }
    return parsed;
  });
  if (ensemble.trees.size() != ensemble.gammas.size()) {
    throw DataError("model has a different number of trees and gammas");
  }
  return ensemble;
}

std::string SerializeEnsemble(const Ensemble& ensemble) {
  return DumpCanonical(EnsembleToJson(ensemble));
}

std::string SerializeTree(const Tree& tree) {
  return DumpCanonical(TreeToJson(tree));
}

json SignatureToJson(const PathSignature& signature) {
  json out = json::array();
  for (const PathStep& step : signature.prefix) {
    json entry = RuleFields(step.rule);
    entry["direction"] = DirectionName(step.direction);
    out.push_back(std::move(entry));
  }
  if (signature.terminal) {
    out.push_back(RuleFields(*signature.terminal));
  } else {
    out.push_back({{"leaf", true}});
  }
  return out;
}

PathSignature SignatureFromJson(const json& in) {
  return Parsing("path signature", [&] {
    if (!in.is_array() || in.empty()) {
      throw DataError("path signature must be a non-empty array");
    }
    PathSignature signature;
    for (size_t i = 0; i + 1 < in.size(); ++i) {
      const std::string direction = in[i].at("direction").get<std::string>();
      if (direction != "left" && direction != "right") {
        throw DataError("unknown direction", {{"direction", direction}});
      }
      signature.prefix.push_back(
          {RuleFromJson(in[i]),
           direction == "left" ? Direction::kLeft : Direction::kRight});
    }
    const json& last = in.back();
    if (!last.value("leaf", false)) signature.terminal = RuleFromJson(last);
    return signature;
  });
}

json ConstraintsToJson(const ConstraintSet& constraints) {
  json forbidden = json::array();
  for (const PathSignature& signature : constraints.forbidden_paths) {
    forbidden.push_back(SignatureToJson(signature));
  }
  return {{"blocked", constraints.blocked_features},
          {"forbidden_paths", std::move(forbidden)},
          {"max_trees", constraints.max_trees},
          {"max_depth", constraints.max_depth}};
}

ConstraintSet ConstraintsFromJson(const json& in) {
  return Parsing("constraints", [&] {
    ConstraintSet constraints;
    for (const json& id : in.at("blocked")) {
      constraints.blocked_features.insert(id.get<int>());
    }
    for (const json& signature : in.at("forbidden_paths")) {
      constraints.forbidden_paths.insert(SignatureFromJson(signature));
    }
    constraints.max_trees = in.value("max_trees", constraints.max_trees);
    constraints.max_depth = in.value("max_depth", constraints.max_depth);
    return constraints;
  });
}

json ParamsToJson(const FitParams& params) {
  return {{"num_trees", params.num_trees}, {"max_depth", params.max_depth},
          {"eta", params.shrinkage},       {"lambda", params.lambda},
          {"min_leaf", params.min_leaf},   {"min_gain", params.min_gain},
          {"max_trees", params.max_trees}};
}

FitParams ParamsFromJson(const json& in, const FitParams& base) {
  if (!in.is_object()) throw BadRequest("parameters must be a JSON object");
  FitParams params = base;
  auto field = [&](const char* name, auto* target) {
    if (!in.contains(name) || in.at(name).is_null()) return;
    const json& value = in.at(name);
    using T = std::remove_pointer_t<decltype(target)>;
    if constexpr (std::is_same_v<T, int>) {
      if (!value.is_number_integer()) {
        throw BadRequest(std::string("parameter must be an integer: ") + name,
                         {{"argument", name}});
      }
    } else if (!value.is_number()) {
      throw BadRequest(std::string("parameter must be a number: ") + name,
                       {{"argument", name}});
    }
    *target = value.get<T>();
  };
  field("num_trees", &params.num_trees);
  field("max_depth", &params.max_depth);
  field("eta", &params.shrinkage);
  field("lambda", &params.lambda);
  field("min_leaf", &params.min_leaf);
  field("min_gain", &params.min_gain);
  field("max_trees", &params.max_trees);
  ValidateParams(params);
  return params;
}

}  // namespace tbt::boosting
