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

#include "tbt/session/session.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <span>

#include "tbt/boosting/learner.hpp"
#include "tbt/boosting/model_json.hpp"
#include "tbt/canonical_json.hpp"
#include "tbt/error.hpp"

namespace tbt::session {
namespace {

using boosting::ConstraintSet;
using boosting::Ensemble;
using boosting::FitParams;
using boosting::PathSignature;
using boosting::Tree;
using nlohmann::json;

constexpr int kExportVersion = 1;

// Structural edit of one tree at its own stage. Returns true if the tree's
// structure changed.
using TreeEdit = std::function<bool(Tree& tree, std::span<const double>)>;

// Re-fits trees [start, end) in stage order. Trees with an entry in `edits`
// keep their (edited) structure and only get new leaf values and a new
// gamma; the others are relearned from scratch under `constraints`. Trees
// before `start` are not touched. Returns true if any edit changed a tree.
bool Restage(Ensemble& model, const data::Dataset& train,
             const ConstraintSet& constraints, const FitParams& params,
             size_t start, const std::map<size_t, TreeEdit>& edits) {
  const auto options = boosting::SplitOptions::From(params);
  std::vector<double> scores = model.ScoresUpTo(train, start);
  bool changed = false;
  for (size_t k = start; k < model.trees.size(); ++k) {
    Tree& tree = model.trees[k];
    if (auto it = edits.find(k); it != edits.end()) {
      changed = it->second(tree, scores) || changed;
      boosting::RefitTree(tree, train, scores, params.lambda);
    } else {
      tree = boosting::LearnTree(train, scores, constraints, params.max_depth,
                                 options);
    }
    model.gammas[k] = boosting::LineSearchGamma(tree, train, scores);
    const double weight = model.TreeWeight(k);
    for (size_t i = 0; i < scores.size(); ++i) {
      scores[i] += weight * tree.PredictRow(train, i);
    }
  }
  return changed;
}

std::vector<int> ChangedTrees(const std::vector<std::string>& before,
                              const Ensemble& after) {
  std::vector<int> changed;
  const size_t n = std::max(before.size(), after.trees.size());
  for (size_t k = 0; k < n; ++k) {
    if (k >= before.size() || k >= after.trees.size() ||
        before[k] != boosting::SerializeTree(after.trees[k])) {
      changed.push_back(static_cast<int>(k));
    }
  }
  return changed;
}

std::vector<std::string> SerializeTrees(const Ensemble& model) {
  std::vector<std::string> out;
  out.reserve(model.trees.size());
  for (const Tree& tree : model.trees) {
    out.push_back(boosting::SerializeTree(tree));
  }
  return out;
}

json SnapshotJson(const Ensemble& ensemble, const ConstraintSet& constraints,
                  const FitParams& params) {
  json out = boosting::EnsembleToJson(ensemble);
  out["constraints"] = boosting::ConstraintsToJson(constraints);
  out["params"] = boosting::ParamsToJson(params);
  return out;
}

struct SnapshotState {
  Ensemble model;
  ConstraintSet constraints;
  FitParams params;
};

SnapshotState ParseSnapshot(const json& snapshot) {
  if (!snapshot.is_object() || !snapshot.contains("constraints") ||
      !snapshot.contains("params")) {
    throw DataError("snapshot lacks constraints or params");
  }
  SnapshotState state;
  state.model = boosting::EnsembleFromJson(snapshot);
  state.constraints = boosting::ConstraintsFromJson(snapshot.at("constraints"));
  state.params = boosting::ParamsFromJson(snapshot.at("params"));
  return state;
}

void CheckTreeIndex(const Ensemble& model, int tree) {
  if (tree < 0 || static_cast<size_t>(tree) >= model.trees.size()) {
    throw BadRequest("tree index out of range",
                     {{"argument", "tree"},
                      {"value", tree},
                      {"num_trees", model.trees.size()}});
  }
}

void CheckNodeIndex(const Tree& tree, int node) {
  if (node < 0 || static_cast<size_t>(node) >= tree.size()) {
    throw BadRequest("node id out of range",
                     {{"argument", "node"},
                      {"value", node},
                      {"num_nodes", tree.size()}});
  }
}

// Node that remove_node(tree, node) turns into a leaf: the node itself, or
// the parent of a non-root leaf.
int RemovalTarget(const Tree& tree, int node) {
  if (!tree.node(node).is_leaf) return node;
  if (node == 0) {
    throw BadRequest(
        "tree is a single leaf; use remove_tree to delete it",
        {{"argument", "node"}, {"value", node}});
  }
  return tree.Parents()[node];
}

// Trees (ascending) containing a node with `signature`.
std::vector<size_t> MatchingTrees(const Ensemble& model,
                                  const PathSignature& signature) {
  std::vector<size_t> out;
  for (size_t k = 0; k < model.trees.size(); ++k) {
    if (!model.trees[k].FindSignature(signature).empty()) out.push_back(k);
  }
  return out;
}

TreeEdit PruneAt(PathSignature signature) {
  return [signature](Tree& tree, std::span<const double>) {
    const auto found = tree.FindSignature(signature);
    if (found.empty()) return false;
    tree.Prune(found.front());
    return true;
  };
}

}  // namespace

json HistoryRecord::ToJson(bool with_snapshot) const {
  json out = {{"index", index},
              {"operation", operation},
              {"train_error", train_error},
              {"test_error", test_error}};
  if (with_snapshot) out["snapshot"] = json::parse(snapshot);
  return out;
}

ErrorPair ComputeErrors(const Ensemble& ensemble, const data::Dataset& train,
                        const data::Dataset& test) {
  return {boosting::ErrorRate(train, ensemble.Scores(train)),
          boosting::ErrorRate(test, ensemble.Scores(test))};
}

std::string SerializeSnapshot(const Ensemble& ensemble,
                              const ConstraintSet& constraints,
                              const FitParams& params) {
  return DumpCanonical(SnapshotJson(ensemble, constraints, params));
}

std::vector<std::string> FindConstraintViolations(
    const Ensemble& ensemble, const ConstraintSet& constraints,
    size_t first_tree) {
  std::vector<std::string> violations;
  for (size_t k = 0; k < ensemble.trees.size(); ++k) {
    const Tree& tree = ensemble.trees[k];
    for (const auto& node : tree.nodes) {
      if (node.is_leaf) continue;
      const std::string where =
          "tree " + std::to_string(k) + " node " + std::to_string(node.id);
      if (k >= first_tree &&
          constraints.blocked_features.contains(node.rule.feature)) {
        violations.push_back(where + " splits on blocked feature " +
                             std::to_string(node.rule.feature));
      }
      const PathSignature signature = tree.Signature(node.id);
      if (constraints.IsForbidden(signature.prefix, *signature.terminal)) {
        violations.push_back(where + " matches a forbidden path");
      }
    }
  }
  return violations;
}

Session Session::Create(std::shared_ptr<const data::Dataset> train,
                        std::shared_ptr<const data::Dataset> test,
                        data::FeatureGrouping grouping, FitParams params) {
  if (!train || !test) throw BadRequest("session needs train and test data");
  data::CheckSchemaCompatible(*train, *test);
  Session s;
  s.grouping_ = std::move(grouping);
  const auto labels = s.grouping_.LabelsByFeature(train->num_features());
  s.train_ = std::make_shared<const data::Dataset>(train->WithGroups(labels));
  s.test_ = std::make_shared<const data::Dataset>(test->WithGroups(labels));
  s.params_ = params;
  s.constraints_ = ConstraintSet::FromParams(params);
  s.model_ = boosting::FitEnsemble(*s.train_, params, s.constraints_);
  const Operation op = Operation::Rebuild(boosting::ParamsToJson(params));
  s.Record(op, "rebuild");
  return s;
}

Operation Session::Resolve(const Operation& in) const {
  Operation op = in;
  if (op.feature_name && op.feature < 0) {
    const auto& features = train_->features();
    const auto it =
        std::find_if(features.begin(), features.end(),
                     [&](const auto& f) { return f.name == *op.feature_name; });
    if (it == features.end()) {
      throw BadRequest("unknown feature",
                       {{"argument", "feature"}, {"value", *op.feature_name}});
    }
    op.feature = it->id;
  }
  op.feature_name.reset();
  return op;
}

std::string Session::Describe(const Operation& op) const {
  const std::string kind(OpKindName(op.kind));
  switch (op.kind) {
    case OpKind::kRebuild:
    case OpKind::kGrowTree:
      return kind;
    case OpKind::kAllowFeature:
    case OpKind::kBlockFeature:
      return kind + " " + train_->feature(op.feature).name;
    case OpKind::kRemoveTree:
      return kind + " tree " + std::to_string(op.tree);
    case OpKind::kRestore:
      return kind + " " + std::to_string(op.history_index);
    default:
      return kind + " tree " + std::to_string(op.tree) + " node " +
             std::to_string(op.node);
  }
}

void Session::Record(const Operation& op, std::string description) {
  const ErrorPair errors = ComputeErrors(model_, *train_, *test_);
  HistoryRecord record;
  record.index = static_cast<int>(history_.size());
  record.operation = std::move(description);
  record.train_error = errors.train;
  record.test_error = errors.test;
  record.snapshot = CurrentSnapshot();
  log_.push_back({op, record.index});
  history_.push_back(std::move(record));
}

ApplyOutcome Session::Apply(const Operation& raw) {
  const Operation op = Resolve(raw);
  const std::vector<std::string> before = SerializeTrees(model_);

  // Work on copies so that a throwing operation leaves the session intact.
  Ensemble model = model_;
  ConstraintSet constraints = constraints_;
  FitParams params = params_;
  bool applied = true;
  std::string message;

  switch (op.kind) {
    case OpKind::kRebuild: {
      params = boosting::ParamsFromJson(op.params, params_);
      constraints = ConstraintSet::FromParams(params);
      model = boosting::FitEnsemble(*train_, params, constraints);
      break;
    }
    case OpKind::kAllowFeature:
    case OpKind::kBlockFeature: {
      if (op.feature < 0 ||
          static_cast<size_t>(op.feature) >= train_->num_features()) {
        throw BadRequest("unknown feature id",
                         {{"argument", "feature"}, {"value", op.feature}});
      }
      if (op.kind == OpKind::kBlockFeature) {
        constraints.blocked_features.insert(op.feature);
      } else {
        constraints.blocked_features.erase(op.feature);
      }
      break;
    }
    case OpKind::kRemoveTree: {
      CheckTreeIndex(model, op.tree);
      model.trees.erase(model.trees.begin() + op.tree);
      model.gammas.erase(model.gammas.begin() + op.tree);
      Restage(model, *train_, constraints, params, op.tree, {});
      break;
    }
    case OpKind::kGrowTree: {
      if (model.trees.size() >= static_cast<size_t>(constraints.max_trees)) {
        throw BadRequest("ensemble already has max_trees trees",
                         {{"argument", "max_trees"},
                          {"value", constraints.max_trees}});
      }
      std::vector<double> scores = model.Scores(*train_);
      boosting::AppendStage(model, *train_, scores, constraints, params);
      break;
    }
    case OpKind::kRemoveNode:
    case OpKind::kRemoveNodeAll: {
      CheckTreeIndex(model, op.tree);
      const Tree& tree = model.trees[op.tree];
      CheckNodeIndex(tree, op.node);
      const int target = RemovalTarget(tree, op.node);
      const PathSignature signature = tree.Signature(target);
      std::map<size_t, TreeEdit> edits;
      size_t start = op.tree;
      if (op.kind == OpKind::kRemoveNode) {
        edits[op.tree] = [target](Tree& t, std::span<const double>) {
          t.Prune(target);
          return true;
        };
      } else {
        const auto trees = MatchingTrees(model, signature);
        start = trees.front();
        for (size_t k : trees) edits[k] = PruneAt(signature);
        constraints.forbidden_paths.insert(signature);
      }
      Restage(model, *train_, constraints, params, start, edits);
      break;
    }
    case OpKind::kExpandNode:
    case OpKind::kExpandNodeAll: {
      CheckTreeIndex(model, op.tree);
      const Tree& tree = model.trees[op.tree];
      CheckNodeIndex(tree, op.node);
      if (!tree.node(op.node).is_leaf) {
        throw BadRequest("expand needs a leaf node",
                         {{"argument", "node"}, {"value", op.node}});
      }
      const PathSignature signature = tree.Signature(op.node);
      const auto options = boosting::SplitOptions::From(params);
      const data::Dataset& train = *train_;
      auto expand = [&](Tree& t, std::span<const double> scores) {
        const auto found = t.FindSignature(signature);
        if (found.empty()) return false;
        return boosting::ExpandLeaf(t, found.front(), train, scores,
                                    constraints, options);
      };
      std::map<size_t, TreeEdit> edits;
      size_t start = op.tree;
      if (op.kind == OpKind::kExpandNode) {
        edits[op.tree] = expand;
      } else {
        const auto trees = MatchingTrees(model, signature);
        start = trees.front();
        for (size_t k : trees) edits[k] = expand;
      }
      if (!Restage(model, train, constraints, params, start, edits)) {
        model = model_;
        applied = false;
        message = "no qualifying split; model unchanged";
      }
      break;
    }
    case OpKind::kRestore: {
      if (op.history_index < 0 ||
          static_cast<size_t>(op.history_index) >= history_.size()) {
        throw BadRequest("history index out of range",
                         {{"argument", "index"},
                          {"value", op.history_index},
                          {"history_length", history_.size()}});
      }
      SnapshotState state =
          ParseSnapshot(json::parse(history_[op.history_index].snapshot));
      model = std::move(state.model);
      constraints = std::move(state.constraints);
      params = state.params;
      break;
    }
  }

  model_ = std::move(model);
  constraints_ = std::move(constraints);
  params_ = params;
  Record(op, Describe(op));

  ApplyOutcome outcome;
  outcome.record = history_.back();
  outcome.changed_trees = ChangedTrees(before, model_);
  outcome.applied = applied;
  outcome.message = std::move(message);
  return outcome;
}

json Session::Export() const {
  json history = json::array();
  for (const auto& record : history_) history.push_back(record.ToJson(true));
  json ops = json::array();
  for (const auto& logged : log_) ops.push_back(logged.ToJson());
  return {{"format", "tbt-session"},
          {"version", kExportVersion},
          {"train", train_->ToJson()},
          {"test", test_->ToJson()},
          {"grouping", grouping_.ToJson()},
          {"params", boosting::ParamsToJson(params_)},
          {"model", json::parse(CurrentSnapshot())},
          {"ops", std::move(ops)},
          {"history", std::move(history)}};
}

std::string Session::ExportCanonical() const { return DumpCanonical(Export()); }

Session Session::Import(const json& in) {
  if (!in.is_object() || in.value("format", "") != "tbt-session") {
    throw DataError("not a session export");
  }
  if (in.value("version", 0) != kExportVersion) {
    throw DataError("unsupported export version",
                    {{"version", in.value("version", 0)}});
  }
  for (const char* key : {"train", "test", "grouping", "model", "ops",
                          "history"}) {
    if (!in.contains(key)) {
      throw DataError(std::string("export lacks ") + key, {{"field", key}});
    }
  }
  Session s;
  s.train_ =
      std::make_shared<const data::Dataset>(data::Dataset::FromJson(in["train"]));
  s.test_ =
      std::make_shared<const data::Dataset>(data::Dataset::FromJson(in["test"]));
  data::CheckSchemaCompatible(*s.train_, *s.test_);
  s.grouping_ = data::FeatureGrouping::FromJson(in["grouping"]);

  SnapshotState state = ParseSnapshot(in["model"]);
  s.model_ = std::move(state.model);
  s.constraints_ = std::move(state.constraints);
  s.params_ = state.params;

  const json& history = in["history"];
  const json& ops = in["ops"];
  if (!history.is_array() || !ops.is_array() || history.empty() ||
      history.size() != ops.size()) {
    throw DataError("export history and ops must be non-empty and aligned");
  }
  for (size_t i = 0; i < history.size(); ++i) {
    const json& h = history[i];
    HistoryRecord record;
    try {
      record.index = h.at("index").get<int>();
      record.operation = h.at("operation").get<std::string>();
      record.train_error = h.at("train_error").get<double>();
      record.test_error = h.at("test_error").get<double>();
      record.snapshot = DumpCanonical(h.at("snapshot"));
    } catch (const json::exception& e) {
      throw DataError("malformed history record", {{"index", i}});
    }
    if (record.index != static_cast<int>(i)) {
      throw DataError("history indices must be consecutive", {{"index", i}});
    }
    s.history_.push_back(std::move(record));
    s.log_.push_back(LoggedOperation::FromJson(ops[i]));
  }
  if (s.log_.front().op.kind != OpKind::kRebuild) {
    throw DataError("operation log must start with a rebuild");
  }
  if (s.CurrentSnapshot() != s.history_.back().snapshot) {
    throw DataError("model does not match the last history snapshot");
  }
  return s;
}

Session Session::Replay(std::shared_ptr<const data::Dataset> train,
                        std::shared_ptr<const data::Dataset> test,
                        data::FeatureGrouping grouping,
                        const std::vector<LoggedOperation>& log) {
  if (log.empty() || log.front().op.kind != OpKind::kRebuild) {
    throw BadRequest("operation log must start with a rebuild");
  }
  Session s = Create(std::move(train), std::move(test), std::move(grouping),
                     boosting::ParamsFromJson(log.front().op.params));
  for (size_t i = 1; i < log.size(); ++i) s.Apply(log[i].op);
  return s;
}

Session Session::ReplayLog() const {
  return Replay(train_, test_, grouping_, log_);
}

}  // namespace tbt::session
