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

#ifndef TBT_SESSION_SESSION_HPP_
#define TBT_SESSION_SESSION_HPP_

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tbt/boosting/ensemble.hpp"
#include "tbt/data/dataset.hpp"
#include "tbt/session/operation.hpp"

namespace tbt::session {

struct HistoryRecord {
  int index = 0;
  std::string operation;
  double train_error = 0.0;
  double test_error = 0.0;
  // Canonical JSON of the model with its constraints and fit parameters.
  std::string snapshot;

  // {"index", "operation", "train_error", "test_error"}, plus the parsed
  // snapshot when requested.
  nlohmann::json ToJson(bool with_snapshot) const;
};

struct ApplyOutcome {
  HistoryRecord record;
  // Tree indices whose serialization differs before and after the
  // operation, including indices present on one side only.
  std::vector<int> changed_trees;
  // False for an expand that found no qualifying split anywhere.
  bool applied = true;
  std::string message;
};

struct ErrorPair {
  double train = 0.0;
  double test = 0.0;
};

ErrorPair ComputeErrors(const boosting::Ensemble& ensemble,
                        const data::Dataset& train, const data::Dataset& test);

// Canonical serialization of a session state; restore parses it back.
std::string SerializeSnapshot(const boosting::Ensemble& ensemble,
                              const boosting::ConstraintSet& constraints,
                              const boosting::FitParams& params);

// Descriptions of every node violating the constraints: nodes of trees
// [first_tree, end) that split on a blocked feature, and nodes of any tree
// whose (prefix, rule) is forbidden. Empty when the model is sound.
std::vector<std::string> FindConstraintViolations(
    const boosting::Ensemble& ensemble,
    const boosting::ConstraintSet& constraints, size_t first_tree = 0);

// The live model of one analyst together with everything needed to explain,
// steer, restore and replay it. Value type: copying a session is cheap
// enough for copy-on-write publication (datasets are shared).
class Session {
 public:
  // Fits the initial ensemble with empty constraints and records history #0.
  static Session Create(std::shared_ptr<const data::Dataset> train,
                        std::shared_ptr<const data::Dataset> test,
                        data::FeatureGrouping grouping,
                        boosting::FitParams params);

  // Validates `op` against the current state and applies it. Throws Error
  // without modifying the session when validation fails.
  ApplyOutcome Apply(const Operation& op);

  const data::Dataset& train() const { return *train_; }
  const data::Dataset& test() const { return *test_; }
  std::shared_ptr<const data::Dataset> train_ptr() const { return train_; }
  std::shared_ptr<const data::Dataset> test_ptr() const { return test_; }
  const data::FeatureGrouping& grouping() const { return grouping_; }
  const boosting::FitParams& params() const { return params_; }
  const boosting::ConstraintSet& constraints() const { return constraints_; }
  const boosting::Ensemble& model() const { return model_; }
  const std::vector<HistoryRecord>& history() const { return history_; }
  const std::vector<LoggedOperation>& log() const { return log_; }

  std::string CurrentSnapshot() const {
    return SerializeSnapshot(model_, constraints_, params_);
  }

  // {"format", "train", "test", "grouping", "params", "model", "ops",
  //  "history"}; "model" is the current snapshot.
  nlohmann::json Export() const;
  std::string ExportCanonical() const;
  // Rebuilds a session from an export, checking that the model section
  // equals the last history snapshot.
  static Session Import(const nlohmann::json& json);

  // Re-creates a session from its first logged operation (a rebuild) and
  // applies the rest in order.
  static Session Replay(std::shared_ptr<const data::Dataset> train,
                        std::shared_ptr<const data::Dataset> test,
                        data::FeatureGrouping grouping,
                        const std::vector<LoggedOperation>& log);

  // Replays this session's own log on its own data.
  Session ReplayLog() const;

 private:
  Session() = default;

  Operation Resolve(const Operation& op) const;
  std::string Describe(const Operation& op) const;
  void Record(const Operation& op, std::string description);

  std::shared_ptr<const data::Dataset> train_;
  std::shared_ptr<const data::Dataset> test_;
  data::FeatureGrouping grouping_;
  boosting::FitParams params_;
  boosting::ConstraintSet constraints_;
  boosting::Ensemble model_;
  std::vector<HistoryRecord> history_;
  std::vector<LoggedOperation> log_;
};

}  // namespace tbt::session

#endif  // TBT_SESSION_SESSION_HPP_
