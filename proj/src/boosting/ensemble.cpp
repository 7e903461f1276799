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

#include "tbt/boosting/ensemble.hpp"

#include <cmath>

#include "tbt/boosting/loss.hpp"
#include "tbt/error.hpp"

namespace tbt::boosting {

void ValidateParams(const FitParams& params) {
  auto reject = [](const char* field, const nlohmann::json& value) {
    throw BadRequest(std::string("invalid parameter: ") + field,
                     {{"argument", field}, {"value", value}});
  };
  if (params.num_trees < 0) reject("num_trees", params.num_trees);
  if (params.max_depth < 1) reject("max_depth", params.max_depth);
  if (!(params.shrinkage > 0.0 && params.shrinkage <= 1.0)) {
    reject("eta", params.shrinkage);
  }
  if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) {
    reject("lambda", params.lambda);
  }
  if (params.min_leaf < 1) reject("min_leaf", params.min_leaf);
  if (!std::isfinite(params.min_gain)) reject("min_gain", params.min_gain);
  if (params.max_trees < params.num_trees) reject("max_trees", params.max_trees);
}

bool ConstraintSet::IsForbidden(const std::vector<PathStep>& prefix,
                                const SplitRule& rule) const {
  if (forbidden_paths.empty()) return false;
  return forbidden_paths.contains(PathSignature{prefix, rule});
}

ConstraintSet ConstraintSet::FromParams(const FitParams& params) {
  ConstraintSet constraints;
  constraints.max_trees = params.max_trees;
  constraints.max_depth = params.max_depth;
  return constraints;
}

double Ensemble::Score(std::span<const double> sample) const {
  double score = base_score;
  for (size_t m = 0; m < trees.size(); ++m) {
    score += TreeWeight(m) * trees[m].Predict(sample);
  }
  return score;
}

double Ensemble::ScoreRow(const data::Dataset& dataset, size_t row) const {
  double score = base_score;
  for (size_t m = 0; m < trees.size(); ++m) {
    score += TreeWeight(m) * trees[m].PredictRow(dataset, row);
  }
  return score;
}

std::vector<double> Ensemble::ScoresUpTo(const data::Dataset& dataset,
                                         size_t num_trees) const {
  std::vector<double> scores(dataset.num_samples(), base_score);
  for (size_t m = 0; m < num_trees && m < trees.size(); ++m) {
    const double weight = TreeWeight(m);
    for (size_t i = 0; i < scores.size(); ++i) {
      scores[i] += weight * trees[m].PredictRow(dataset, i);
    }
  }
  return scores;
}

Prediction Predict(const Ensemble& ensemble, std::span<const double> sample) {
  const double score = ensemble.Score(sample);
  return {score, score >= 0.0 ? 1 : 0};
}

double Deviance(const data::Dataset& dataset, std::span<const double> scores) {
  double total = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    total += LogisticLoss(dataset.label(i), scores[i]);
  }
  return total;
}

double ErrorRate(const data::Dataset& dataset, std::span<const double> scores) {
  size_t wrong = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if ((scores[i] >= 0.0 ? 1 : 0) != dataset.label(i)) ++wrong;
  }
  return scores.empty() ? 0.0
                        : static_cast<double>(wrong) /
                              static_cast<double>(scores.size());
}

}  // namespace tbt::boosting
