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

#ifndef TBT_BOOSTING_ENSEMBLE_HPP_
#define TBT_BOOSTING_ENSEMBLE_HPP_

#include <set>
#include <span>
#include <vector>

#include "tbt/boosting/split_rule.hpp"
#include "tbt/boosting/tree.hpp"
#include "tbt/data/dataset.hpp"

namespace tbt::boosting {

struct FitParams {
  int num_trees = 10;
  int max_depth = 3;
  double shrinkage = 0.3;  // eta
  double lambda = 1.0;
  int min_leaf = 1;
  // A split must gain strictly more than this.
  double min_gain = 1e-6;
  int max_trees = 1000;

  bool operator==(const FitParams&) const = default;
};

// Throws Error(kBadRequest) naming the first out-of-range field.
void ValidateParams(const FitParams& params);

// Accumulated human feedback that every learning pass must honor.
struct ConstraintSet {
  std::set<int> blocked_features;
  // Each entry forbids creating its terminal rule beneath its prefix.
  std::set<PathSignature> forbidden_paths;
  int max_trees = 1000;
  int max_depth = 3;

  bool IsForbidden(const std::vector<PathStep>& prefix,
                   const SplitRule& rule) const;

  static ConstraintSet FromParams(const FitParams& params);
  bool operator==(const ConstraintSet&) const = default;
};

// F(x) = base_score + sum_m gamma_m * shrinkage * tree_m(x).
struct Ensemble {
  double base_score = 0.0;
  std::vector<Tree> trees;
  std::vector<double> gammas;
  double shrinkage = 0.3;
  double lambda = 1.0;

  // Weight multiplying tree m's leaf values in the score.
  double TreeWeight(size_t m) const { return gammas.at(m) * shrinkage; }

  double Score(std::span<const double> sample) const;
  double ScoreRow(const data::Dataset& dataset, size_t row) const;
  // Scores of every row using the base score and the first `num_trees`
  // trees only.
  std::vector<double> ScoresUpTo(const data::Dataset& dataset,
                                 size_t num_trees) const;
  std::vector<double> Scores(const data::Dataset& dataset) const {
    return ScoresUpTo(dataset, trees.size());
  }

  bool operator==(const Ensemble&) const = default;
};

struct Prediction {
  double score = 0.0;
  int label = 0;
};

// Label 1 iff score >= 0.
Prediction Predict(const Ensemble& ensemble, std::span<const double> sample);

// Summed LogisticLoss over the rows for the given scores.
double Deviance(const data::Dataset& dataset, std::span<const double> scores);

// Fraction of rows whose thresholded score disagrees with the label.
double ErrorRate(const data::Dataset& dataset, std::span<const double> scores);

}  // namespace tbt::boosting

#endif  // TBT_BOOSTING_ENSEMBLE_HPP_
