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

#ifndef TBT_BOOSTING_LEARNER_HPP_
#define TBT_BOOSTING_LEARNER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tbt/boosting/ensemble.hpp"
#include "tbt/boosting/loss.hpp"
#include "tbt/boosting/split_rule.hpp"
#include "tbt/boosting/tree.hpp"
#include "tbt/data/dataset.hpp"

namespace tbt::boosting {

struct SplitOptions {
  double lambda = 1.0;
  int min_leaf = 1;
  double min_gain = 1e-6;

  static SplitOptions From(const FitParams& params) {
    return {params.lambda, params.min_leaf, params.min_gain};
  }
};

struct SplitCandidate {
  SplitRule rule;
  double gain = 0.0;
};

// Per-row gradient statistics of the logistic loss at the given scores.
struct GradientTable {
  std::vector<double> grad;
  std::vector<double> hess;

  static GradientTable Compute(const data::Dataset& dataset,
                               std::span<const double> scores);
};

NodeStats ComputeStats(const data::Dataset& dataset,
                       std::span<const size_t> samples,
                       const GradientTable& gradients);

// Exact greedy search over every unblocked feature: midpoints between
// consecutive distinct values for numeric features, one equality rule per
// observed category for categorical ones. Candidates in `constraints`'
// forbidden paths under `prefix`, or leaving fewer than min_leaf samples on
// a side, are skipped. Returns the maximal-gain rule if its gain exceeds
// min_gain. Ties go to the lower feature id, then the lower threshold or
// category code.
//
// `samples` must be ascending. The reported gain is evaluated from child
// sums accumulated in that order, so it does not depend on the sort order
// used while scanning thresholds.
std::optional<SplitCandidate> BestSplit(std::span<const size_t> samples,
                                        const GradientTable& gradients,
                                        const data::Dataset& dataset,
                                        const ConstraintSet& constraints,
                                        const std::vector<PathStep>& prefix,
                                        const SplitOptions& options);

// Grows one tree breadth-first against the current per-row scores. Nodes at
// depth < depth_limit are split while BestSplit finds a qualifying rule;
// every leaf gets the Newton value of its samples.
Tree LearnTree(const data::Dataset& dataset, std::span<const double> scores,
               const ConstraintSet& constraints, int depth_limit,
               const SplitOptions& options);

// Recomputes every node's statistics and every leaf's Newton value for the
// given scores, keeping the tree's structure.
void RefitTree(Tree& tree, const data::Dataset& dataset,
               std::span<const double> scores, double lambda);

// Splits leaf `leaf` with the best qualifying rule at the current scores and
// refits the tree. Returns false, leaving the tree untouched, when no rule
// qualifies. Node ids are renumbered breadth-first on success.
bool ExpandLeaf(Tree& tree, int leaf, const data::Dataset& dataset,
                std::span<const double> scores,
                const ConstraintSet& constraints, const SplitOptions& options);

// Scale for the tree's output minimizing the training loss over [0, 2].
// Golden-section search to a 1e-4 bracket, then Newton polishing on the
// (convex) one-dimensional loss. Returns 1.0 when every output is zero.
double LineSearchGamma(const Tree& tree, const data::Dataset& dataset,
                       std::span<const double> scores);

// log(n_pos / n_neg) clamped to [-15, 15].
double PriorLogOdds(const data::Dataset& dataset);

// Called after each stage (stage 0 is the prior-only model) with the model so
// far and its training scores.
using StageCallback = std::function<void(
    int stage, const Ensemble& ensemble, std::span<const double> scores)>;

// Forward stagewise fitting of params.num_trees trees. Throws FitError if the
// training deviance ever increases by more than 1e-9.
Ensemble FitEnsemble(const data::Dataset& dataset, const FitParams& params,
                     const ConstraintSet& constraints,
                     const StageCallback& on_stage = nullptr);

// Appends one tree fitted to `scores` (the current ensemble's training
// scores), updating `scores` in place.
void AppendStage(Ensemble& ensemble, const data::Dataset& dataset,
                 std::vector<double>& scores, const ConstraintSet& constraints,
                 const FitParams& params);

inline constexpr double kDevianceTolerance = 1e-9;

}  // namespace tbt::boosting

#endif  // TBT_BOOSTING_LEARNER_HPP_
