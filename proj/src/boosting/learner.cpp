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

#include "tbt/boosting/learner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "tbt/error.hpp"

namespace tbt::boosting {
namespace {

struct ScoredCandidate {
  SplitRule rule;
  double approx_gain;
};

double Midpoint(double lo, double hi) {
  double mid = 0.5 * (lo + hi);
  if (!std::isfinite(mid)) mid = 0.5 * lo + 0.5 * hi;
  // Adjacent doubles: make sure `lo` still goes left and `hi` right.
  if (!(mid > lo)) mid = hi;
  return mid;
}

// Child sums accumulated in sample order.
struct ChildSums {
  double grad_left = 0.0, hess_left = 0.0;
  double grad_right = 0.0, hess_right = 0.0;
};

ChildSums SumChildren(std::span<const size_t> samples, const SplitRule& rule,
                      const GradientTable& gradients,
                      const data::Dataset& dataset) {
  ChildSums sums;
  const auto column = dataset.column(rule.feature);
  for (const size_t row : samples) {
    if (rule.GoesLeft(column[row])) {
      sums.grad_left += gradients.grad[row];
      sums.hess_left += gradients.hess[row];
    } else {
      sums.grad_right += gradients.grad[row];
      sums.hess_right += gradients.hess[row];
    }
  }
  return sums;
}

// Scans one numeric feature with prefix sums over the value order.
void ScanNumeric(int feature, std::span<const size_t> samples,
                 const GradientTable& gradients, const data::Dataset& dataset,
                 const ConstraintSet& constraints,
                 const std::vector<PathStep>& prefix,
                 const SplitOptions& options, double grad_total,
                 double hess_total, std::vector<ScoredCandidate>* out) {
  const auto column = dataset.column(feature);
  std::vector<size_t> order(samples.begin(), samples.end());
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return column[a] < column[b];
  });
  const auto n = static_cast<int64_t>(order.size());
  double grad_left = 0.0;
  double hess_left = 0.0;
  for (int64_t i = 0; i + 1 < n; ++i) {
    grad_left += gradients.grad[order[i]];
    hess_left += gradients.hess[order[i]];
    const double lo = column[order[i]];
    const double hi = column[order[i + 1]];
    if (lo == hi) continue;
    const int64_t n_left = i + 1;
    if (n_left < options.min_leaf || n - n_left < options.min_leaf) continue;
    const SplitRule rule = SplitRule::Numeric(feature, Midpoint(lo, hi));
    if (constraints.IsForbidden(prefix, rule)) continue;
    out->push_back({rule, SplitGain(grad_left, hess_left,
                                    grad_total - grad_left,
                                    hess_total - hess_left, options.lambda)});
  }
}

void ScanCategorical(int feature, std::span<const size_t> samples,
                     const GradientTable& gradients,
                     const data::Dataset& dataset,
                     const ConstraintSet& constraints,
                     const std::vector<PathStep>& prefix,
                     const SplitOptions& options, double grad_total,
                     double hess_total, std::vector<ScoredCandidate>* out) {
  const auto column = dataset.column(feature);
  const size_t num_categories = dataset.feature(feature).categories.size();
  std::vector<double> grad(num_categories, 0.0);
  std::vector<double> hess(num_categories, 0.0);
  std::vector<int64_t> count(num_categories, 0);
  for (const size_t row : samples) {
    const auto code = static_cast<size_t>(column[row]);
    grad[code] += gradients.grad[row];
    hess[code] += gradients.hess[row];
    ++count[code];
  }
  const auto n = static_cast<int64_t>(samples.size());
  for (size_t code = 0; code < num_categories; ++code) {
    if (count[code] == 0) continue;
    if (count[code] < options.min_leaf || n - count[code] < options.min_leaf) {
      continue;
    }
    const SplitRule rule =
        SplitRule::Categorical(feature, static_cast<int>(code));
    if (constraints.IsForbidden(prefix, rule)) continue;
    out->push_back({rule, SplitGain(grad[code], hess[code],
                                    grad_total - grad[code],
                                    hess_total - hess[code], options.lambda)});
  }
}

struct Pending {
  int id;
  std::vector<size_t> samples;
  int depth;
  std::vector<PathStep> prefix;
};

}  // namespace

GradientTable GradientTable::Compute(const data::Dataset& dataset,
                                     std::span<const double> scores) {
  GradientTable table;
  table.grad.resize(scores.size());
  table.hess.resize(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    const GradHess gh = LogisticGradHess(dataset.label(i), scores[i]);
    table.grad[i] = gh.grad;
    table.hess[i] = gh.hess;
  }
  return table;
}

NodeStats ComputeStats(const data::Dataset& dataset,
                       std::span<const size_t> samples,
                       const GradientTable& gradients) {
  NodeStats stats;
  for (const size_t row : samples) {
    ++stats.n;
    if (dataset.label(row) == 1) {
      ++stats.n_pos;
    } else {
      ++stats.n_neg;
    }
    stats.grad_sum += gradients.grad[row];
    stats.hess_sum += gradients.hess[row];
  }
  return stats;
}

std::optional<SplitCandidate> BestSplit(std::span<const size_t> samples,
                                        const GradientTable& gradients,
                                        const data::Dataset& dataset,
                                        const ConstraintSet& constraints,
                                        const std::vector<PathStep>& prefix,
                                        const SplitOptions& options) {
  if (samples.size() < 2 * static_cast<size_t>(options.min_leaf)) {
    return std::nullopt;
  }
  double grad_total = 0.0;
  double hess_total = 0.0;
  for (const size_t row : samples) {
    grad_total += gradients.grad[row];
    hess_total += gradients.hess[row];
  }

  // Candidates come out ordered by feature id, then threshold or code, which
  // is the tie-breaking order.
  std::vector<ScoredCandidate> candidates;
  for (const data::FeatureMeta& meta : dataset.features()) {
    if (constraints.blocked_features.contains(meta.id)) continue;
    if (meta.kind == data::FeatureKind::kNumeric) {
      ScanNumeric(meta.id, samples, gradients, dataset, constraints, prefix,
                  options, grad_total, hess_total, &candidates);
    } else {
      ScanCategorical(meta.id, samples, gradients, dataset, constraints,
                      prefix, options, grad_total, hess_total, &candidates);
    }
  }
  if (candidates.empty()) return std::nullopt;

  double best_approx = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best_approx = std::max(best_approx, c.approx_gain);

  // Prefix sums and per-sample sums round differently. Re-evaluate every
  // candidate within rounding distance of the best from sample-ordered child
  // sums and decide on those.
  const double parent_term =
      grad_total * grad_total / (hess_total + options.lambda);
  const double window =
      1e-9 * (1.0 + std::abs(best_approx) + std::abs(parent_term));
  std::optional<SplitCandidate> best;
  for (const auto& c : candidates) {
    if (c.approx_gain < best_approx - window) continue;
    const ChildSums sums = SumChildren(samples, c.rule, gradients, dataset);
    const double gain = SplitGain(sums.grad_left, sums.hess_left,
                                  sums.grad_right, sums.hess_right,
                                  options.lambda);
    if (!best || gain > best->gain) best = SplitCandidate{c.rule, gain};
  }
  if (!best || !(best->gain > options.min_gain)) return std::nullopt;
  return best;
}

Tree LearnTree(const data::Dataset& dataset, std::span<const double> scores,
               const ConstraintSet& constraints, int depth_limit,
               const SplitOptions& options) {
  if (depth_limit < 1) throw BadRequest("depth limit must be at least 1");
  const GradientTable gradients = GradientTable::Compute(dataset, scores);

  Tree tree;
  tree.nodes.push_back(TreeNode{});
  std::deque<Pending> queue;
  {
    std::vector<size_t> all(dataset.num_samples());
    std::iota(all.begin(), all.end(), size_t{0});
    queue.push_back({0, std::move(all), 0, {}});
  }
  while (!queue.empty()) {
    Pending pending = std::move(queue.front());
    queue.pop_front();
    const NodeStats stats = ComputeStats(dataset, pending.samples, gradients);
    tree.nodes[pending.id].stats = stats;

    std::optional<SplitCandidate> split;
    if (pending.depth < depth_limit) {
      split = BestSplit(pending.samples, gradients, dataset, constraints,
                        pending.prefix, options);
    }
    if (!split) {
      tree.nodes[pending.id].value =
          LeafValue(stats.grad_sum, stats.hess_sum, options.lambda);
      continue;
    }

    const auto left_id = static_cast<int>(tree.nodes.size());
    const int right_id = left_id + 1;
    TreeNode& node = tree.nodes[pending.id];
    node.is_leaf = false;
    node.rule = split->rule;
    node.left = left_id;
    node.right = right_id;

    std::vector<size_t> left_rows;
    std::vector<size_t> right_rows;
    const auto column = dataset.column(split->rule.feature);
    for (const size_t row : pending.samples) {
      (split->rule.GoesLeft(column[row]) ? left_rows : right_rows)
          .push_back(row);
    }
    TreeNode left;
    left.id = left_id;
    TreeNode right;
    right.id = right_id;
    tree.nodes.push_back(left);
    tree.nodes.push_back(right);

    std::vector<PathStep> left_prefix = pending.prefix;
    left_prefix.push_back({split->rule, Direction::kLeft});
    std::vector<PathStep> right_prefix = std::move(pending.prefix);
    right_prefix.push_back({split->rule, Direction::kRight});
    queue.push_back({left_id, std::move(left_rows), pending.depth + 1,
                     std::move(left_prefix)});
    queue.push_back({right_id, std::move(right_rows), pending.depth + 1,
                     std::move(right_prefix)});
  }
  return tree;
}

void RefitTree(Tree& tree, const data::Dataset& dataset,
               std::span<const double> scores, double lambda) {
  const GradientTable gradients = GradientTable::Compute(dataset, scores);
  const auto samples = tree.NodeSamples(dataset);
  for (TreeNode& node : tree.nodes) {
    node.stats = ComputeStats(dataset, samples[node.id], gradients);
    node.value = node.is_leaf ? LeafValue(node.stats.grad_sum,
                                          node.stats.hess_sum, lambda)
                              : 0.0;
  }
}

bool ExpandLeaf(Tree& tree, int leaf, const data::Dataset& dataset,
                std::span<const double> scores,
                const ConstraintSet& constraints, const SplitOptions& options) {
  if (leaf < 0 || static_cast<size_t>(leaf) >= tree.nodes.size()) {
    throw NotFound("unknown node", {{"node", leaf}});
  }
  if (!tree.nodes[leaf].is_leaf) {
    throw BadRequest("only a leaf can be expanded", {{"node", leaf}});
  }
  const GradientTable gradients = GradientTable::Compute(dataset, scores);
  const auto samples = tree.NodeSamples(dataset);
  const PathSignature signature = tree.Signature(leaf);
  const auto split = BestSplit(samples[leaf], gradients, dataset, constraints,
                               signature.prefix, options);
  if (!split) return false;

  const auto left_id = static_cast<int>(tree.nodes.size());
  TreeNode& node = tree.nodes[leaf];
  node.is_leaf = false;
  node.rule = split->rule;
  node.left = left_id;
  node.right = left_id + 1;
  node.value = 0.0;
  TreeNode left;
  left.id = left_id;
  TreeNode right;
  right.id = left_id + 1;
  tree.nodes.push_back(left);
  tree.nodes.push_back(right);
  tree.Compact();
  RefitTree(tree, dataset, scores, options.lambda);
  return true;
}

double LineSearchGamma(const Tree& tree, const data::Dataset& dataset,
                       std::span<const double> scores) {
  const size_t n = dataset.num_samples();
  std::vector<double> outputs(n);
  bool all_zero = true;
  for (size_t i = 0; i < n; ++i) {
    outputs[i] = tree.PredictRow(dataset, i);
    all_zero = all_zero && outputs[i] == 0.0;
  }
  if (all_zero) return 1.0;

  auto loss = [&](double gamma) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      total += LogisticLoss(dataset.label(i), scores[i] + gamma * outputs[i]);
    }
    return total;
  };

  constexpr double kLower = 0.0;
  constexpr double kUpper = 2.0;
  constexpr double kTolerance = 1e-4;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = kLower;
  double b = kUpper;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = loss(c);
  double fd = loss(d);
  while (b - a > kTolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = loss(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = loss(d);
    }
  }
  const double bracketed = 0.5 * (a + b);

  // Newton polish: the loss is smooth and convex in gamma.
  double gamma = bracketed;
  for (int iter = 0; iter < 50; ++iter) {
    double first = 0.0;
    double second = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (outputs[i] == 0.0) continue;
      const double p = Sigmoid(scores[i] + gamma * outputs[i]);
      first += (p - dataset.label(i)) * outputs[i];
      second += p * (1.0 - p) * outputs[i] * outputs[i];
    }
    if (!(second > 0.0)) break;
    const double next = std::clamp(gamma - first / second, kLower, kUpper);
    const bool converged = std::abs(next - gamma) <= 1e-15;
    gamma = next;
    if (converged) break;
  }
  double best = loss(gamma) <= loss(bracketed) ? gamma : bracketed;
  // Boundary minimizers are outside the golden-section bracket's interior.
  for (const double edge : {kLower, kUpper}) {
    if (loss(edge) < loss(best)) best = edge;
  }
  return best;
}

double PriorLogOdds(const data::Dataset& dataset) {
  size_t n_pos = 0;
  for (const uint8_t y : dataset.labels()) n_pos += y;
  const size_t n_neg = dataset.num_samples() - n_pos;
  constexpr double kClamp = 15.0;
  if (n_pos == 0) return -kClamp;
  if (n_neg == 0) return kClamp;
  return std::clamp(std::log(static_cast<double>(n_pos) /
                             static_cast<double>(n_neg)),
                    -kClamp, kClamp);
}

void AppendStage(Ensemble& ensemble, const data::Dataset& dataset,
                 std::vector<double>& scores, const ConstraintSet& constraints,
                 const FitParams& params) {
  Tree tree = LearnTree(dataset, scores, constraints, params.max_depth,
                        SplitOptions::From(params));
  const double gamma = LineSearchGamma(tree, dataset, scores);
  const double weight = gamma * ensemble.shrinkage;
  for (size_t i = 0; i < scores.size(); ++i) {
    scores[i] += weight * tree.PredictRow(dataset, i);
  }
  ensemble.trees.push_back(std::move(tree));
  ensemble.gammas.push_back(gamma);
}

Ensemble FitEnsemble(const data::Dataset& dataset, const FitParams& params,
                     const ConstraintSet& constraints,
                     const StageCallback& on_stage) {
  ValidateParams(params);
  Ensemble ensemble;
  ensemble.base_score = PriorLogOdds(dataset);
  ensemble.shrinkage = params.shrinkage;
  ensemble.lambda = params.lambda;

  std::vector<double> scores(dataset.num_samples(), ensemble.base_score);
  double deviance = Deviance(dataset, scores);
  if (on_stage) on_stage(0, ensemble, scores);
  for (int m = 1; m <= params.num_trees; ++m) {
    AppendStage(ensemble, dataset, scores, constraints, params);
    const double next = Deviance(dataset, scores);
    if (next > deviance + kDevianceTolerance) {
      throw FitError("training deviance increased at stage " +
                     std::to_string(m));
    }
    deviance = next;
    if (on_stage) on_stage(m, ensemble, scores);
  }
  return ensemble;
}

}  // namespace tbt::boosting
