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

#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"
#include "tbt/boosting/learner.hpp"
#include "tbt/boosting/loss.hpp"
#include "tbt/boosting/model_json.hpp"
#include "tbt/canonical_json.hpp"
#include "tbt/error.hpp"

namespace tbt::boosting {
namespace {

using data::Dataset;
using data::FeatureKind;
using data::FeatureMeta;
using data::SplitMix64;
using testing::UniformInt;
using testing::UniformReal;

std::vector<size_t> AllRows(const Dataset& d) {
  std::vector<size_t> rows(d.num_samples());
  std::iota(rows.begin(), rows.end(), size_t{0});
  return rows;
}

Dataset NumericDataset(std::vector<double> values, std::vector<uint8_t> labels) {
  return Dataset::Create({{0, "x", FeatureKind::kNumeric, "all", true, {}}},
                         {std::move(values)}, std::move(labels), {"0", "1"});
}

// Loss of the 3-sample leaf {(1, 0), (1, 0), (0, 0)} shifted by v.
double ThreeSampleLoss(double v) {
  return 2 * testing::NaiveLogLoss(1, v) + testing::NaiveLogLoss(0, v);
}

double GridArgmin(double lo, double hi, double step,
                  const std::function<double(double)>& f) {
  double best_x = lo;
  double best = f(lo);
  const auto steps = static_cast<int64_t>(std::llround((hi - lo) / step));
  for (int64_t i = 1; i <= steps; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    if (const double v = f(x); v < best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

TEST(LossTest, GradHessAtZero) {
  EXPECT_EQ(LogisticGradHess(1, 0.0).grad, -0.5);
  EXPECT_EQ(LogisticGradHess(1, 0.0).hess, 0.25);
  EXPECT_EQ(LogisticGradHess(0, 0.0).grad, 0.5);
  EXPECT_EQ(LogisticGradHess(0, 0.0).hess, 0.25);
}

TEST(LossTest, GradHessMatchFiniteDifferences) {
  const auto fd = testing::FiniteDifferenceGradHess(1, 2.0, 1e-5);
  EXPECT_NEAR(LogisticGradHess(1, 2.0).grad, fd[0], 1e-6);
  EXPECT_NEAR(LogisticGradHess(1, 2.0).hess, fd[1], 1e-6);
  SplitMix64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const int y = static_cast<int>(rng() % 2);
    const double f = UniformReal(rng, -8.0, 8.0);
    const auto expected = testing::FiniteDifferenceGradHess(y, f, 1e-5);
    const GradHess gh = LogisticGradHess(y, f);
    ASSERT_NEAR(gh.grad, expected[0], 1e-6) << y << " " << f;
    ASSERT_NEAR(gh.hess, expected[1], 1e-6) << y << " " << f;
  }
}

TEST(LossTest, StableAtExtremeScores) {
  EXPECT_TRUE(std::isfinite(LogisticLoss(1, -800.0)));
  EXPECT_NEAR(LogisticLoss(1, -800.0), 800.0, 1e-9);
  EXPECT_EQ(Sigmoid(-800.0), 0.0);
  EXPECT_EQ(LogisticGradHess(1, 800.0).hess, kMinHessian);
  EXPECT_NEAR(LogisticLoss(0, 1.5), testing::NaiveLogLoss(0, 1.5), 1e-15);
}

TEST(LeafValueTest, Examples) {
  EXPECT_EQ(LeafValue(0.0, 1.0, 0.0), 0.0);
  EXPECT_EQ(LeafValue(-2.0, 4.0, 0.0), 0.5);
  EXPECT_THROW(LeafValue(1.0, 0.0, 0.0), FitError);
}

// One Newton step from 0 on {(1,0),(1,0),(0,0)} lands at 2/3 while the exact
// minimizer of the summed loss is ln 2; the step is short of it, as Newton
// steps on the logistic loss are from a start with smaller curvature.
TEST(LeafValueTest, ThreeSampleLeafAgainstGridSearch) {
  const double g = -0.5 - 0.5 + 0.5;
  const double h = 0.75;
  const double v = LeafValue(g, h, 0.0);
  EXPECT_DOUBLE_EQ(v, 2.0 / 3.0);
  const double argmin = GridArgmin(-4.0, 4.0, 1e-4, ThreeSampleLoss);
  EXPECT_NEAR(argmin, std::log(2.0), 1e-4);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, argmin);
}

TEST(SplitGainTest, Examples) {
  EXPECT_EQ(SplitGain(0, 1, 0, 1, 0.1), 0.0);
  EXPECT_EQ(SplitGain(-1, 1, 1, 1, 0), 1.0);
}

// Gain equals the drop in the quadratic objective G v + (H + lambda) v^2 / 2
// when one Newton leaf is replaced by two.
TEST(SplitGainTest, MatchesQuadraticObjectiveReduction) {
  SplitMix64 rng(11);
  auto objective = [](double g, double h, double lambda) {
    const double v = -g / (h + lambda);
    return g * v + 0.5 * (h + lambda) * v * v;
  };
  for (int i = 0; i < 1000; ++i) {
    const double gl = UniformReal(rng, -3, 3), hl = UniformReal(rng, 0, 3);
    const double gr = UniformReal(rng, -3, 3), hr = UniformReal(rng, 0, 3);
    const double lambda = UniformReal(rng, 0.1, 2.0);
    const double reduction = objective(gl + gr, hl + hr, lambda) -
                             objective(gl, hl, lambda) -
                             objective(gr, hr, lambda);
    ASSERT_NEAR(SplitGain(gl, hl, gr, hr, lambda), reduction, 1e-12);
  }
}

TEST(BestSplitTest, MidpointOnSeparableLine) {
  const Dataset d = NumericDataset({1, 2, 3, 4, 5, 6, 7, 8},
                                   {0, 0, 0, 0, 1, 1, 1, 1});
  const std::vector<double> scores(8, 0.0);
  const auto gradients = GradientTable::Compute(d, scores);
  const auto rows = AllRows(d);
  const auto split = BestSplit(rows, gradients, d, ConstraintSet(), {},
                               SplitOptions());
  ASSERT_TRUE(split.has_value());
  EXPECT_EQ(split->rule, SplitRule::Numeric(0, 4.5));
  Tree tree = LearnTree(d, scores, ConstraintSet(), 1, SplitOptions());
  EXPECT_EQ(tree.node(tree.node(0).left).stats.n, 4);
  EXPECT_EQ(tree.node(tree.node(0).right).stats.n, 4);
}

TEST(BestSplitTest, PureNodeHasNoSplit) {
  const Dataset d = NumericDataset({1, 2, 3, 4}, {1, 1, 1, 1});
  const std::vector<double> scores(4, PriorLogOdds(d));
  const auto rows = AllRows(d);
  EXPECT_FALSE(BestSplit(rows, GradientTable::Compute(d, scores), d,
                         ConstraintSet(), {}, SplitOptions())
                   .has_value());
}

TEST(BestSplitTest, BlockedFeatureIsNeverChosen) {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const Dataset d = testing::RandomDataset(rng, 2, 12, 4);
    std::vector<double> scores(d.num_samples());
    for (double& s : scores) s = UniformReal(rng, -1, 1);
    ConstraintSet constraints;
    const int blocked = static_cast<int>(
        UniformInt(rng, 0, static_cast<int64_t>(d.num_features()) - 1));
    constraints.blocked_features.insert(blocked);
    SplitOptions options;
    options.min_gain = -1.0;
    const auto rows = AllRows(d);
    const auto split = BestSplit(rows, GradientTable::Compute(d, scores), d,
                                 constraints, {}, options);
    if (split) {
      ASSERT_NE(split->rule.feature, blocked);
    }
  }
}

TEST(BestSplitTest, ForbiddenRuleIsSkipped) {
  const Dataset d = NumericDataset({1, 2, 3, 4, 5, 6, 7, 8},
                                   {0, 0, 0, 0, 1, 1, 1, 1});
  const std::vector<double> scores(8, 0.0);
  ConstraintSet constraints;
  constraints.forbidden_paths.insert({{}, SplitRule::Numeric(0, 4.5)});
  const auto rows = AllRows(d);
  const auto split = BestSplit(rows, GradientTable::Compute(d, scores), d,
                               constraints, {}, SplitOptions());
  ASSERT_TRUE(split.has_value());
  EXPECT_NE(split->rule, SplitRule::Numeric(0, 4.5));
}

// Exhaustive enumeration over random small fixtures, including subsets of
// rows, min_leaf > 1, and a negative min_gain that admits zero-gain ties.
TEST(BestSplitTest, AgreesWithExhaustiveOracle) {
  SplitMix64 rng(20260);
  for (int trial = 0; trial < 2000; ++trial) {
    const Dataset d = testing::RandomDataset(rng, 2, 12, 4);
    std::vector<double> scores(d.num_samples());
    for (double& s : scores) {
      s = rng() % 3 == 0 ? 0.0 : UniformReal(rng, -2, 2);
    }
    std::vector<size_t> rows;
    for (size_t i = 0; i < d.num_samples(); ++i) {
      if (rng() % 4 != 0) rows.push_back(i);
    }
    SplitOptions options;
    options.lambda = rng() % 2 ? 1.0 : UniformReal(rng, 0.0, 2.0);
    options.min_leaf = static_cast<int>(UniformInt(rng, 1, 2));
    options.min_gain = rng() % 2 ? 1e-6 : -1e-9;
    if (rows.size() < 2 * static_cast<size_t>(options.min_leaf)) continue;
    const auto gradients = GradientTable::Compute(d, scores);
    const auto expected = testing::ExhaustiveBestSplit(
        d, rows, gradients.grad, gradients.hess, options.lambda,
        options.min_leaf, options.min_gain);
    const auto actual =
        BestSplit(rows, gradients, d, ConstraintSet(), {}, options);
    ASSERT_EQ(actual.has_value(), expected.has_value()) << "trial " << trial;
    if (!actual) continue;
    ASSERT_EQ(actual->gain, expected->gain) << "trial " << trial;
    ASSERT_EQ(actual->rule, expected->rule) << "trial " << trial;
  }
}

TEST(LearnTreeTest, XorNeedsDepthTwo) {
  const Dataset d = testing::Xor();
  const auto options = SplitOptions::From(testing::XorParams(1, 2));
  const std::vector<double> prior(4, PriorLogOdds(d));
  const Tree deep = LearnTree(d, prior, ConstraintSet(), 2, options);
  EXPECT_EQ(deep.MaxDepth(), 2);
  int leaves = 0;
  for (const auto& node : deep.nodes) {
    if (!node.is_leaf) continue;
    ++leaves;
    EXPECT_TRUE(node.stats.n_pos == 0 || node.stats.n_neg == 0);
  }
  EXPECT_EQ(leaves, 4);
  std::vector<double> scores(4);
  for (size_t i = 0; i < 4; ++i) scores[i] = deep.PredictRow(d, i);
  EXPECT_EQ(ErrorRate(d, scores), 0.0);

  const Tree shallow = LearnTree(d, prior, ConstraintSet(), 1, options);
  EXPECT_EQ(shallow.size(), 3u);
  for (size_t i = 0; i < 4; ++i) scores[i] = shallow.PredictRow(d, i);
  EXPECT_EQ(ErrorRate(d, scores), 0.5);
}

TEST(LearnTreeTest, ZeroGainRootIsNotSplitByDefault) {
  const Dataset d = testing::Xor();
  const std::vector<double> prior(4, PriorLogOdds(d));
  EXPECT_TRUE(LearnTree(d, prior, ConstraintSet(), 2, SplitOptions())
                  .IsSingleLeaf());
}

TEST(LearnTreeTest, PureDataGivesSingleNewtonLeaf) {
  const Dataset d = NumericDataset({1, 2, 3}, {1, 1, 1});
  const std::vector<double> scores(3, 0.0);
  const Tree tree = LearnTree(d, scores, ConstraintSet(), 3, SplitOptions());
  ASSERT_TRUE(tree.IsSingleLeaf());
  EXPECT_EQ(tree.node(0).value, LeafValue(-1.5, 0.75, 1.0));
  EXPECT_GT(tree.node(0).value, 0.0);
}

TEST(LearnTreeTest, StatsAndRoutingInvariants) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Dataset d = testing::RandomDataset(rng, 5, 40, 4);
    std::vector<double> scores(d.num_samples(), PriorLogOdds(d));
    SplitOptions options;
    options.min_leaf = static_cast<int>(UniformInt(rng, 1, 3));
    const Tree tree = LearnTree(d, scores, ConstraintSet(),
                                static_cast<int>(UniformInt(rng, 1, 4)), options);
    tree.CheckStructure();
    const auto counts = testing::RoutedCounts(tree, d);
    for (const auto& node : tree.nodes) {
      ASSERT_EQ(node.stats.n_pos + node.stats.n_neg, node.stats.n);
      ASSERT_EQ(node.stats.n_pos, counts[node.id].n_pos);
      ASSERT_EQ(node.stats.n_neg, counts[node.id].n_neg);
      ASSERT_TRUE(std::isfinite(node.value));
      if (!node.is_leaf) {
        ASSERT_EQ(tree.node(node.left).stats.n + tree.node(node.right).stats.n,
                  node.stats.n);
        ASSERT_GE(tree.node(node.left).stats.n, options.min_leaf);
      }
    }
    for (size_t row = 0; row < d.num_samples(); ++row) {
      ASSERT_EQ(tree.RouteRow(d, row), testing::WalkToLeaf(tree, d, row));
    }
  }
}

TEST(LineSearchTest, ZeroTreeReturnsOne) {
  const Dataset d = NumericDataset({1, 2}, {0, 1});
  const Tree tree = Tree::SingleLeaf(0.0, NodeStats{});
  const std::vector<double> scores = {0.3, -0.2};
  EXPECT_EQ(LineSearchGamma(tree, d, scores), 1.0);
}

TEST(LineSearchTest, ThreeSampleLeafReachesGridOptimum) {
  const Dataset d = NumericDataset({0, 0, 0}, {1, 1, 0});
  const std::vector<double> scores(3, 0.0);
  const Tree tree = LearnTree(d, scores, ConstraintSet(), 1,
                              {0.0, 1, 1e-6});
  ASSERT_TRUE(tree.IsSingleLeaf());
  const double gamma = LineSearchGamma(tree, d, scores);
  const double argmin = GridArgmin(-4.0, 4.0, 1e-4, ThreeSampleLoss);
  EXPECT_NEAR(gamma * tree.node(0).value, argmin, 1e-3);
}

TEST(LineSearchTest, LocalOptimalityWitness) {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Dataset d = testing::RandomDataset(rng, 4, 30, 3);
    std::vector<double> scores(d.num_samples());
    for (double& s : scores) s = UniformReal(rng, -2, 2);
    const Tree tree = LearnTree(d, scores, ConstraintSet(), 2, SplitOptions());
    const double gamma = LineSearchGamma(tree, d, scores);
    ASSERT_GE(gamma, 0.0);
    ASSERT_LE(gamma, 2.0);
    auto loss = [&](double g) {
      double total = 0.0;
      for (size_t i = 0; i < d.num_samples(); ++i) {
        total += LogisticLoss(d.label(i), scores[i] + g * tree.PredictRow(d, i));
      }
      return total;
    };
    const double at_gamma = loss(gamma);
    for (double g : {0.0, 0.5, 1.0, 1.5, 2.0}) {
      const double other = loss(g);
      ASSERT_LE(at_gamma, other + 1e-12 * (1.0 + std::abs(other)))
          << "trial " << trial << " gamma " << gamma << " vs " << g;
    }
  }
}

TEST(FitEnsembleTest, PriorOnlyModel) {
  const auto& split = testing::MushroomSplit();
  FitParams params;
  params.num_trees = 0;
  const Ensemble e = FitEnsemble(split.train, params, ConstraintSet());
  EXPECT_TRUE(e.trees.empty());
  const auto positives = std::count(split.train.labels().begin(),
                                    split.train.labels().end(), uint8_t{1});
  const auto n = static_cast<double>(split.train.num_samples());
  EXPECT_DOUBLE_EQ(e.base_score,
                   std::log(static_cast<double>(positives) /
                            (n - static_cast<double>(positives))));
  const double minority =
      std::min<double>(static_cast<double>(positives), n - positives) / n;
  EXPECT_DOUBLE_EQ(ErrorRate(split.train, e.Scores(split.train)), minority);

  const Dataset balanced = NumericDataset({1, 2, 3, 4}, {0, 1, 0, 1});
  const Ensemble flat = FitEnsemble(balanced, params, ConstraintSet());
  EXPECT_EQ(flat.base_score, 0.0);
  EXPECT_EQ(ErrorRate(balanced, flat.Scores(balanced)), 0.5);
  EXPECT_EQ(Predict(flat, std::vector<double>{1.0}).label, 1);
}

TEST(FitEnsembleTest, PureDataClampsBaseScore) {
  const Dataset d = NumericDataset({1, 2}, {1, 1});
  EXPECT_EQ(PriorLogOdds(d), 15.0);
}

TEST(FitEnsembleTest, ScoresMatchTreeWalkingOracle) {
  const auto& split = testing::MushroomSplit();
  FitParams params;
  params.num_trees = 4;
  const Ensemble e = FitEnsemble(split.train, params, ConstraintSet());
  const auto scores = e.Scores(split.test);
  for (size_t row = 0; row < split.test.num_samples(); ++row) {
    ASSERT_EQ(scores[row], testing::WalkScore(e, split.test, row));
    ASSERT_EQ(e.ScoreRow(split.test, row), scores[row]);
  }
  EXPECT_EQ(ErrorRate(split.test, scores),
            testing::ConfusionError(e, split.test));
}

TEST(FitEnsembleTest, DeterministicAndRoundTrips) {
  const auto& split = testing::MushroomSplit();
  FitParams params;
  params.num_trees = 3;
  const std::string a =
      SerializeEnsemble(FitEnsemble(split.train, params, ConstraintSet()));
  const std::string b =
      SerializeEnsemble(FitEnsemble(split.train, params, ConstraintSet()));
  EXPECT_EQ(a, b);
  const Ensemble back = EnsembleFromJson(nlohmann::json::parse(a));
  EXPECT_EQ(SerializeEnsemble(back), a);
}

TEST(FitEnsembleTest, BlockedFeaturesNeverUsed) {
  const auto& split = testing::MushroomSplit();
  FitParams params;
  params.num_trees = 5;
  ConstraintSet constraints = ConstraintSet::FromParams(params);
  constraints.blocked_features = {4, 8, 19};
  const Ensemble e = FitEnsemble(split.train, params, constraints);
  EXPECT_TRUE(testing::ScanConstraintViolations(e, constraints.blocked_features,
                                                {}, 0)
                  .empty());
}

TEST(FitEnsembleTest, RejectsBadParams) {
  const Dataset d = NumericDataset({1, 2}, {0, 1});
  FitParams params;
  params.max_depth = 0;
  EXPECT_THROW(FitEnsemble(d, params, ConstraintSet()), Error);
  params = FitParams();
  params.shrinkage = 0.0;
  EXPECT_THROW(FitEnsemble(d, params, ConstraintSet()), Error);
}

TEST(TreeTest, SignaturesPruneAndExpand) {
  const Dataset d = testing::Xor();
  const auto params = testing::XorParams(2, 2);
  const Ensemble e = FitEnsemble(d, params, ConstraintSet::FromParams(params));
  ASSERT_EQ(e.trees.size(), 2u);
  const Tree& t0 = e.trees[0];
  const PathSignature root = t0.Signature(0);
  EXPECT_TRUE(root.prefix.empty());
  EXPECT_EQ(*root.terminal, t0.node(0).rule);
  const PathSignature left = t0.Signature(1);
  ASSERT_EQ(left.prefix.size(), 1u);
  EXPECT_EQ(left.prefix[0].direction, Direction::kLeft);
  // Both trees are built identically on the fixture.
  for (size_t id = 0; id < t0.size(); ++id) {
    EXPECT_EQ(e.trees[1].Signature(static_cast<int>(id)),
              t0.Signature(static_cast<int>(id)));
    EXPECT_EQ(t0.FindSignature(t0.Signature(static_cast<int>(id))),
              std::vector<int>{static_cast<int>(id)});
  }
  EXPECT_THROW(t0.Signature(99), Error);

  Tree pruned = t0;
  pruned.Prune(1);
  pruned.CheckStructure();
  EXPECT_EQ(pruned.size(), 5u);
  EXPECT_TRUE(pruned.node(1).is_leaf);

  const std::vector<double> scores(4, 0.0);
  const auto options = SplitOptions::From(params);
  ASSERT_TRUE(ExpandLeaf(pruned, 1, d, scores, ConstraintSet(), options));
  pruned.CheckStructure();
  EXPECT_EQ(pruned.size(), 7u);
  // A pure leaf has nothing left to split.
  Tree full = LearnTree(d, scores, ConstraintSet(), 2, options);
  int leaf = -1;
  for (const auto& node : full.nodes) {
    if (node.is_leaf) leaf = node.id;
  }
  const Tree before = full;
  EXPECT_FALSE(ExpandLeaf(full, leaf, d, scores, ConstraintSet(), options));
  EXPECT_EQ(full, before);
}

TEST(ModelJsonTest, ConstraintsAndParamsRoundTrip) {
  ConstraintSet c;
  c.blocked_features = {1, 3};
  c.forbidden_paths.insert(
      {{{SplitRule::Categorical(0, 1), Direction::kRight}},
       SplitRule::Numeric(2, 0.5)});
  c.forbidden_paths.insert({{}, std::nullopt});
  c.max_trees = 7;
  EXPECT_EQ(ConstraintsFromJson(ConstraintsToJson(c)), c);
  FitParams p;
  p.num_trees = 4;
  p.min_gain = -1e-9;
  EXPECT_EQ(ParamsFromJson(ParamsToJson(p)), p);
  EXPECT_EQ(ParamsFromJson({{"eta", 0.1}}, p).num_trees, 4);
  EXPECT_THROW(ParamsFromJson({{"num_trees", "x"}}), Error);
  EXPECT_THROW(EnsembleFromJson({{"trees", 3}}), Error);
}

}  // namespace
}  // namespace tbt::boosting
