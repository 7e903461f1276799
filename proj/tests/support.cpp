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

#include "support.hpp"

#include <map>
#include <string>

#include "tbt/boosting/model_json.hpp"

namespace tbt::testing {

std::filesystem::path DataDir() { return TBT_DATA_DIR; }

const data::Dataset& Mushroom() {
  static const data::Dataset dataset =
      data::LoadCsv(DataDir() / "mushroom.csv", data::CsvOptions());
  return dataset;
}

const data::TrainTestSplit& MushroomSplit() {
  static const data::TrainTestSplit split =
      data::SplitTrainTest(Mushroom(), 0.3, 42);
  return split;
}

data::Dataset Xor() {
  data::CsvOptions options;
  options.label_column = std::string("label");
  return data::LoadCsv(DataDir() / "xor.csv", options);
}

boosting::FitParams XorParams(int num_trees, int max_depth) {
  boosting::FitParams params;
  params.num_trees = num_trees;
  params.max_depth = max_depth;
  params.min_gain = -1e-9;
  params.max_trees = 8;
  return params;
}

session::Session XorSession(int num_trees, int max_depth) {
  auto xor_data = std::make_shared<const data::Dataset>(Xor());
  return session::Session::Create(
      xor_data, xor_data,
      data::GroupFeatures(*xor_data, data::GroupingStrategy::kSingleGroup),
      XorParams(num_trees, max_depth));
}

session::Session MushroomSession(const boosting::FitParams& params) {
  const auto& split = MushroomSplit();
  auto train = std::make_shared<const data::Dataset>(split.train);
  auto test = std::make_shared<const data::Dataset>(split.test);
  return session::Session::Create(
      train, test, data::GroupFeatures(*train, data::GroupingStrategy::kByPrefix),
      params);
}

int64_t UniformInt(data::SplitMix64& rng, int64_t lo, int64_t hi) {
  const auto span = static_cast<uint64_t>(hi - lo) + 1;
  return lo + static_cast<int64_t>(rng() % span);
}

double UniformReal(data::SplitMix64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

data::Dataset RandomDataset(data::SplitMix64& rng, size_t min_samples,
                            size_t max_samples, size_t max_features) {
  const auto n = static_cast<size_t>(UniformInt(
      rng, static_cast<int64_t>(min_samples), static_cast<int64_t>(max_samples)));
  const auto f = static_cast<size_t>(
      UniformInt(rng, 1, static_cast<int64_t>(max_features)));
  std::vector<data::FeatureMeta> features;
  std::vector<std::vector<double>> columns;
  for (size_t j = 0; j < f; ++j) {
    data::FeatureMeta meta;
    meta.id = static_cast<int>(j);
    meta.name = "f" + std::to_string(j);
    std::vector<double> column(n);
    if (rng() % 2 == 0) {
      meta.kind = data::FeatureKind::kNumeric;
      for (double& v : column) v = 0.5 * static_cast<double>(UniformInt(rng, -4, 4));
    } else {
      meta.kind = data::FeatureKind::kCategorical;
      const auto k = UniformInt(rng, 1, 4);
      for (int64_t c = 0; c < k; ++c) {
        meta.categories.push_back(std::string(1, static_cast<char>('a' + c)));
      }
      for (double& v : column) v = static_cast<double>(UniformInt(rng, 0, k - 1));
    }
    features.push_back(std::move(meta));
    columns.push_back(std::move(column));
  }
  std::vector<uint8_t> labels(n);
  for (auto& y : labels) y = static_cast<uint8_t>(rng() % 2);
  labels[0] = 0;
  labels[n - 1] = 1;
  return data::Dataset::Create(std::move(features), std::move(columns),
                               std::move(labels), {"neg", "pos"});
}

session::Operation RandomValidOperation(data::SplitMix64& rng,
                                        const session::Session& s) {
  using session::Operation;
  const auto& trees = s.model().trees;
  const auto num_features = static_cast<int>(s.train().num_features());
  for (;;) {
    switch (rng() % 11) {
      case 0:
        return Operation::BlockFeature(
            static_cast<int>(UniformInt(rng, 0, num_features - 1)));
      case 1:
        return Operation::AllowFeature(
            static_cast<int>(UniformInt(rng, 0, num_features - 1)));
      case 2:
      case 3:
        if (trees.size() < static_cast<size_t>(s.constraints().max_trees)) {
          return Operation::GrowTree();
        }
        break;
      case 4:
        if (!trees.empty()) {
          return Operation::RemoveTree(static_cast<int>(
              UniformInt(rng, 0, static_cast<int64_t>(trees.size()) - 1)));
        }
        break;
      case 5:
      case 6: {
        if (trees.empty()) break;
        const auto m = UniformInt(rng, 0, static_cast<int64_t>(trees.size()) - 1);
        const auto& tree = trees[m];
        if (tree.IsSingleLeaf()) break;
        const auto node = static_cast<int>(
            UniformInt(rng, 0, static_cast<int64_t>(tree.size()) - 1));
        return rng() % 2 ? Operation::RemoveNode(static_cast<int>(m), node)
                         : Operation::RemoveNodeAll(static_cast<int>(m), node);
      }
      case 7:
      case 8: {
        if (trees.empty()) break;
        const auto m = UniformInt(rng, 0, static_cast<int64_t>(trees.size()) - 1);
        std::vector<int> leaves;
        for (const auto& node : trees[m].nodes) {
          if (node.is_leaf) leaves.push_back(node.id);
        }
        const int leaf = leaves[rng() % leaves.size()];
        return rng() % 2 ? Operation::ExpandNode(static_cast<int>(m), leaf)
                         : Operation::ExpandNodeAll(static_cast<int>(m), leaf);
      }
      case 9:
        return Operation::Restore(static_cast<int>(
            UniformInt(rng, 0, static_cast<int64_t>(s.history().size()) - 1)));
      default:
        return Operation::Rebuild({{"num_trees", UniformInt(rng, 0, 3)},
                                   {"max_depth", UniformInt(rng, 1, 3)}});
    }
  }
}

}  // namespace tbt::testing
