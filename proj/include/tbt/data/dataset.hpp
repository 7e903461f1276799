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

#ifndef TBT_DATA_DATASET_HPP_
#define TBT_DATA_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace tbt::data {

enum class FeatureKind { kCategorical, kNumeric };

std::string_view FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(std::string_view name);

struct FeatureMeta {
  int id = 0;
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  std::string group = "all";
  bool allowed = true;
  // Interned category strings; a categorical cell holds an index into this.
  std::vector<std::string> categories;

  bool operator==(const FeatureMeta&) const = default;
};

// Column-major table of F features by N samples with binary labels.
// Categorical cells hold their category code as an exact integer.
// Immutable once constructed; Create() checks every invariant.
class Dataset {
 public:
  static Dataset Create(std::vector<FeatureMeta> features,
                        std::vector<std::vector<double>> columns,
                        std::vector<uint8_t> labels,
                        std::array<std::string, 2> label_names);

  size_t num_samples() const { return labels_.size(); }
  size_t num_features() const { return features_.size(); }

  const std::vector<FeatureMeta>& features() const { return features_; }
  const FeatureMeta& feature(int id) const { return features_.at(id); }
  std::span<const double> column(int feature) const {
    return columns_.at(feature);
  }
  double value(int feature, size_t sample) const {
    return columns_[feature][sample];
  }
  std::span<const uint8_t> labels() const { return labels_; }
  int label(size_t sample) const { return labels_[sample]; }
  // Raw label strings mapped to 0 and 1.
  const std::array<std::string, 2>& label_names() const {
    return label_names_;
  }

  std::vector<double> Row(size_t sample) const;
  // Rows in the given order; feature metadata is shared.
  Dataset Subset(std::span<const size_t> rows) const;
  // Copy with each feature's group label replaced.
  Dataset WithGroups(const std::vector<std::string>& groups) const;

  // Text of a cell as it appeared in the source (category string or number).
  std::string CellText(int feature, size_t sample) const;

  nlohmann::json ToJson() const;
  static Dataset FromJson(const nlohmann::json& json);

  bool operator==(const Dataset&) const = default;

 private:
  Dataset() = default;

  std::vector<FeatureMeta> features_;
  std::vector<std::vector<double>> columns_;
  std::vector<uint8_t> labels_;
  std::array<std::string, 2> label_names_;
};

// A column reference by header name or 0-based index.
using ColumnRef = std::variant<std::string, int>;

struct CsvOptions {
  ColumnRef label_column = std::string("class");
  std::map<std::string, FeatureKind> kind_overrides;
  // Raw label that maps to 1; by default the lexicographically larger one.
  std::optional<std::string> positive_label;
};

// Tokens treated as a missing cell.
bool IsMissingToken(std::string_view cell);

Dataset LoadCsv(const std::filesystem::path& path, const CsvOptions& options);
Dataset LoadCsvText(std::string_view text, const CsvOptions& options);

// Loads a second file (typically a held-out test set) against an existing
// schema: same feature names and kinds, same label mapping. Categories unseen
// in the schema are appended after the schema's codes.
Dataset LoadCsvWithSchema(const std::filesystem::path& path,
                          const Dataset& schema, const CsvOptions& options);
Dataset LoadCsvTextWithSchema(std::string_view text, const Dataset& schema,
                              const CsvOptions& options);

// Throws DataError unless both datasets have the same feature names, kinds,
// and label mapping.
void CheckSchemaCompatible(const Dataset& train, const Dataset& test);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
  std::vector<size_t> train_rows;
  std::vector<size_t> test_rows;
};

// Number of rows sent to the test side for n samples.
size_t TestSizeFor(size_t n, double test_fraction);

// Fisher-Yates shuffle driven by SplitMix64(seed); the first TestSizeFor()
// shuffled indices form the test part. Both parts keep original row order.
TrainTestSplit SplitTrainTest(const Dataset& dataset, double test_fraction,
                              uint64_t seed);

enum class GroupingStrategy { kByPrefix, kByKind, kSingleGroup };

std::string_view GroupingStrategyName(GroupingStrategy strategy);
GroupingStrategy ParseGroupingStrategy(std::string_view name);

struct FeatureGrouping {
  GroupingStrategy strategy = GroupingStrategy::kByPrefix;
  std::map<std::string, std::vector<int>> groups;

  // Group label per feature id.
  std::vector<std::string> LabelsByFeature(size_t num_features) const;

  nlohmann::json ToJson() const;
  static FeatureGrouping FromJson(const nlohmann::json& json);
  bool operator==(const FeatureGrouping&) const = default;
};

FeatureGrouping GroupFeatures(const Dataset& dataset,
                              GroupingStrategy strategy);

}  // namespace tbt::data

#endif  // TBT_DATA_DATASET_HPP_
