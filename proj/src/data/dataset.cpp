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

#include "tbt/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "tbt/canonical_json.hpp"
#include "tbt/data/csv.hpp"
#include "tbt/data/splitmix64.hpp"
#include "tbt/error.hpp"

namespace tbt::data {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> ParseReal(std::string_view cell) {
  cell = Trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || end != cell.data() + cell.size()) {
    return std::nullopt;
  }
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open data file", {{"path", path.string()}});
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int ResolveColumn(const ColumnRef& ref, const std::vector<std::string>& header) {
  if (const auto* index = std::get_if<int>(&ref)) {
    if (*index < 0 || *index >= static_cast<int>(header.size())) {
      throw DataError("label column index out of range",
                      {{"label_column", *index}});
    }
    return *index;
  }
  const std::string& name = std::get<std::string>(ref);
  const auto it = std::find(header.begin(), header.end(), name);
  if (it != header.end()) return static_cast<int>(it - header.begin());
  int index = -1;
  const auto [end, ec] =
      std::from_chars(name.data(), name.data() + name.size(), index);
  if (ec == std::errc() && end == name.data() + name.size() && index >= 0 &&
      index < static_cast<int>(header.size())) {
    return index;
  }
  throw DataError("label column not found", {{"label_column", name}});
}

// Parsed CSV body with the header split off and row widths checked.
struct Table {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

Table ParseTable(std::string_view text) {
  std::vector<CsvRow> rows = ParseCsv(text);
  if (rows.empty()) throw DataError("empty file: no header row");
  Table table;
  table.header = std::move(rows.front());
  for (auto& name : table.header) name = std::string(Trim(name));
  if (rows.size() < 2) throw DataError("empty dataset: no data rows");
  table.rows.assign(std::make_move_iterator(rows.begin() + 1),
                    std::make_move_iterator(rows.end()));
  for (size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      throw DataError("unparseable row: wrong number of fields",
                      {{"row", r + 1},
                       {"expected", table.header.size()},
                       {"found", table.rows[r].size()}});
    }
  }
  return table;
}

std::vector<uint8_t> MapLabels(const Table& table, int label_col,
                               const std::array<std::string, 2>& names) {
  std::vector<uint8_t> labels;
  labels.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const std::string raw(Trim(table.rows[r][label_col]));
    if (raw == names[0]) {
      labels.push_back(0);
    } else if (raw == names[1]) {
      labels.push_back(1);
    } else {
      throw DataError("label value outside the binary label mapping",
                      {{"row", r + 1}, {"label", raw}});
    }
  }
  return labels;
}

std::vector<double> NumericColumn(const Table& table, int col,
                                  const std::string& name) {
  std::vector<double> values;
  values.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& cell = table.rows[r][col];
    const auto parsed = ParseReal(cell);
    if (!parsed) {
      if (IsMissingToken(cell)) {
        throw DataError("missing value in numeric feature",
                        {{"row", r + 1}, {"feature", name}});
      }
      throw DataError("non-numeric value in numeric feature",
                      {{"row", r + 1}, {"feature", name}, {"value", cell}});
    }
    values.push_back(*parsed);
  }
  return values;
}

// Appends unseen categories in sorted order and returns the coded column.
std::vector<double> CategoricalColumn(const Table& table, int col,
                                      std::vector<std::string>* categories) {
  std::set<std::string> unseen;
  for (const auto& row : table.rows) {
    std::string cell(Trim(row[col]));
    if (std::find(categories->begin(), categories->end(), cell) ==
        categories->end()) {
      unseen.insert(std::move(cell));
    }
  }
  categories->insert(categories->end(), unseen.begin(), unseen.end());
  std::map<std::string_view, int> codes;
  for (size_t c = 0; c < categories->size(); ++c) {
    codes.emplace((*categories)[c], static_cast<int>(c));
  }
  std::vector<double> values;
  values.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    values.push_back(codes.at(Trim(row[col])));
  }
  return values;
}

}  // namespace

std::string_view FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kNumeric ? "numeric" : "categorical";
}

FeatureKind ParseFeatureKind(std::string_view name) {
  if (name == "numeric") return FeatureKind::kNumeric;
  if (name == "categorical") return FeatureKind::kCategorical;
  throw DataError("unknown feature kind", {{"kind", std::string(name)}});
}

bool IsMissingToken(std::string_view cell) {
  cell = Trim(cell);
  return cell.empty() || cell == "?";
}

Dataset Dataset::Create(std::vector<FeatureMeta> features,
                        std::vector<std::vector<double>> columns,
                        std::vector<uint8_t> labels,
                        std::array<std::string, 2> label_names) {
  if (labels.empty()) throw DataError("empty dataset: no samples");
  if (columns.size() != features.size()) {
    throw DataError("column count does not match feature count");
  }
  for (size_t f = 0; f < features.size(); ++f) {
    const FeatureMeta& meta = features[f];
    if (meta.id != static_cast<int>(f)) {
      throw DataError("feature ids must be dense and ordered",
                      {{"feature", meta.name}});
    }
    if (columns[f].size() != labels.size()) {
      throw DataError("column length does not match sample count",
                      {{"feature", meta.name}});
    }
    for (const double v : columns[f]) {
      if (!std::isfinite(v)) {
        throw DataError("non-finite cell", {{"feature", meta.name}});
      }
      if (meta.kind == FeatureKind::kCategorical &&
          (v != std::floor(v) || v < 0 ||
           v >= static_cast<double>(meta.categories.size()))) {
        throw DataError("category code out of range",
                        {{"feature", meta.name}});
      }
    }
  }
  for (const uint8_t y : labels) {
    if (y > 1) throw DataError("labels must be 0 or 1");
  }
  Dataset d;
  d.features_ = std::move(features);
  d.columns_ = std::move(columns);
  d.labels_ = std::move(labels);
  d.label_names_ = std::move(label_names);
  return d;
}

std::vector<double> Dataset::Row(size_t sample) const {
  std::vector<double> row(features_.size());
  for (size_t f = 0; f < features_.size(); ++f) row[f] = columns_[f][sample];
  return row;
}

Dataset Dataset::Subset(std::span<const size_t> rows) const {
  Dataset d;
  d.features_ = features_;
  d.label_names_ = label_names_;
  d.columns_.resize(columns_.size());
  for (size_t f = 0; f < columns_.size(); ++f) {
    d.columns_[f].reserve(rows.size());
    for (const size_t r : rows) d.columns_[f].push_back(columns_[f].at(r));
  }
  d.labels_.reserve(rows.size());
  for (const size_t r : rows) d.labels_.push_back(labels_.at(r));
  if (d.labels_.empty()) throw DataError("empty dataset: subset has no rows");
  return d;
}

Dataset Dataset::WithGroups(const std::vector<std::string>& groups) const {
  Dataset d = *this;
  for (size_t f = 0; f < d.features_.size() && f < groups.size(); ++f) {
    d.features_[f].group = groups[f];
  }
  return d;
}

std::string Dataset::CellText(int feature, size_t sample) const {
  const FeatureMeta& meta = features_.at(feature);
  const double v = columns_.at(feature).at(sample);
  if (meta.kind == FeatureKind::kCategorical) {
    return meta.categories.at(static_cast<size_t>(v));
  }
  return FormatReal(v);
}

nlohmann::json Dataset::ToJson() const {
  nlohmann::json features = nlohmann::json::array();
  nlohmann::json columns = nlohmann::json::array();
  for (size_t f = 0; f < features_.size(); ++f) {
    const FeatureMeta& meta = features_[f];
    nlohmann::json entry = {{"id", meta.id},
                            {"name", meta.name},
                            {"kind", FeatureKindName(meta.kind)},
                            {"group", meta.group}};
    nlohmann::json column = nlohmann::json::array();
    if (meta.kind == FeatureKind::kCategorical) {
      entry["categories"] = meta.categories;
      for (const double v : columns_[f]) column.push_back(static_cast<int>(v));
    } else {
      for (const double v : columns_[f]) column.push_back(v);
    }
    features.push_back(std::move(entry));
    columns.push_back(std::move(column));
  }
  nlohmann::json labels = nlohmann::json::array();
  for (const uint8_t y : labels_) labels.push_back(static_cast<int>(y));
  return {{"features", std::move(features)},
          {"labels", std::move(labels)},
          {"columns", std::move(columns)},
          {"label_names", label_names_}};
}

Dataset Dataset::FromJson(const nlohmann::json& json) {
  try {
    std::vector<FeatureMeta> features;
    for (const auto& entry : json.at("features")) {
      FeatureMeta meta;
      meta.id = entry.at("id").get<int>();
      meta.name = entry.at("name").get<std::string>();
      meta.kind = ParseFeatureKind(entry.at("kind").get<std::string>());
      meta.group = entry.value("group", std::string("all"));
      if (meta.kind == FeatureKind::kCategorical) {
        meta.categories =
            entry.at("categories").get<std::vector<std::string>>();
      }
      features.push_back(std::move(meta));
    }
    std::vector<std::vector<double>> columns;
    for (const auto& column : json.at("columns")) {
      columns.push_back(column.get<std::vector<double>>());
    }
    std::vector<uint8_t> labels;
    for (const auto& y : json.at("labels")) {
      const int v = y.get<int>();
      if (v != 0 && v != 1) throw DataError("labels must be 0 or 1");
      labels.push_back(static_cast<uint8_t>(v));
    }
    std::array<std::string, 2> label_names = {"0", "1"};
    if (json.contains("label_names")) {
      const auto names = json.at("label_names").get<std::vector<std::string>>();
      if (names.size() != 2) throw DataError("label_names must have 2 entries");
      label_names = {names[0], names[1]};
    }
    return Create(std::move(features), std::move(columns), std::move(labels),
                  std::move(label_names));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed dataset JSON: ") + e.what());
  }
}

Dataset LoadCsv(const std::filesystem::path& path, const CsvOptions& options) {
  return LoadCsvText(ReadFile(path), options);
}

Dataset LoadCsvText(std::string_view text, const CsvOptions& options) {
  const Table table = ParseTable(text);
  const int label_col = ResolveColumn(options.label_column, table.header);

  std::set<std::string> raw_labels;
  for (const auto& row : table.rows) {
    raw_labels.emplace(Trim(row[label_col]));
  }
  if (raw_labels.size() != 2) {
    throw DataError("label column must contain exactly two distinct values",
                    {{"distinct", raw_labels.size()}});
  }
  std::array<std::string, 2> names = {*raw_labels.begin(),
                                      *raw_labels.rbegin()};
  if (options.positive_label) {
    if (!raw_labels.contains(*options.positive_label)) {
      throw DataError("positive label not present in label column",
                      {{"positive_label", *options.positive_label}});
    }
    if (*options.positive_label == names[0]) std::swap(names[0], names[1]);
  }
  std::vector<uint8_t> labels = MapLabels(table, label_col, names);

  std::vector<FeatureMeta> features;
  std::vector<std::vector<double>> columns;
  for (int col = 0; col < static_cast<int>(table.header.size()); ++col) {
    if (col == label_col) continue;
    FeatureMeta meta;
    meta.id = static_cast<int>(features.size());
    meta.name = table.header[col];
    if (const auto it = options.kind_overrides.find(meta.name);
        it != options.kind_overrides.end()) {
      meta.kind = it->second;
    } else {
      bool any_value = false;
      bool all_numeric = true;
      for (const auto& row : table.rows) {
        if (IsMissingToken(row[col])) continue;
        any_value = true;
        if (!ParseReal(row[col])) {
          all_numeric = false;
          break;
        }
      }
      meta.kind = any_value && all_numeric ? FeatureKind::kNumeric
                                           : FeatureKind::kCategorical;
    }
    if (meta.kind == FeatureKind::kNumeric) {
      columns.push_back(NumericColumn(table, col, meta.name));
    } else {
      columns.push_back(CategoricalColumn(table, col, &meta.categories));
    }
    features.push_back(std::move(meta));
  }
  return Dataset::Create(std::move(features), std::move(columns),
                         std::move(labels), std::move(names));
}

Dataset LoadCsvWithSchema(const std::filesystem::path& path,
                          const Dataset& schema, const CsvOptions& options) {
  return LoadCsvTextWithSchema(ReadFile(path), schema, options);
}

Dataset LoadCsvTextWithSchema(std::string_view text, const Dataset& schema,
                              const CsvOptions& options) {
  const Table table = ParseTable(text);
  const int label_col = ResolveColumn(options.label_column, table.header);
  std::vector<uint8_t> labels =
      MapLabels(table, label_col, schema.label_names());

  std::vector<FeatureMeta> features;
  std::vector<std::vector<double>> columns;
  for (const FeatureMeta& expected : schema.features()) {
    const auto it =
        std::find(table.header.begin(), table.header.end(), expected.name);
    if (it == table.header.end()) {
      throw DataError("schema mismatch: feature missing from file",
                      {{"feature", expected.name}});
    }
    const int col = static_cast<int>(it - table.header.begin());
    FeatureMeta meta = expected;
    if (meta.kind == FeatureKind::kNumeric) {
      columns.push_back(NumericColumn(table, col, meta.name));
    } else {
      columns.push_back(CategoricalColumn(table, col, &meta.categories));
    }
    features.push_back(std::move(meta));
  }
  return Dataset::Create(std::move(features), std::move(columns),
                         std::move(labels), schema.label_names());
}

void CheckSchemaCompatible(const Dataset& train, const Dataset& test) {
  if (train.num_features() != test.num_features()) {
    throw DataError("schema mismatch: feature counts differ",
                    {{"train", train.num_features()},
                     {"test", test.num_features()}});
  }
  for (size_t f = 0; f < train.num_features(); ++f) {
    const FeatureMeta& a = train.features()[f];
    const FeatureMeta& b = test.features()[f];
    if (a.name != b.name || a.kind != b.kind) {
      throw DataError("schema mismatch: feature differs",
                      {{"feature_id", f}, {"train", a.name}, {"test", b.name}});
    }
    // Test categories may extend the training dictionary but not reorder it.
    if (a.kind == FeatureKind::kCategorical &&
        (b.categories.size() < a.categories.size() ||
         !std::equal(a.categories.begin(), a.categories.end(),
                     b.categories.begin()))) {
      throw DataError("schema mismatch: category codes differ",
                      {{"feature", a.name}});
    }
  }
  if (train.label_names() != test.label_names()) {
    throw DataError("schema mismatch: label mapping differs");
  }
}

size_t TestSizeFor(size_t n, double test_fraction) {
  return static_cast<size_t>(std::llround(static_cast<double>(n) * test_fraction));
}

TrainTestSplit SplitTrainTest(const Dataset& dataset, double test_fraction,
                              uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DataError("test fraction must lie in (0, 1)",
                    {{"test_fraction", test_fraction}});
  }
  const size_t n = dataset.num_samples();
  const size_t n_test = TestSizeFor(n, test_fraction);
  if (n < 2 || n_test == 0 || n_test >= n) {
    throw DataError("degenerate split: one side would be empty",
                    {{"samples", n}, {"test_fraction", test_fraction}});
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  SplitMix64 rng(seed);
  for (size_t i = n - 1; i > 0; --i) {
    const size_t j = static_cast<size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<size_t> test_rows(order.begin(), order.begin() + n_test);
  std::vector<size_t> train_rows(order.begin() + n_test, order.end());
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  return {dataset.Subset(train_rows), dataset.Subset(test_rows),
          std::move(train_rows), std::move(test_rows)};
}

std::string_view GroupingStrategyName(GroupingStrategy strategy) {
  switch (strategy) {
    case GroupingStrategy::kByPrefix:
      return "by-prefix";
    case GroupingStrategy::kByKind:
      return "by-kind";
    case GroupingStrategy::kSingleGroup:
      return "single-group";
  }
  return "by-prefix";
}

GroupingStrategy ParseGroupingStrategy(std::string_view name) {
  if (name == "by-prefix") return GroupingStrategy::kByPrefix;
  if (name == "by-kind") return GroupingStrategy::kByKind;
  if (name == "single-group") return GroupingStrategy::kSingleGroup;
  throw DataError("unknown grouping strategy",
                  {{"grouping", std::string(name)}});
}

std::vector<std::string> FeatureGrouping::LabelsByFeature(
    size_t num_features) const {
  std::vector<std::string> labels(num_features);
  for (const auto& [label, ids] : groups) {
    for (const int id : ids) {
      if (id >= 0 && static_cast<size_t>(id) < num_features) labels[id] = label;
    }
  }
  return labels;
}

nlohmann::json FeatureGrouping::ToJson() const {
  nlohmann::json out = {{"strategy", GroupingStrategyName(strategy)},
                        {"groups", nlohmann::json::object()}};
  for (const auto& [label, ids] : groups) out["groups"][label] = ids;
  return out;
}

FeatureGrouping FeatureGrouping::FromJson(const nlohmann::json& json) {
  try {
    FeatureGrouping grouping;
    grouping.strategy =
        ParseGroupingStrategy(json.at("strategy").get<std::string>());
    for (const auto& [label, ids] : json.at("groups").items()) {
      grouping.groups[label] = ids.get<std::vector<int>>();
    }
    return grouping;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed grouping JSON: ") + e.what());
  }
}

FeatureGrouping GroupFeatures(const Dataset& dataset,
                              GroupingStrategy strategy) {
  FeatureGrouping grouping;
  grouping.strategy = strategy;
  for (const FeatureMeta& meta : dataset.features()) {
    std::string label;
    switch (strategy) {
      case GroupingStrategy::kByPrefix:
        label = meta.name.substr(0, meta.name.find_first_of("-_"));
        break;
      case GroupingStrategy::kByKind:
        label = FeatureKindName(meta.kind);
        break;
      case GroupingStrategy::kSingleGroup:
        label = "all";
        break;
    }
    grouping.groups[label].push_back(meta.id);
  }
  return grouping;
}

}  // namespace tbt::data
