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

#include "tbt/cli/commands.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tbt/boosting/learner.hpp"
#include "tbt/boosting/model_json.hpp"
#include "tbt/canonical_json.hpp"
#include "tbt/error.hpp"
#include "tbt/service/http_server.hpp"
#include "tbt/service/service.hpp"
#include "tbt/session/session.hpp"

namespace tbt::cli {
namespace {

using nlohmann::json;

struct LoadedData {
  data::Dataset train;
  data::Dataset test;
};

data::CsvOptions CsvOptionsFor(const DataOptions& options) {
  data::CsvOptions csv;
  // A purely numeric --label-col selects a column by index.
  int index = 0;
  const std::string& label = options.label_column;
  const auto [ptr, ec] =
      std::from_chars(label.data(), label.data() + label.size(), index);
  if (!label.empty() && ec == std::errc() &&
      ptr == label.data() + label.size()) {
    csv.label_column = index;
  } else {
    csv.label_column = label;
  }
  csv.positive_label = options.positive_label;
  return csv;
}

LoadedData Load(const DataOptions& options) {
  const data::CsvOptions csv = CsvOptionsFor(options);
  data::Dataset full = data::LoadCsv(options.data, csv);
  if (options.test) {
    data::Dataset test = data::LoadCsvWithSchema(*options.test, full, csv);
    return {std::move(full), std::move(test)};
  }
  data::TrainTestSplit split =
      data::SplitTrainTest(full, options.test_fraction, options.seed);
  return {std::move(split.train), std::move(split.test)};
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file", {{"path", path}});
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file", {{"path", path}});
  out << text << '\n';
  if (!out) throw DataError("write failed", {{"path", path}});
}

json ParseJsonFile(const std::string& path) {
  json parsed = json::parse(ReadFile(path), nullptr, false);
  if (parsed.is_discarded()) {
    throw DataError("file is not valid JSON", {{"path", path}});
  }
  return parsed;
}

void ReportError(std::ostream& err, const Error& error) {
  err << "error: " << error.what();
  if (!error.detail().is_null()) err << ' ' << DumpCanonical(error.detail());
  err << '\n';
}

// Exit code for an error raised while loading inputs or fitting.
int ExitCodeFor(const Error& error) {
  if (dynamic_cast<const DataError*>(&error)) return kExitDataError;
  if (dynamic_cast<const FitError*>(&error)) return kExitFitFailure;
  switch (error.code()) {
    case ErrorCode::kBadRequest:
      return kExitUsage;
    case ErrorCode::kNotFound:
      return kExitDataError;
    default:
      return kExitFitFailure;
  }
}

void AddDataOptions(CLI::App* app, DataOptions& options) {
  app->add_option("--data", options.data, "CSV file with a header row")
      ->required();
  app->add_option("--test", options.test,
                  "Held-out CSV; disables the random split");
  app->add_option("--label-col", options.label_column,
                  "Label column name or 0-based index")
      ->capture_default_str();
  app->add_option("--positive-label", options.positive_label,
                  "Raw label mapped to class 1");
  app->add_option("--seed", options.seed, "Split seed")->capture_default_str();
  app->add_option("--test-fraction", options.test_fraction,
                  "Fraction of rows held out")
      ->capture_default_str();
}

}  // namespace

int RunTrain(const TrainOptions& options, std::ostream& out,
             std::ostream& err) {
  try {
    boosting::ValidateParams(options.params);
    const auto strategy = data::ParseGroupingStrategy(options.grouping);
    LoadedData loaded = Load(options.data);
    const data::Dataset& train = loaded.train;
    const data::Dataset& test = loaded.test;

    std::vector<double> test_scores;
    out << "stage\ttrain_deviance\ttrain_error\ttest_error\n";
    auto on_stage = [&](int stage, const boosting::Ensemble& ensemble,
                        std::span<const double> scores) {
      if (stage == 0) {
        test_scores.assign(test.num_samples(), ensemble.base_score);
      } else {
        const size_t m = ensemble.trees.size() - 1;
        const double weight = ensemble.TreeWeight(m);
        for (size_t i = 0; i < test_scores.size(); ++i) {
          test_scores[i] += weight * ensemble.trees[m].PredictRow(test, i);
        }
      }
      out << stage << '\t' << FormatReal(boosting::Deviance(train, scores))
          << '\t' << FormatReal(boosting::ErrorRate(train, scores)) << '\t'
          << FormatReal(boosting::ErrorRate(test, test_scores)) << '\n';
    };
    const boosting::ConstraintSet constraints =
        boosting::ConstraintSet::FromParams(options.params);
    const boosting::Ensemble model =
        boosting::FitEnsemble(train, options.params, constraints, on_stage);
    if (options.out) WriteFile(*options.out, boosting::SerializeEnsemble(model));
    if (options.export_path) {
      auto train_ptr = std::make_shared<const data::Dataset>(std::move(loaded.train));
      auto test_ptr = std::make_shared<const data::Dataset>(std::move(loaded.test));
      data::FeatureGrouping grouping = data::GroupFeatures(*train_ptr, strategy);
      const session::Session s = session::Session::Create(
          train_ptr, test_ptr, std::move(grouping), options.params);
      WriteFile(*options.export_path, s.ExportCanonical());
    }
    return kExitOk;
  } catch (const Error& e) {
    ReportError(err, e);
    return ExitCodeFor(e);
  }
}

int RunApply(const ApplyOptions& options, std::ostream& out,
             std::ostream& err) {
  std::optional<session::Session> s;
  std::vector<session::Operation> script;
  try {
    s = session::Session::Import(ParseJsonFile(options.session_export));
  } catch (const Error& e) {
    ReportError(err, e);
    return kExitDataError;
  }
  json script_json;
  try {
    script_json = ParseJsonFile(options.script);
  } catch (const Error& e) {
    ReportError(err, e);
    return kExitDataError;
  }
  try {
    // Every entry is checked before the first one runs.
    script = session::ParseScript(script_json);
  } catch (const Error& e) {
    err << "error: script rejected: "
        << DumpCanonical(service::ApiErrorJson(e)) << '\n';
    return kExitOpFailure;
  }
  for (size_t i = 0; i < script.size(); ++i) {
    try {
      s->Apply(script[i]);
    } catch (const Error& e) {
      err << "error: operation " << i << " failed: "
          << DumpCanonical(
                 {{"index", i}, {"error", service::ApiErrorJson(e)}})
          << '\n';
      return kExitOpFailure;
    }
  }
  try {
    WriteFile(options.out, s->ExportCanonical());
  } catch (const Error& e) {
    ReportError(err, e);
    return kExitDataError;
  }
  out << "index\toperation\ttrain_error\ttest_error\n";
  for (const auto& record : s->history()) {
    out << record.index << '\t' << record.operation << '\t'
        << FormatReal(record.train_error) << '\t'
        << FormatReal(record.test_error) << '\n';
  }
  return kExitOk;
}

int RunServe(const ServeOptions& options, std::ostream& err) {
  service::Service service;
  try {
    const auto names = service.RegisterDatasetsFromDir(options.data_dir);
    for (const auto& name : names) err << "dataset: " << name << '\n';
  } catch (const Error& e) {
    ReportError(err, e);
    return kExitDataError;
  }
  service::HttpServer server(service);
  if (!server.Bind(options.host, options.port)) {
    err << "error: cannot bind " << options.host << ':' << options.port
        << '\n';
    return kExitBindFailure;
  }
  err << "listening on " << options.host << ':' << options.port << std::endl;
  return server.Listen() ? kExitOk : kExitBindFailure;
}

int RunExportDataset(const ExportDatasetOptions& options, std::ostream& out,
                     std::ostream& err) {
  try {
    const LoadedData loaded = Load(options.data);
    const json document = {{"train", loaded.train.ToJson()},
                           {"test", loaded.test.ToJson()}};
    WriteFile(options.out, DumpCanonical(document));
    out << "train\t" << loaded.train.num_samples() << "\ntest\t"
        << loaded.test.num_samples() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    ReportError(err, e);
    return ExitCodeFor(e);
  }
}

int Main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interactive gradient-boosted tree workbench"};
  app.require_subcommand(1);

  TrainOptions train;
  CLI::App* train_cmd = app.add_subcommand("train", "Fit a model");
  AddDataOptions(train_cmd, train.data);
  train_cmd->add_option("--trees", train.params.num_trees, "Number of trees")
      ->capture_default_str();
  train_cmd->add_option("--depth", train.params.max_depth, "Maximum depth")
      ->capture_default_str();
  train_cmd->add_option("--eta", train.params.shrinkage, "Shrinkage")
      ->capture_default_str();
  train_cmd->add_option("--lambda", train.params.lambda, "L2 leaf penalty")
      ->capture_default_str();
  train_cmd->add_option("--min-leaf", train.params.min_leaf,
                        "Minimum samples per child")
      ->capture_default_str();
  train_cmd->add_option("--min-gain", train.params.min_gain,
                        "Gain a split must exceed")
      ->capture_default_str();
  train_cmd->add_option("--max-trees", train.params.max_trees,
                        "Upper bound for grow_tree")
      ->capture_default_str();
  train_cmd->add_option("--grouping", train.grouping,
                        "by-prefix | by-kind | single-group")
      ->capture_default_str();
  train_cmd->add_option("--out", train.out, "Model JSON output");
  train_cmd->add_option("--export", train.export_path,
                        "Session export output");

  ApplyOptions apply;
  CLI::App* apply_cmd =
      app.add_subcommand("apply", "Apply an operation script to an export");
  apply_cmd->add_option("--session-export", apply.session_export,
                        "Input session export")
      ->required();
  apply_cmd->add_option("--script", apply.script, "JSON array of operations")
      ->required();
  apply_cmd->add_option("--out", apply.out, "Output session export")
      ->required();

  ServeOptions serve;
  CLI::App* serve_cmd = app.add_subcommand("serve", "Serve the JSON API");
  serve_cmd->add_option("--port", serve.port, "Listen port")
      ->capture_default_str();
  serve_cmd->add_option("--host", serve.host, "Listen address")
      ->capture_default_str();
  serve_cmd->add_option("--data-dir", serve.data_dir,
                        "Directory of <name>.csv datasets")
      ->capture_default_str();

  ExportDatasetOptions export_dataset;
  CLI::App* export_cmd = app.add_subcommand(
      "export-dataset", "Write the train/test split as dataset JSON");
  AddDataOptions(export_cmd, export_dataset.data);
  export_cmd->add_option("--out", export_dataset.out, "Output JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = nullptr;
    for (const CLI::App* candidate : app.get_subcommands()) sub = candidate;
    err << (sub ? sub->help() : app.help());
    return kExitUsage;
  }

  if (train_cmd->parsed()) return RunTrain(train, out, err);
  if (apply_cmd->parsed()) return RunApply(apply, out, err);
  if (serve_cmd->parsed()) return RunServe(serve, err);
  return RunExportDataset(export_dataset, out, err);
}

}  // namespace tbt::cli
