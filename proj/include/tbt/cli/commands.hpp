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

#ifndef TBT_CLI_COMMANDS_HPP_
#define TBT_CLI_COMMANDS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "tbt/boosting/ensemble.hpp"

namespace tbt::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDataError = 3;
inline constexpr int kExitOpFailure = 4;
inline constexpr int kExitBindFailure = 5;

struct DataOptions {
  std::string data;
  std::optional<std::string> test;
  std::string label_column = "class";
  std::optional<std::string> positive_label;
  uint64_t seed = 42;
  double test_fraction = 0.3;
};

struct TrainOptions {
  DataOptions data;
  boosting::FitParams params;
  std::string grouping = "by-prefix";
  std::optional<std::string> out;
  std::optional<std::string> export_path;
};

struct ApplyOptions {
  std::string session_export;
  std::string script;
  std::string out;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8642;
  std::string data_dir = "data";
};

struct ExportDatasetOptions {
  DataOptions data;
  std::string out;
};

// Fits a model, printing the TSV stage log
//   stage  train_deviance  train_error  test_error
// for stages 0..num_trees to `out`.
int RunTrain(const TrainOptions& options, std::ostream& out,
             std::ostream& err);
// Imports an export, applies a validated script, writes the new export and
// prints the history table
//   index  operation  train_error  test_error
int RunApply(const ApplyOptions& options, std::ostream& out,
             std::ostream& err);
int RunServe(const ServeOptions& options, std::ostream& err);
// Writes {"train": dataset, "test": dataset} for the configured split.
int RunExportDataset(const ExportDatasetOptions& options, std::ostream& out,
                     std::ostream& err);

// Parses argv and dispatches to a subcommand.
int Main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace tbt::cli

#endif  // TBT_CLI_COMMANDS_HPP_
