// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "snapens/data.hpp"
#include "snapens/trainer.hpp"

namespace snapens::cli {

// Where the examples come from. `params` holds the comma-separated
// `name=value` pairs of the data.params key.
struct DataConfig {
  std::string source;
  std::map<std::string, std::string> params;
};

// One experiment: a training configuration, its data and an output
// directory. Parsed from a `key = value` file with `#` comments.
struct ExperimentConfig {
  TrainConfig train;
  DataConfig data;
  std::filesystem::path output_dir;
};

// Parses config text. Unknown keys, missing required keys and malformed values
// raise ConfigError naming the key. schedule.total_iterations is left at 0;
// it is filled in once the training set size is known.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Builds (or loads) the dataset, splits and normalizes it.
Split prepare_data(const DataConfig& data);

struct ExperimentOutcome {
  TrainResult result;
  Split data;
  double final_error = 0.0;     // last snapshot alone, on the test side
  double ensemble_error = 0.0;  // all snapshots averaged, on the test side
};

// Trains, writes run.manifest, snapshots, loss.csv, train.csv and test.csv
// into config.output_dir, then evaluates on the test side.
ExperimentOutcome run_experiment(ExperimentConfig config);

}  // namespace snapens::cli
