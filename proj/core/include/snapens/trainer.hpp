// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "snapens/dataset.hpp"
#include "snapens/digest.hpp"
#include "snapens/nn.hpp"
#include "snapens/schedule.hpp"
#include "snapens/snapshot_store.hpp"

namespace snapens {

// snapshot:    cyclic cosine schedule, one snapshot at the end of every cycle.
// single:      one snapshot at the last iteration (the usual baseline).
// nocycle:     step schedule, snapshot_count snapshots equally spaced in time.
// singlecycle: cyclic cosine schedule, parameters re-initialized at the start
//              of every cycle.
enum class TrainMode { kSnapshot, kSingle, kNoCycle, kSingleCycle };

std::string to_string(TrainMode mode);
TrainMode parse_train_mode(const std::string& name);

struct TrainConfig {
  ModelSpec model;
  ScheduleSpec schedule;
  TrainMode mode = TrainMode::kSnapshot;
  std::int64_t epochs = 1;
  std::size_t batch_size = 64;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  std::int64_t snapshot_count = 0;  // nocycle only

  // Throws ConfigError for invalid fields or mode/schedule combinations.
  void validate() const;
};

// Iterations for one pass of `example_count` examples: epochs * ceil(n / b).
std::int64_t total_iterations(std::int64_t epochs, std::size_t example_count,
                              std::size_t batch_size);

// Sorted `key=value` lines covering every field of the config.
std::string canonical_serialization(const TrainConfig& config);
Digest config_digest(const TrainConfig& config);

struct EpochStat {
  std::int64_t epoch = 0;  // 1-based
  double mean_train_loss = 0.0;
  double lr_at_epoch_end = 0.0;
};

struct TrainResult {
  RunManifest manifest;
  std::vector<SnapshotRecord> snapshots;  // same order as manifest.snapshot_files
  std::vector<EpochStat> epochs;
  std::int64_t iterations = 0;
};

// Heavy-ball momentum: velocity = momentum * velocity - lr * grad, then
// params += velocity.
void sgd_step(std::span<double> params, std::span<const double> grad,
              std::span<double> velocity, double lr, double momentum);

// Runs SGD over train_data for config.epochs epochs. Throws ConfigError when
// schedule.total_iterations disagrees with the epoch/batch arithmetic and
// DivergenceError on a non-finite loss.
TrainResult train(const TrainConfig& config, const Dataset& train_data);

// File name of the k-th snapshot (1-based): snap_001.snap, snap_002.snap, ...
std::string snapshot_file_name(std::size_t k);

// Writes run.manifest, the .snap files and loss.csv into `dir` (created if
// needed).
void write_run(const TrainResult& result, const std::filesystem::path& dir);

}  // namespace snapens
