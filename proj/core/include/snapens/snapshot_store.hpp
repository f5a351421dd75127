// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "snapens/digest.hpp"
#include "snapens/nn.hpp"

namespace snapens {

// One saved parameter vector and where in training it was taken.
struct SnapshotRecord {
  ModelSpec spec;
  ParamVector params;
  std::int64_t cycle_index = 1;
  std::int64_t iteration = 0;
  double train_loss = 0.0;
  Digest config_digest;

  bool operator==(const SnapshotRecord&) const = default;
};

// .snap layout:
//
//   format_version=1
//   layer_sizes=2,64,64,2
//   activation=relu
//   dropout_rate=<shortest decimal>
//   cycle_index=<int>
//   iteration=<int>
//   train_loss=<shortest decimal>
//   config_digest=<32 hex digits>
//   <empty line>
//   <param_count little-endian IEEE-754 binary64 values>
inline constexpr int kSnapshotFormatVersion = 1;

std::string encode_snapshot(const SnapshotRecord& record);
SnapshotRecord decode_snapshot(const std::string& bytes);

void write_snapshot(const SnapshotRecord& record, const std::filesystem::path& path);
SnapshotRecord read_snapshot(const std::filesystem::path& path);

// Chronological list of snapshot files (relative to the manifest's
// directory, or absolute) plus per-epoch mean training loss.
struct RunManifest {
  Digest config_digest;
  std::vector<std::string> snapshot_files;
  std::vector<double> epoch_losses;

  bool operator==(const RunManifest&) const = default;
};

// .manifest layout: `key=value` lines, `format_version=1`, `config_digest`,
// then one `snapshot=` line per file in order and one `epoch_loss=` line per
// epoch.
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

// Also checks that every referenced snapshot file exists (ConsistencyError).
RunManifest read_manifest(const std::filesystem::path& path);

struct LoadedRun {
  RunManifest manifest;
  std::vector<SnapshotRecord> snapshots;  // chronological
};

// Reads the manifest and every snapshot it lists.
LoadedRun load_run(const std::filesystem::path& manifest_path);

}  // namespace snapens
