// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

#include "snapens/ensemble.hpp"

namespace snapens::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,      // bad flags, bad config, out-of-range arguments
  kExitNumerical = 3,  // divergence, undefined correlation
  kExitIo = 4,         // unreadable, malformed or inconsistent files
};

// Maps a library exception to the process exit code.
int exit_code_for(const std::exception& e);

struct GenDataOptions {
  std::string kind = "spirals";  // two_moons | spirals | blobs
  std::size_t n = 2000;
  double noise = 0.08;
  double turns = 1.5;
  std::size_t classes = 3;
  double spread = 1.0;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

void gen_data_command(const GenDataOptions& options);

// Runs one config; returns the output directory.
std::filesystem::path train_command(const std::filesystem::path& config_path, std::ostream& log);

struct EnsembleOptions {
  std::filesystem::path manifest;
  std::filesystem::path data;
  std::optional<std::size_t> m;  // sweep 1..M when absent
  Order order = Order::kLatest;
};

// CSV: m,ensemble_error,member_error_1,...,member_error_M where the member
// columns hold every snapshot's standalone error in chronological order.
void ensemble_command(const EnsembleOptions& options, std::ostream& csv);

// CSV: k,single_error,ensemble_error (earliest-k ensembles).
void curve_command(const std::filesystem::path& manifest, const std::filesystem::path& data,
                   std::ostream& csv);

struct InterpolateOptions {
  std::filesystem::path manifest;
  std::filesystem::path data;
  std::optional<std::pair<std::size_t, std::size_t>> pair;  // 1-based (theta1, theta2)
  bool against_final = false;
  std::size_t points = 51;
};

// --pair i j:      lambda,test_error with theta1 = snapshot i, theta2 = snapshot j.
// --against-final: snapshot,lambda,test_error with theta1 = final snapshot and
//                  theta2 = each earlier snapshot.
void interpolate_command(const InterpolateOptions& options, std::ostream& csv);

// Triples i,j,corr (1-based, every ordered pair) and, when `grid` is given,
// the M x M matrix with header snap_1,...,snap_M.
void correlate_command(const std::filesystem::path& manifest, const std::filesystem::path& data,
                       std::ostream& triples, std::ostream* grid);

struct SweepOptions {
  std::filesystem::path config_dir;
  unsigned jobs = 1;
  std::filesystem::path summary;  // defaults to <config_dir>/summary.csv
};

// Trains every *.conf in config_dir (sorted by name) and writes
// run,cycles,epochs,seed,snapshots,final_error,ensemble_error per config.
// Returns the summary path.
std::filesystem::path sweep_command(const SweepOptions& options, std::ostream& log);

// Full command-line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace snapens::cli
