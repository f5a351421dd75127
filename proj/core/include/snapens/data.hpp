// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "snapens/dataset.hpp"

namespace snapens {

// Synthetic generators. All are pure functions of their arguments.

// n/2 points on the upper arc (cos p, sin p) labelled 0 and n/2 on the lower
// arc (1 - cos p, 0.5 - sin p) labelled 1, p uniform in [0, pi], plus
// isotropic Gaussian noise. n must be even and >= 2.
Dataset gen_two_moons(std::size_t n, double noise_sigma, std::uint64_t seed);

// Two interleaved arms. Arm 0 is r * (cos a, sin a) with a spanning `turns`
// revolutions and r = a / (2 pi turns); arm 1 is arm 0 rotated by pi. The
// innermost 5% of each arm is omitted so the arms stay apart at the origin.
// n must be even and >= 2.
Dataset gen_spirals(std::size_t n, double turns, double noise_sigma, std::uint64_t seed);

// K Gaussian clusters in 2-D with centers uniform in [-5, 5]^2. Example i
// belongs to class i mod K. Requires K >= 1 and n >= K.
Dataset gen_blobs(std::size_t n, std::size_t class_count, double spread, std::uint64_t seed);

// CSV with a header row. Every column except `label_column` becomes a feature.
// When label_column is empty the file is read as a plain numeric table: all
// columns are features, labels are zero and class_count is 1.
Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column = "label");

// Writes `f0,...,f{d-1},label` with shortest round-trip decimals.
void save_csv(const Dataset& dataset, const std::filesystem::path& path);

// IDX image/label pair (magic 0x00000803 / 0x00000801, big-endian sizes).
// Pixels are scaled by 1/255 and each image is flattened row-major.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

struct Split {
  Dataset train;
  Dataset test;
};

// Seeded permutation; the first round(train_fraction * n) permuted examples
// form the training side.
Split split(const Dataset& dataset, double train_fraction, std::uint64_t seed);

struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation
};

FeatureStats feature_stats(const Dataset& dataset);

// (x - mean) / stddev per feature; features with zero stddev become 0.
Dataset apply_normalization(const Dataset& dataset, const FeatureStats& stats);

struct Normalized {
  Dataset train;
  Dataset test;
  FeatureStats stats;
};

// Statistics come from the training side only.
Normalized normalize(const Dataset& train, const Dataset& test);

}  // namespace snapens
