// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "oracles.hpp"
#include "snapens/data.hpp"
#include "snapens/error.hpp"
#include "snapens/rng.hpp"
#include "snapens/trainer.hpp"

namespace snapens {
namespace {

using testing::TempDir;

TEST(TwoMoonsTest, NoiselessClassZeroLiesOnUnitCircle) {
  const Dataset d = gen_two_moons(200, 0.0, 1);
  ASSERT_EQ(d.size(), 200u);
  EXPECT_EQ(std::count(d.labels.begin(), d.labels.end(), 0u), 100);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double x = d.inputs(i, 0), y = d.inputs(i, 1);
    if (d.labels[i] == 0) {
      EXPECT_NEAR(x * x + y * y, 1.0, 1e-12);
    } else {
      EXPECT_NEAR((1 - x) * (1 - x) + (0.5 - y) * (0.5 - y), 1.0, 1e-12);
    }
  }
}

TEST(TwoMoonsTest, DeterministicPerSeedAndRejectsOddCounts) {
  EXPECT_EQ(gen_two_moons(50, 0.1, 9), gen_two_moons(50, 0.1, 9));
  EXPECT_NE(gen_two_moons(50, 0.1, 9), gen_two_moons(50, 0.1, 10));
  EXPECT_THROW(gen_two_moons(51, 0.1, 1), InputError);
  EXPECT_THROW(gen_two_moons(0, 0.1, 1), InputError);
}

TEST(TwoMoonsTest, SmallNetworkSeparatesThem) {
  const Dataset d = gen_two_moons(1000, 0.1, 21);
  const Split s = split(d, 0.5, 21);
  const Normalized n = normalize(s.train, s.test);
  TrainConfig config;
  config.model = ModelSpec{{2, 32, 32, 2}};
  config.mode = TrainMode::kSingle;
  config.epochs = 60;
  config.batch_size = 32;
  config.seed = 5;
  config.schedule = ScheduleSpec::step(0.1, total_iterations(60, n.train.size(), 32));
  const TrainResult r = train(config, n.train);
  EXPECT_LT(evaluate_error(config.model, r.snapshots.back().params, n.test), 0.10);
}

TEST(SpiralsTest, NoiselessArmsNeverCoincide) {
  const Dataset d = gen_spirals(400, 2.0, 0.0, 3);
  double closest = 1e9;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (d.labels[i] == d.labels[j]) continue;
      closest = std::min(closest, std::hypot(d.inputs(i, 0) - d.inputs(j, 0),
                                             d.inputs(i, 1) - d.inputs(j, 1)));
    }
  }
  EXPECT_GT(closest, 0.0);
}

TEST(SpiralsTest, CsvRoundTripIsExact) {
  TempDir dir("spirals_csv");
  const Dataset d = gen_spirals(2000, 1.5, 0.08, 4);
  save_csv(d, dir / "s.csv");
  EXPECT_EQ(load_csv(dir / "s.csv"), d);
}

TEST(SpiralsTest, InvalidArgumentsAreInputErrors) {
  EXPECT_THROW(gen_spirals(3, 1.0, 0.0, 0), InputError);
  EXPECT_THROW(gen_spirals(10, 0.0, 0.0, 0), InputError);
  EXPECT_THROW(gen_spirals(10, 1.0, -1.0, 0), InputError);
}

TEST(BlobsTest, PointClustersAreSeparableByNearestCentroid) {
  const Dataset d = gen_blobs(60, 4, 0.0, 8);
  EXPECT_EQ(d.class_count, 4u);
  // Each class collapses onto one center, and centers differ.
  std::vector<std::pair<double, double>> centers(4);
  for (std::size_t i = 0; i < 4; ++i) centers[i] = {d.inputs(i, 0), d.inputs(i, 1)};
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::size_t best = 0;
    double best_dist = 1e300;
    for (std::size_t c = 0; c < 4; ++c) {
      const double dist = std::hypot(d.inputs(i, 0) - centers[c].first,
                                     d.inputs(i, 1) - centers[c].second);
      if (dist < best_dist) best = c, best_dist = dist;
    }
    EXPECT_EQ(best, d.labels[i]);
  }
  EXPECT_THROW(gen_blobs(2, 3, 1.0, 0), InputError);
  EXPECT_THROW(gen_blobs(2, 0, 1.0, 0), InputError);
}

TEST(CsvTest, ReportsRowAndColumnOfBadCells) {
  TempDir dir("csv_errors");
  {
    std::ofstream(dir / "bad.csv") << "f0,label\n1.5,0\nabc,1\n";
  }
  try {
    load_csv(dir / "bad.csv");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.field(), "row 3 column f0");
  }
  {
    std::ofstream(dir / "nolabel.csv") << "f0,f1\n1,2\n";
  }
  EXPECT_THROW(load_csv(dir / "nolabel.csv"), FormatError);
  const Dataset table = load_csv(dir / "nolabel.csv", std::nullopt);
  EXPECT_EQ(table.feature_count(), 2u);
  EXPECT_EQ(table.inputs(0, 1), 2.0);
  EXPECT_THROW(load_csv(dir / "missing.csv"), StorageError);
}

TEST(CsvTest, LabelColumnMayBeAnywhere) {
  TempDir dir("csv_label");
  {
    std::ofstream(dir / "d.csv") << "cls,a,b\n2,0.5,1e-3\n0,-1,7\n";
  }
  const Dataset d = load_csv(dir / "d.csv", "cls");
  EXPECT_EQ(d.class_count, 3u);
  EXPECT_EQ(d.labels, (std::vector<Label>{2, 0}));
  EXPECT_EQ(d.inputs(0, 1), 1e-3);
}

TEST(IdxTest, PixelsScaledAndFlattenedRowMajor) {
  TempDir dir("idx");
  testing::write_idx_pair(dir / "img", dir / "lab", 2, 2, {0, 51, 102, 255, 10, 20, 30, 40}, {3, 1});
  const Dataset d = load_idx(dir / "img", dir / "lab");
  ASSERT_EQ(d.size(), 2u);
  ASSERT_EQ(d.feature_count(), 4u);
  EXPECT_EQ(d.inputs(0, 0), 0.0);
  EXPECT_EQ(d.inputs(0, 1), 51.0 / 255.0);
  EXPECT_EQ(d.inputs(0, 3), 1.0);
  EXPECT_EQ(d.inputs(1, 2), 30.0 / 255.0);
  EXPECT_EQ(d.labels, (std::vector<Label>{3, 1}));
  EXPECT_EQ(d.class_count, 4u);
}

TEST(IdxTest, RoundTripThroughWriter) {
  TempDir dir("idx_roundtrip");
  Rng rng(12);
  std::vector<std::uint8_t> pixels(5 * 3 * 4);
  for (auto& p : pixels) p = static_cast<std::uint8_t>(rng.below(256));
  const std::vector<std::uint8_t> labels{0, 4, 2, 2, 1};
  testing::write_idx_pair(dir / "img", dir / "lab", 3, 4, pixels, labels);
  const Dataset d = load_idx(dir / "img", dir / "lab");
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(d.labels[i], labels[i]);
    for (std::size_t p = 0; p < 12; ++p) EXPECT_EQ(d.inputs(i, p), pixels[i * 12 + p] / 255.0);
  }
}

TEST(IdxTest, MismatchesAreFormatErrors) {
  TempDir dir("idx_bad");
  testing::write_idx_pair(dir / "img", dir / "lab", 2, 2, {1, 2, 3, 4, 5, 6, 7, 8}, {0, 1});
  testing::write_idx_pair(dir / "img3", dir / "lab3", 2, 2, {1, 2, 3, 4, 5, 6, 7, 8, 1, 2, 3, 4},
                          {0, 1, 1});
  EXPECT_THROW(load_idx(dir / "img", dir / "lab3"), FormatError);
  EXPECT_THROW(load_idx(dir / "lab", dir / "img"), FormatError);
}

TEST(SplitTest, DisjointCoverOfTheInput) {
  Dataset d{Matrix(10, 1), {}, 10};
  for (std::size_t i = 0; i < 10; ++i) {
    d.inputs(i, 0) = static_cast<double>(i);
    d.labels.push_back(static_cast<Label>(i));
  }
  const Split s = split(d, 0.5, 3);
  EXPECT_EQ(s.train.size(), 5u);
  EXPECT_EQ(s.test.size(), 5u);
  std::multiset<Label> seen(s.train.labels.begin(), s.train.labels.end());
  seen.insert(s.test.labels.begin(), s.test.labels.end());
  EXPECT_EQ(seen, (std::multiset<Label>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(s.train.inputs(i, 0), s.train.labels[i]);
  EXPECT_THROW(split(d, 0.01, 3), InputError);
  EXPECT_THROW(split(d, 1.0, 3), InputError);
}

TEST(NormalizeTest, TrainStatisticsOnlyAndConstantFeatures) {
  Dataset train{Matrix(4, 2, std::vector<double>{1, 5, 2, 5, 3, 5, 6, 5}), {0, 1, 0, 1}, 2};
  Dataset test{Matrix(1, 2, std::vector<double>{100, 7}), {0}, 2};
  const Normalized n = normalize(train, test);
  const FeatureStats recomputed = feature_stats(train);
  EXPECT_EQ(n.stats.mean, recomputed.mean);
  EXPECT_EQ(n.stats.stddev, recomputed.stddev);
  double mean = 0.0, sq = 0.0;
  for (std::size_t r = 0; r < 4; ++r) {
    mean += n.train.inputs(r, 0);
    sq += n.train.inputs(r, 0) * n.train.inputs(r, 0);
    EXPECT_EQ(n.train.inputs(r, 1), 0.0);
  }
  EXPECT_NEAR(mean / 4, 0.0, 1e-9);
  EXPECT_NEAR(std::sqrt(sq / 4), 1.0, 1e-9);
  EXPECT_EQ(n.test.inputs(0, 1), 0.0);
  EXPECT_NEAR(n.test.inputs(0, 0), (100 - 3.0) / std::sqrt(3.5), 1e-12);
}

}  // namespace
}  // namespace snapens
