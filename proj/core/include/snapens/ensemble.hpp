// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "snapens/dataset.hpp"
#include "snapens/matrix.hpp"
#include "snapens/nn.hpp"
#include "snapens/snapshot_store.hpp"

namespace snapens {

// Class probabilities of one model over a dataset, one row per example.
struct PredictionMatrix {
  Matrix probabilities;
  std::string source;
};

// Eval-mode forward pass followed by softmax.
PredictionMatrix predict(const ModelSpec& spec, const ParamVector& params,
                         const Dataset& dataset, std::string source = {});

std::vector<PredictionMatrix> predict_all(std::span<const SnapshotRecord> snapshots,
                                          const Dataset& dataset);

// Elementwise arithmetic mean of the member probabilities.
PredictionMatrix ensemble_average(std::span<const PredictionMatrix> members);

// Argmax error of `predictions` against `labels` (ties to the lowest class).
double prediction_error(const PredictionMatrix& predictions, std::span<const Label> labels);

// latest: the last m snapshots; earliest: the first m.
enum class Order { kLatest, kEarliest };

std::string to_string(Order order);
Order parse_order(const std::string& name);

struct EnsembleResult {
  std::size_t m = 0;
  std::vector<std::size_t> members;  // chronological snapshot indices (0-based)
  std::vector<double> member_errors;  // standalone error of each member
  double ensemble_error = 0.0;
  Order order = Order::kLatest;
};

// `predictions` are in chronological order. Throws InputError unless
// 1 <= m <= predictions.size().
EnsembleResult ensemble_eval(std::span<const PredictionMatrix> predictions,
                             std::span<const Label> labels, std::size_t m, Order order);

EnsembleResult ensemble_eval(std::span<const SnapshotRecord> snapshots, const Dataset& dataset,
                             std::size_t m, Order order);

struct CurvePoint {
  std::size_t k = 0;
  double single_error = 0.0;    // k-th snapshot alone
  double ensemble_error = 0.0;  // first k snapshots averaged
};

// One point per snapshot, k = 1..M.
std::vector<CurvePoint> error_over_time(std::span<const PredictionMatrix> predictions,
                                        std::span<const Label> labels);

std::vector<CurvePoint> error_over_time(std::span<const SnapshotRecord> snapshots,
                                        const Dataset& dataset);

}  // namespace snapens
