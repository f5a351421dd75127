// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "snapens/dataset.hpp"
#include "snapens/ensemble.hpp"
#include "snapens/matrix.hpp"
#include "snapens/nn.hpp"

namespace snapens {

// Test error along lambda * theta1 + (1 - lambda) * theta2.
struct InterpolationCurve {
  std::vector<double> lambdas;
  std::vector<double> errors;
  std::string theta1_id;  // lambda = 1
  std::string theta2_id;  // lambda = 0
};

// `points` evenly spaced values from 0 to 1 inclusive (default 51).
std::vector<double> default_lambda_grid(std::size_t points = 51);

// Throws InputError for mismatched parameter lengths or a grid that is not
// strictly increasing within [0, 1].
InterpolationCurve interpolate(const ModelSpec& spec, const ParamVector& theta1,
                               const ParamVector& theta2, const Dataset& dataset,
                               std::span<const double> lambda_grid);

// Pearson correlations between prediction matrices flattened over
// (example, class). The diagonal is exactly 1.
struct CorrelationMatrix {
  Matrix values;
  std::vector<std::string> ids;
};

// Needs at least two matrices of identical shape. Throws
// UndefinedCorrelationError when a flattened vector has zero variance.
CorrelationMatrix softmax_correlation(std::span<const PredictionMatrix> predictions);

// Mean of the off-diagonal entries among indices [first, first + count).
double mean_off_diagonal(const CorrelationMatrix& corr, std::size_t first, std::size_t count);

}  // namespace snapens
