// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#include "snapens/analysis.hpp"

#include <cmath>

#include "snapens/error.hpp"

namespace snapens {

std::vector<double> default_lambda_grid(std::size_t points) {
  if (points < 2) throw InputError("lambda grid needs at least two points");
  std::vector<double> grid(points);
  const auto steps = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / steps;
  return grid;
}

InterpolationCurve interpolate(const ModelSpec& spec, const ParamVector& theta1,
                               const ParamVector& theta2, const Dataset& dataset,
                               std::span<const double> lambda_grid) {
  if (theta1.size() != theta2.size()) {
    throw InputError("interpolation endpoints have different lengths");
  }
  check_params(spec, theta1);
  check_params(spec, theta2);
  if (lambda_grid.empty()) throw InputError("empty lambda grid");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const double lambda = lambda_grid[i];
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("lambda outside [0, 1]");
    if (i > 0 && !(lambda > lambda_grid[i - 1])) {
      throw InputError("lambda grid must be strictly increasing");
    }
  }

  InterpolationCurve curve;
  ParamVector mixed{std::vector<double>(theta1.size())};
  for (double lambda : lambda_grid) {
    for (std::size_t i = 0; i < mixed.size(); ++i) {
      mixed.values[i] = lambda * theta1.values[i] + (1.0 - lambda) * theta2.values[i];
    }
    curve.lambdas.push_back(lambda);
    curve.errors.push_back(evaluate_error(spec, mixed, dataset));
  }
  return curve;
}

CorrelationMatrix softmax_correlation(std::span<const PredictionMatrix> predictions) {
  const std::size_t count = predictions.size();
  if (count < 2) throw InputError("correlation needs at least two prediction matrices");
  const Matrix& first = predictions.front().probabilities;
  for (const auto& p : predictions) {
    if (p.probabilities.rows() != first.rows() || p.probabilities.cols() != first.cols()) {
      throw InputError("prediction matrices have different shapes");
    }
  }
  const auto length = static_cast<double>(first.values().size());

  // Centered copies and their norms.
  std::vector<std::vector<double>> centered(count);
  std::vector<double> norms(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto values = predictions[i].probabilities.values();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= length;
    centered[i].reserve(values.size());
    double ss = 0.0;
    for (double v : values) {
      centered[i].push_back(v - mean);
      ss += (v - mean) * (v - mean);
    }
    if (!(ss > 0.0)) throw UndefinedCorrelationError(i);
    norms[i] = std::sqrt(ss);
  }

  CorrelationMatrix corr{Matrix(count, count), {}};
  for (std::size_t i = 0; i < count; ++i) {
    corr.ids.push_back(predictions[i].source);
    corr.values(i, i) = 1.0;
    for (std::size_t j = i + 1; j < count; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < centered[i].size(); ++k) dot += centered[i][k] * centered[j][k];
      const double r = dot / (norms[i] * norms[j]);
      corr.values(i, j) = r;
      corr.values(j, i) = r;
    }
  }
  return corr;
}

double mean_off_diagonal(const CorrelationMatrix& corr, std::size_t first, std::size_t count) {
  if (count < 2 || first + count > corr.values.rows()) {
    throw InputError("need at least two in-range indices for an off-diagonal mean");
  }
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = first; i < first + count; ++i) {
    for (std::size_t j = first; j < first + count; ++j) {
      if (i == j) continue;
      total += corr.values(i, j);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

}  // namespace snapens
