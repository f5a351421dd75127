// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#include "snapens/ensemble.hpp"

#include "snapens/error.hpp"

namespace snapens {

PredictionMatrix predict(const ModelSpec& spec, const ParamVector& params,
                         const Dataset& dataset, std::string source) {
  return {softmax(forward(spec, params, dataset.inputs, Mode::kEval)), std::move(source)};
}

std::vector<PredictionMatrix> predict_all(std::span<const SnapshotRecord> snapshots,
                                          const Dataset& dataset) {
  std::vector<PredictionMatrix> out;
  out.reserve(snapshots.size());
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    out.push_back(predict(snapshots[i].spec, snapshots[i].params, dataset,
                          "snapshot " + std::to_string(i + 1)));
  }
  return out;
}

PredictionMatrix ensemble_average(std::span<const PredictionMatrix> members) {
  if (members.empty()) throw InputError("ensemble needs at least one member");
  const Matrix& first = members.front().probabilities;
  Matrix sum(first.rows(), first.cols());
  for (const auto& member : members) {
    const Matrix& p = member.probabilities;
    if (p.rows() != first.rows() || p.cols() != first.cols()) {
      throw InputError("ensemble members have different shapes");
    }
    auto dst = sum.values();
    auto src = p.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  const auto m = static_cast<double>(members.size());
  for (double& v : sum.values()) v /= m;
  return {std::move(sum), "ensemble of " + std::to_string(members.size())};
}

double prediction_error(const PredictionMatrix& predictions, std::span<const Label> labels) {
  const Matrix& p = predictions.probabilities;
  if (p.rows() != labels.size()) throw InputError("prediction rows and label count differ");
  if (labels.empty()) throw InputError("cannot evaluate on an empty dataset");
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < p.rows(); ++r) {
    if (argmax(p.row(r)) != labels[r]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

std::string to_string(Order order) {
  return order == Order::kLatest ? "latest" : "earliest";
}

Order parse_order(const std::string& name) {
  if (name == "latest") return Order::kLatest;
  if (name == "earliest") return Order::kEarliest;
  throw InputError("unknown ensemble order '" + name + "'");
}

EnsembleResult ensemble_eval(std::span<const PredictionMatrix> predictions,
                             std::span<const Label> labels, std::size_t m, Order order) {
  const std::size_t total = predictions.size();
  if (m < 1 || m > total) {
    throw InputError("ensemble size " + std::to_string(m) + " outside [1, " +
                     std::to_string(total) + "]");
  }
  EnsembleResult result;
  result.m = m;
  result.order = order;
  const std::size_t first = order == Order::kLatest ? total - m : 0;
  const auto chosen = predictions.subspan(first, m);
  for (std::size_t i = 0; i < m; ++i) {
    result.members.push_back(first + i);
    result.member_errors.push_back(prediction_error(chosen[i], labels));
  }
  result.ensemble_error = prediction_error(ensemble_average(chosen), labels);
  return result;
}

EnsembleResult ensemble_eval(std::span<const SnapshotRecord> snapshots, const Dataset& dataset,
                             std::size_t m, Order order) {
  if (m < 1 || m > snapshots.size()) {
    throw InputError("ensemble size " + std::to_string(m) + " outside [1, " +
                     std::to_string(snapshots.size()) + "]");
  }
  const auto predictions = predict_all(snapshots, dataset);
  return ensemble_eval(predictions, dataset.labels, m, order);
}

std::vector<CurvePoint> error_over_time(std::span<const PredictionMatrix> predictions,
                                        std::span<const Label> labels) {
  std::vector<CurvePoint> curve;
  for (std::size_t k = 1; k <= predictions.size(); ++k) {
    curve.push_back({k, prediction_error(predictions[k - 1], labels),
                     prediction_error(ensemble_average(predictions.first(k)), labels)});
  }
  return curve;
}

std::vector<CurvePoint> error_over_time(std::span<const SnapshotRecord> snapshots,
                                        const Dataset& dataset) {
  return error_over_time(predict_all(snapshots, dataset), dataset.labels);
}

}  // namespace snapens
