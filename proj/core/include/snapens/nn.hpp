// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "snapens/dataset.hpp"
#include "snapens/matrix.hpp"

namespace snapens {

enum class Activation { kRelu };

std::string to_string(Activation activation);
Activation parse_activation(const std::string& name);

// Architecture of a dense feed-forward classifier. layer_sizes holds the input
// dimension, the hidden widths and finally the class count. Dropout applies to
// hidden activations in training mode only.
struct ModelSpec {
  std::vector<std::size_t> layer_sizes;
  Activation activation = Activation::kRelu;
  double dropout_rate = 0.0;

  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t class_count() const { return layer_sizes.back(); }
  std::size_t layer_count() const { return layer_sizes.size() - 1; }

  // Throws InputError if fewer than two layers, a zero width, or a dropout
  // rate outside [0, 1).
  void validate() const;

  bool operator==(const ModelSpec&) const = default;
};

// Sum over consecutive layer pairs of n_in * n_out + n_out.
std::size_t param_count(const ModelSpec& spec);

// Flat parameters, layer by layer. Each layer stores its weight matrix
// (n_in rows by n_out columns, row-major) followed by its n_out biases.
struct ParamVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  bool operator==(const ParamVector&) const = default;
};

// Gradient with the same layout as ParamVector.
struct GradVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

enum class Mode { kTrain, kEval };

// He-uniform weights in +-sqrt(6 / n_in), zero biases. Pure in (spec, seed).
ParamVector init_params(const ModelSpec& spec, std::uint64_t seed);

// Logits (batch rows by class count). In training mode hidden activations are
// dropped with probability spec.dropout_rate and survivors divided by the keep
// probability; the mask comes from a generator seeded with dropout_seed.
Matrix forward(const ModelSpec& spec, const ParamVector& params,
               const Matrix& inputs, Mode mode = Mode::kEval,
               std::uint64_t dropout_seed = 0);

// Row-wise softmax with max subtraction.
Matrix softmax(const Matrix& logits);

struct LossAndGrad {
  double loss = 0.0;
  GradVector grad;
};

// Mean cross-entropy over the batch and its exact gradient, using the same
// dropout mask that forward() would draw for (mode, dropout_seed).
LossAndGrad loss_and_grad(const ModelSpec& spec, const ParamVector& params,
                          const Batch& batch, Mode mode = Mode::kEval,
                          std::uint64_t dropout_seed = 0);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> row);

// Fraction of examples whose argmax softmax class differs from the label.
double evaluate_error(const ModelSpec& spec, const ParamVector& params,
                      const Dataset& dataset);

// Throws InputError unless params has param_count(spec) finite entries.
void check_params(const ModelSpec& spec, const ParamVector& params);

}  // namespace snapens
