// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#include "snapens/nn.hpp"

#include <algorithm>
#include <cmath>

#include "snapens/error.hpp"
#include "snapens/rng.hpp"

namespace snapens {

std::string to_string(Activation activation) {
  switch (activation) {
    case Activation::kRelu:
      return "relu";
  }
  return "unknown";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  throw InputError("unknown activation '" + name + "'");
}

void ModelSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw InputError("layer_sizes needs at least an input and an output layer");
  }
  for (std::size_t width : layer_sizes) {
    if (width == 0) throw InputError("layer_sizes entries must be positive");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw InputError("dropout_rate must lie in [0, 1)");
  }
}

std::size_t param_count(const ModelSpec& spec) {
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
    total += spec.layer_sizes[l] * spec.layer_sizes[l + 1] + spec.layer_sizes[l + 1];
  }
  return total;
}

void check_params(const ModelSpec& spec, const ParamVector& params) {
  spec.validate();
  if (params.size() != param_count(spec)) {
    throw InputError("parameter vector has " + std::to_string(params.size()) +
                     " entries, model needs " + std::to_string(param_count(spec)));
  }
  for (double v : params.values) {
    if (!std::isfinite(v)) throw InputError("parameter vector has non-finite entries");
  }
}

ParamVector init_params(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  ParamVector params{std::vector<double>(param_count(spec), 0.0)};
  Rng rng(seed);
  std::size_t offset = 0;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const std::size_t n_in = spec.layer_sizes[l];
    const std::size_t n_out = spec.layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(n_in));
    for (std::size_t i = 0; i < n_in * n_out; ++i) {
      params.values[offset + i] = rng.uniform(-bound, bound);
    }
    offset += n_in * n_out + n_out;
  }
  return params;
}

namespace {

struct LayerView {
  std::span<const double> weights;  // n_in x n_out
  std::span<const double> biases;
  std::size_t n_in;
  std::size_t n_out;
};

std::vector<LayerView> layer_views(const ModelSpec& spec, std::span<const double> params) {
  std::vector<LayerView> layers;
  std::size_t offset = 0;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const std::size_t n_in = spec.layer_sizes[l];
    const std::size_t n_out = spec.layer_sizes[l + 1];
    layers.push_back({params.subspan(offset, n_in * n_out),
                      params.subspan(offset + n_in * n_out, n_out), n_in, n_out});
    offset += n_in * n_out + n_out;
  }
  return layers;
}

// out = in * W + b
Matrix affine(const Matrix& in, const LayerView& layer) {
  Matrix out(in.rows(), layer.n_out);
  for (std::size_t r = 0; r < in.rows(); ++r) {
    auto dst = out.row(r);
    std::copy(layer.biases.begin(), layer.biases.end(), dst.begin());
    auto src = in.row(r);
    for (std::size_t i = 0; i < layer.n_in; ++i) {
      const double a = src[i];
      if (a == 0.0) continue;
      const double* w = layer.weights.data() + i * layer.n_out;
      for (std::size_t j = 0; j < layer.n_out; ++j) dst[j] += a * w[j];
    }
  }
  return out;
}

// Per-layer state kept for the backward pass. hidden[l] is the (post-ReLU,
// post-dropout) output of hidden layer l; mask[l] holds the dropout scale
// (0 or 1/keep) per entry, empty when dropout is inactive.
struct ForwardTrace {
  std::vector<Matrix> hidden;
  std::vector<std::vector<double>> mask;
  Matrix logits;
};

ForwardTrace run_forward(const ModelSpec& spec, std::span<const double> params,
                         const Matrix& inputs, Mode mode, std::uint64_t dropout_seed) {
  if (inputs.cols() != spec.input_dim()) {
    throw InputError("input has " + std::to_string(inputs.cols()) +
                     " features, model expects " + std::to_string(spec.input_dim()));
  }
  const bool dropout = mode == Mode::kTrain && spec.dropout_rate > 0.0;
  const double keep = 1.0 - spec.dropout_rate;
  Rng rng(dropout_seed);

  const auto layers = layer_views(spec, params);
  ForwardTrace trace;
  const Matrix* current = &inputs;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix z = affine(*current, layers[l]);
    if (l + 1 == layers.size()) {
      trace.logits = std::move(z);
      break;
    }
    std::vector<double> mask;
    if (dropout) mask.resize(z.values().size());
    auto values = z.values();
    for (std::size_t k = 0; k < values.size(); ++k) {
      values[k] = std::max(values[k], 0.0);
      if (dropout) {
        mask[k] = rng.uniform() < spec.dropout_rate ? 0.0 : 1.0 / keep;
        values[k] *= mask[k];
      }
    }
    trace.hidden.push_back(std::move(z));
    trace.mask.push_back(std::move(mask));
    current = &trace.hidden.back();
  }
  return trace;
}

}  // namespace

Matrix forward(const ModelSpec& spec, const ParamVector& params, const Matrix& inputs,
               Mode mode, std::uint64_t dropout_seed) {
  spec.validate();
  if (params.size() != param_count(spec)) {
    throw InputError("parameter vector length does not match the model");
  }
  return run_forward(spec, params.values, inputs, mode, dropout_seed).logits;
}

Matrix softmax(const Matrix& logits) {
  Matrix probs(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto in = logits.row(r);
    auto out = probs.row(r);
    const double peak = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      out[c] = std::exp(in[c] - peak);
      total += out[c];
    }
    for (double& p : out) p /= total;
  }
  return probs;
}

LossAndGrad loss_and_grad(const ModelSpec& spec, const ParamVector& params,
                          const Batch& batch, Mode mode, std::uint64_t dropout_seed) {
  spec.validate();
  if (params.size() != param_count(spec)) {
    throw InputError("parameter vector length does not match the model");
  }
  if (batch.inputs.rows() != batch.labels.size()) {
    throw InputError("batch input rows and label count differ");
  }
  if (batch.size() == 0) throw InputError("empty batch");

  const std::size_t n = batch.size();
  const std::size_t k = spec.class_count();
  ForwardTrace trace = run_forward(spec, params.values, batch.inputs, mode, dropout_seed);

  // delta = (softmax - onehot) / n, loss = mean(-log p_y)
  Matrix delta(n, k);
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const Label y = batch.labels[r];
    if (y >= k) throw InputError("label out of range");
    auto z = trace.logits.row(r);
    const double peak = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double v : z) total += std::exp(v - peak);
    const double log_total = std::log(total);
    loss -= z[y] - peak - log_total;
    auto d = delta.row(r);
    for (std::size_t c = 0; c < k; ++c) {
      d[c] = std::exp(z[c] - peak - log_total) / static_cast<double>(n);
    }
    d[y] -= 1.0 / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);

  LossAndGrad result{loss, GradVector{std::vector<double>(params.size(), 0.0)}};
  const auto layers = layer_views(spec, params.values);
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const auto& layer : layers) {
    offsets.push_back(offset);
    offset += layer.n_in * layer.n_out + layer.n_out;
  }

  for (std::size_t l = layers.size(); l-- > 0;) {
    const LayerView& layer = layers[l];
    const Matrix& input = l == 0 ? batch.inputs : trace.hidden[l - 1];
    double* grad_w = result.grad.values.data() + offsets[l];
    double* grad_b = grad_w + layer.n_in * layer.n_out;
    for (std::size_t r = 0; r < n; ++r) {
      auto a = input.row(r);
      auto d = delta.row(r);
      for (std::size_t i = 0; i < layer.n_in; ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        double* g = grad_w + i * layer.n_out;
        for (std::size_t j = 0; j < layer.n_out; ++j) g[j] += ai * d[j];
      }
      for (std::size_t j = 0; j < layer.n_out; ++j) grad_b[j] += d[j];
    }
    if (l == 0) break;

    // Back through W, then the ReLU and dropout of the layer below.
    const Matrix& below = trace.hidden[l - 1];
    const auto& mask = trace.mask[l - 1];
    Matrix next(n, layer.n_in);
    for (std::size_t r = 0; r < n; ++r) {
      auto d = delta.row(r);
      auto out = next.row(r);
      auto h = below.row(r);
      for (std::size_t i = 0; i < layer.n_in; ++i) {
        // The post-dropout activation is zero whenever the ReLU or the mask
        // blocked the unit, and the gradient is blocked in exactly those cases.
        if (h[i] <= 0.0) continue;
        const double* w = layer.weights.data() + i * layer.n_out;
        double acc = 0.0;
        for (std::size_t j = 0; j < layer.n_out; ++j) acc += w[j] * d[j];
        out[i] = mask.empty() ? acc : acc * mask[r * layer.n_in + i];
      }
    }
    delta = std::move(next);
  }
  return result;
}

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return best;
}

double evaluate_error(const ModelSpec& spec, const ParamVector& params,
                      const Dataset& dataset) {
  if (dataset.size() == 0) throw InputError("cannot evaluate on an empty dataset");
  const Matrix probs = softmax(forward(spec, params, dataset.inputs, Mode::kEval));
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    if (argmax(probs.row(r)) != dataset.labels[r]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(dataset.size());
}

}  // namespace snapens
