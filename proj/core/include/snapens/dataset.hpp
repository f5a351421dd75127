// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "snapens/matrix.hpp"

namespace snapens {

using Label = std::uint32_t;

// A mini-batch: one input row per label.
struct Batch {
  Matrix inputs;
  std::vector<Label> labels;

  std::size_t size() const noexcept { return labels.size(); }
};

// A labelled classification dataset with `class_count` classes.
struct Dataset {
  Matrix inputs;
  std::vector<Label> labels;
  std::size_t class_count = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t feature_count() const noexcept { return inputs.cols(); }

  // Throws InputError unless labels < class_count, sizes agree and every
  // input is finite. Empty datasets are allowed here; operations that need
  // examples check separately.
  void validate() const;

  // Copies the given rows, in order, into a batch.
  Batch gather(std::span<const std::size_t> indices) const;

  // The whole dataset as one batch.
  Batch as_batch() const { return Batch{inputs, labels}; }

  bool operator==(const Dataset&) const = default;
};

}  // namespace snapens
