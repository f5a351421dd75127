// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#include "snapens/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "snapens/error.hpp"
#include "snapens/rng.hpp"
#include "snapens/text.hpp"

namespace snapens {

void Dataset::validate() const {
  if (inputs.rows() != labels.size()) {
    throw InputError("dataset has " + std::to_string(inputs.rows()) + " input rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  for (Label y : labels) {
    if (y >= class_count) {
      throw InputError("label " + std::to_string(y) + " outside [0, " +
                       std::to_string(class_count) + ")");
    }
  }
  for (double v : inputs.values()) {
    if (!std::isfinite(v)) throw InputError("dataset contains non-finite inputs");
  }
}

Batch Dataset::gather(std::span<const std::size_t> indices) const {
  Batch batch{Matrix(indices.size(), inputs.cols()), {}};
  batch.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    auto src = inputs.row(indices[r]);
    std::copy(src.begin(), src.end(), batch.inputs.row(r).begin());
    batch.labels.push_back(labels[indices[r]]);
  }
  return batch;
}

namespace {

void check_even(std::size_t n, const char* what) {
  if (n < 2 || n % 2 != 0) {
    throw InputError(std::string(what) + ": n must be even and at least 2, got " +
                     std::to_string(n));
  }
}

void check_noise(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InputError("noise must be a non-negative finite number");
  }
}

}  // namespace

Dataset gen_two_moons(std::size_t n, double noise_sigma, std::uint64_t seed) {
  check_even(n, "two_moons");
  check_noise(noise_sigma);
  Rng rng(derive_seed(seed, Stream::kData));
  Dataset data{Matrix(n, 2), std::vector<Label>(n), 2};
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = rng.uniform(0.0, std::numbers::pi);
    const bool upper = i < half;
    double x = upper ? std::cos(phi) : 1.0 - std::cos(phi);
    double y = upper ? std::sin(phi) : 0.5 - std::sin(phi);
    if (noise_sigma > 0.0) {
      x += noise_sigma * rng.normal();
      y += noise_sigma * rng.normal();
    }
    data.inputs(i, 0) = x;
    data.inputs(i, 1) = y;
    data.labels[i] = upper ? 0 : 1;
  }
  return data;
}

Dataset gen_spirals(std::size_t n, double turns, double noise_sigma, std::uint64_t seed) {
  check_even(n, "spirals");
  check_noise(noise_sigma);
  if (!(turns > 0.0) || !std::isfinite(turns)) {
    throw InputError("spirals: turns must be positive");
  }
  Rng rng(derive_seed(seed, Stream::kData));
  Dataset data{Matrix(n, 2), std::vector<Label>(n), 2};
  const std::size_t half = n / 2;
  const double max_angle = 2.0 * std::numbers::pi * turns;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = 0.05 + 0.95 * rng.uniform();
    const double angle = u * max_angle;
    const double radius = u;
    const double sign = i < half ? 1.0 : -1.0;
    double x = sign * radius * std::cos(angle);
    double y = sign * radius * std::sin(angle);
    if (noise_sigma > 0.0) {
      x += noise_sigma * rng.normal();
      y += noise_sigma * rng.normal();
    }
    data.inputs(i, 0) = x;
    data.inputs(i, 1) = y;
    data.labels[i] = i < half ? 0 : 1;
  }
  return data;
}

Dataset gen_blobs(std::size_t n, std::size_t class_count, double spread, std::uint64_t seed) {
  if (class_count < 1) throw InputError("blobs: need at least one class");
  if (n < class_count) throw InputError("blobs: need at least one point per class");
  check_noise(spread);
  Rng rng(derive_seed(seed, Stream::kData));
  std::vector<std::array<double, 2>> centers(class_count);
  for (auto& c : centers) c = {rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
  Dataset data{Matrix(n, 2), std::vector<Label>(n), class_count};
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<Label>(i % class_count);
    double x = centers[label][0];
    double y = centers[label][1];
    if (spread > 0.0) {
      x += spread * rng.normal();
      y += spread * rng.normal();
    }
    data.inputs(i, 0) = x;
    data.inputs(i, 1) = y;
    data.labels[i] = label;
  }
  return data;
}

Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw StorageError(path.string(), "cannot open CSV file");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("header", "CSV file is empty");
  std::vector<std::string> header = text::split(line, ',');
  for (auto& name : header) name = std::string(text::trim(name));

  std::optional<std::size_t> label_index;
  if (label_column) {
    const auto it = std::find(header.begin(), header.end(), *label_column);
    if (it == header.end()) {
      throw FormatError(*label_column, "label column missing from CSV header");
    }
    label_index = static_cast<std::size_t>(it - header.begin());
  }
  const std::size_t feature_count = header.size() - (label_index ? 1 : 0);

  std::vector<double> values;
  std::vector<Label> labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (text::trim(line).empty()) continue;
    const auto cells = text::split(line, ',');
    if (cells.size() != header.size()) {
      throw FormatError("row " + std::to_string(row),
                        "expected " + std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string where = "row " + std::to_string(row) + " column " + header[c];
      if (label_index && c == *label_index) {
        const auto label = text::parse_int(cells[c]);
        if (!label || *label < 0) throw FormatError(where, "label is not a class index");
        labels.push_back(static_cast<Label>(*label));
        continue;
      }
      const auto value = text::parse_double(cells[c]);
      if (!value) throw FormatError(where, "non-numeric cell '" + cells[c] + "'");
      values.push_back(*value);
    }
    if (!label_index) labels.push_back(0);
  }
  Dataset data;
  data.inputs = Matrix(labels.size(), feature_count, std::move(values));
  data.class_count =
      labels.empty() ? 1 : static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
  data.labels = std::move(labels);
  return data;
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StorageError(path.string(), "cannot write CSV file");
  for (std::size_t c = 0; c < dataset.feature_count(); ++c) out << 'f' << c << ',';
  out << "label\n";
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    for (double v : dataset.inputs.row(r)) out << text::format_double(v) << ',';
    out << dataset.labels[r] << '\n';
  }
  if (!out) throw StorageError(path.string(), "write failed");
}

namespace {

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError(path.string(), "cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                        const std::string& field) {
  if (offset + 4 > bytes.size()) throw FormatError(field, "file too short");
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
  const auto images = read_all(images_path);
  const auto label_bytes = read_all(labels_path);
  if (read_be32(images, 0, "images magic") != 0x00000803) {
    throw FormatError("images magic", "expected 0x00000803");
  }
  if (read_be32(label_bytes, 0, "labels magic") != 0x00000801) {
    throw FormatError("labels magic", "expected 0x00000801");
  }
  const std::size_t count = read_be32(images, 4, "image count");
  const std::size_t rows = read_be32(images, 8, "image rows");
  const std::size_t cols = read_be32(images, 12, "image cols");
  const std::size_t label_count = read_be32(label_bytes, 4, "label count");
  if (count != label_count) {
    throw FormatError("count", std::to_string(count) + " images but " +
                                   std::to_string(label_count) + " labels");
  }
  const std::size_t pixels = rows * cols;
  if (images.size() != 16 + count * pixels) throw FormatError("images payload", "size mismatch");
  if (label_bytes.size() != 8 + count) throw FormatError("labels payload", "size mismatch");

  Dataset data{Matrix(count, pixels), std::vector<Label>(count), 0};
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t p = 0; p < pixels; ++p) {
      data.inputs(i, p) = static_cast<double>(images[16 + i * pixels + p]) / 255.0;
    }
    data.labels[i] = label_bytes[8 + i];
    data.class_count = std::max<std::size_t>(data.class_count, data.labels[i] + 1);
  }
  return data;
}

Split split(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError("train_fraction must lie in (0, 1)");
  }
  const std::size_t n = dataset.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw InputError("split of " + std::to_string(n) + " examples leaves an empty side");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, Stream::kSplit));
  rng.shuffle(std::span<std::size_t>(order));

  auto take = [&](std::span<const std::size_t> indices) {
    Batch b = dataset.gather(indices);
    return Dataset{std::move(b.inputs), std::move(b.labels), dataset.class_count};
  };
  const std::span<const std::size_t> all(order);
  return {take(all.first(n_train)), take(all.subspan(n_train))};
}

FeatureStats feature_stats(const Dataset& dataset) {
  const std::size_t n = dataset.size();
  const std::size_t d = dataset.feature_count();
  if (n == 0) throw InputError("cannot compute statistics of an empty dataset");
  FeatureStats stats{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) stats.mean[c] += dataset.inputs(r, c);
  }
  for (double& m : stats.mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = dataset.inputs(r, c) - stats.mean[c];
      stats.stddev[c] += diff * diff;
    }
  }
  for (double& s : stats.stddev) s = std::sqrt(s / static_cast<double>(n));
  return stats;
}

Dataset apply_normalization(const Dataset& dataset, const FeatureStats& stats) {
  if (stats.mean.size() != dataset.feature_count()) {
    throw InputError("normalization statistics do not match the feature count");
  }
  Dataset out = dataset;
  for (std::size_t r = 0; r < out.size(); ++r) {
    auto row = out.inputs.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = stats.stddev[c] > 0.0 ? (row[c] - stats.mean[c]) / stats.stddev[c] : 0.0;
    }
  }
  return out;
}

Normalized normalize(const Dataset& train, const Dataset& test) {
  FeatureStats stats = feature_stats(train);
  return {apply_normalization(train, stats), apply_normalization(test, stats), std::move(stats)};
}

}  // namespace snapens
