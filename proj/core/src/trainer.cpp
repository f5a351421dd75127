// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#include "snapens/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "snapens/error.hpp"
#include "snapens/rng.hpp"
#include "snapens/text.hpp"

namespace snapens {

std::string to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::kSnapshot:
      return "snapshot";
    case TrainMode::kSingle:
      return "single";
    case TrainMode::kNoCycle:
      return "nocycle";
    case TrainMode::kSingleCycle:
      return "singlecycle";
  }
  return "unknown";
}

TrainMode parse_train_mode(const std::string& name) {
  if (name == "snapshot") return TrainMode::kSnapshot;
  if (name == "single") return TrainMode::kSingle;
  if (name == "nocycle") return TrainMode::kNoCycle;
  if (name == "singlecycle") return TrainMode::kSingleCycle;
  throw ConfigError("train.mode", "unknown mode '" + name + "'");
}

void TrainConfig::validate() const {
  try {
    model.validate();
  } catch (const InputError& e) {
    throw ConfigError("model", e.what());
  }
  schedule.validate();
  if (epochs < 1) throw ConfigError("train.epochs", "must be at least 1");
  if (batch_size < 1) throw ConfigError("train.batch_size", "must be at least 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("train.momentum", "must lie in [0, 1)");
  }
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw ConfigError("train.weight_decay", "must be non-negative");
  }
  const bool cyclic = schedule.kind == ScheduleKind::kCyclicCosine;
  switch (mode) {
    case TrainMode::kSnapshot:
    case TrainMode::kSingleCycle:
      if (!cyclic) {
        throw ConfigError("schedule.kind", to_string(mode) + " mode needs cyclic_cosine");
      }
      break;
    case TrainMode::kNoCycle:
      if (schedule.kind != ScheduleKind::kStep) {
        throw ConfigError("schedule.kind", "nocycle mode needs the step schedule");
      }
      if (snapshot_count < 1) throw ConfigError("train.snapshots", "must be at least 1");
      if (snapshot_count > schedule.total_iterations) {
        throw ConfigError("train.snapshots", "exceeds the number of iterations");
      }
      break;
    case TrainMode::kSingle:
      break;
  }
}

std::int64_t total_iterations(std::int64_t epochs, std::size_t example_count,
                              std::size_t batch_size) {
  if (batch_size == 0) throw ConfigError("train.batch_size", "must be at least 1");
  const auto batches = static_cast<std::int64_t>((example_count + batch_size - 1) / batch_size);
  return epochs * batches;
}

std::string canonical_serialization(const TrainConfig& config) {
  std::map<std::string, std::string> fields;
  std::string layers;
  for (std::size_t i = 0; i < config.model.layer_sizes.size(); ++i) {
    if (i) layers += ',';
    layers += std::to_string(config.model.layer_sizes[i]);
  }
  std::string drops;
  for (std::size_t i = 0; i < config.schedule.step_drops.size(); ++i) {
    if (i) drops += ';';
    drops += text::format_double(config.schedule.step_drops[i].fraction) + ':' +
             text::format_double(config.schedule.step_drops[i].multiplier);
  }
  fields["model.activation"] = to_string(config.model.activation);
  fields["model.dropout"] = text::format_double(config.model.dropout_rate);
  fields["model.layers"] = layers;
  fields["schedule.alpha0"] = text::format_double(config.schedule.alpha0);
  fields["schedule.cycles"] = std::to_string(config.schedule.cycles);
  fields["schedule.kind"] = to_string(config.schedule.kind);
  fields["schedule.step_fractions"] = drops;
  fields["schedule.total_iterations"] = std::to_string(config.schedule.total_iterations);
  fields["train.batch_size"] = std::to_string(config.batch_size);
  fields["train.epochs"] = std::to_string(config.epochs);
  fields["train.mode"] = to_string(config.mode);
  fields["train.momentum"] = text::format_double(config.momentum);
  fields["train.seed"] = std::to_string(config.seed);
  fields["train.snapshots"] = std::to_string(config.snapshot_count);
  fields["train.weight_decay"] = text::format_double(config.weight_decay);
  std::string out;
  for (const auto& [key, value] : fields) out += key + '=' + value + '\n';
  return out;
}

Digest config_digest(const TrainConfig& config) {
  return Digest::of(canonical_serialization(config));
}

void sgd_step(std::span<double> params, std::span<const double> grad,
              std::span<double> velocity, double lr, double momentum) {
  if (params.size() != grad.size() || params.size() != velocity.size()) {
    throw InputError("sgd_step: parameter, gradient and velocity lengths differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    velocity[i] = momentum * velocity[i] - lr * grad[i];
    params[i] += velocity[i];
  }
}

std::string snapshot_file_name(std::size_t k) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "snap_%03zu.snap", k);
  return buffer;
}

namespace {

// Seed for the parameters used from the start of cycle `cycle` (1-based).
std::uint64_t init_seed(std::uint64_t seed, std::int64_t cycle) {
  return derive_seed(seed, Stream::kInit, static_cast<std::uint64_t>(cycle));
}

}  // namespace

TrainResult train(const TrainConfig& config, const Dataset& train_data) {
  config.validate();
  train_data.validate();
  if (train_data.size() == 0) throw InputError("training set is empty");
  if (train_data.feature_count() != config.model.input_dim()) {
    throw ConfigError("model.layers", "input width does not match the data's feature count");
  }
  if (train_data.class_count > config.model.class_count()) {
    throw ConfigError("model.layers", "output width is smaller than the data's class count");
  }
  const std::int64_t expected =
      total_iterations(config.epochs, train_data.size(), config.batch_size);
  if (config.schedule.total_iterations != expected) {
    throw ConfigError("schedule.total_iterations",
                      "schedule covers " + std::to_string(config.schedule.total_iterations) +
                          " iterations but training runs " + std::to_string(expected));
  }

  const ScheduleSpec& schedule = config.schedule;
  const std::int64_t total = schedule.total_iterations;
  const Digest digest = config_digest(config);

  TrainResult result;
  result.manifest.config_digest = digest;

  ParamVector params = init_params(config.model, init_seed(config.seed, 1));
  std::vector<double> velocity(params.size(), 0.0);

  auto snapshot_slot = [&](std::int64_t t) -> std::int64_t {
    switch (config.mode) {
      case TrainMode::kSnapshot:
      case TrainMode::kSingleCycle:
        return is_cycle_end(schedule, t) ? cycle_index(schedule, t) : 0;
      case TrainMode::kSingle:
        return t == total ? 1 : 0;
      case TrainMode::kNoCycle: {
        // Is t = floor(k * T / count) for some k in 1..count? The candidate is
        // the smallest k with k * T / count >= t.
        const std::int64_t count = config.snapshot_count;
        const std::int64_t k = (t * count + total - 1) / total;
        return (k >= 1 && k <= count && k * total / count == t) ? k : 0;
      }
    }
    return 0;
  };

  const std::size_t n = train_data.size();
  std::vector<std::size_t> order(n);
  std::int64_t t = 0;
  for (std::int64_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_seed(config.seed, Stream::kShuffle, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      ++t;
      if (config.mode == TrainMode::kSingleCycle && t > 1 &&
          (t - 1) % schedule.cycle_length() == 0) {
        params = init_params(config.model, init_seed(config.seed, cycle_index(schedule, t)));
        std::fill(velocity.begin(), velocity.end(), 0.0);
      }
      const std::size_t count = std::min(config.batch_size, n - start);
      const Batch batch =
          train_data.gather(std::span<const std::size_t>(order).subspan(start, count));
      LossAndGrad lg = loss_and_grad(config.model, params, batch, Mode::kTrain,
                                     derive_seed(config.seed, Stream::kDropout,
                                                 static_cast<std::uint64_t>(t)));
      if (!std::isfinite(lg.loss)) throw DivergenceError(t);
      if (config.weight_decay > 0.0) {
        for (std::size_t i = 0; i < params.size(); ++i) {
          lg.grad.values[i] += config.weight_decay * params.values[i];
        }
      }
      sgd_step(params.values, lg.grad.values, velocity, lr_at(schedule, t), config.momentum);

      loss_sum += lg.loss * static_cast<double>(count);
      seen += count;
      if (const std::int64_t slot = snapshot_slot(t); slot > 0) {
        SnapshotRecord record{config.model, params, slot, t,
                              loss_sum / static_cast<double>(seen), digest};
        result.manifest.snapshot_files.push_back(
            snapshot_file_name(result.snapshots.size() + 1));
        result.snapshots.push_back(std::move(record));
      }
    }
    const double mean_loss = loss_sum / static_cast<double>(seen);
    result.epochs.push_back({epoch + 1, mean_loss, lr_at(schedule, t)});
    result.manifest.epoch_losses.push_back(mean_loss);
  }
  result.iterations = t;
  for (const auto& snap : result.snapshots) {
    for (double v : snap.params.values) {
      if (!std::isfinite(v)) throw DivergenceError(snap.iteration);
    }
  }
  return result;
}

void write_run(const TrainResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw StorageError(dir.string(), "cannot create run directory");
  for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
    write_snapshot(result.snapshots[k], dir / result.manifest.snapshot_files[k]);
  }
  write_manifest(result.manifest, dir / "run.manifest");

  const auto loss_path = dir / "loss.csv";
  std::ofstream out(loss_path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError(loss_path.string(), "cannot write loss CSV");
  out << "epoch,mean_train_loss,lr_at_epoch_end\n";
  for (const auto& e : result.epochs) {
    out << e.epoch << ',' << text::format_double(e.mean_train_loss) << ','
        << text::format_double(e.lr_at_epoch_end) << '\n';
  }
  if (!out) throw StorageError(loss_path.string(), "write failed");
}

}  // namespace snapens
