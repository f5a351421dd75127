// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#include "experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "snapens/ensemble.hpp"
#include "snapens/error.hpp"
#include "snapens/text.hpp"

namespace snapens::cli {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "model.layers",     "model.dropout",        "schedule.kind",
      "schedule.alpha0",  "schedule.cycles",      "schedule.step_fractions",
      "train.mode",       "train.epochs",         "train.batch_size",
      "train.momentum",   "train.seed",           "train.snapshots",
      "train.weight_decay", "data.source",        "data.params",
      "output.dir",
  };
  return keys;
}

class KeyValues {
 public:
  explicit KeyValues(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  const std::string& require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key, "required key is missing");
    return it->second;
  }

  double real(const std::string& key) const {
    const auto v = text::parse_double(require(key));
    if (!v) throw ConfigError(key, "expected a number, got '" + require(key) + "'");
    return *v;
  }

  double real_or(const std::string& key, double fallback) const {
    return has(key) ? real(key) : fallback;
  }

  std::int64_t integer(const std::string& key) const {
    const auto v = text::parse_int(require(key));
    if (!v) throw ConfigError(key, "expected an integer, got '" + require(key) + "'");
    return *v;
  }

  std::uint64_t unsigned_or(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto v = text::parse_uint(require(key));
    if (!v) throw ConfigError(key, "expected a non-negative integer");
    return *v;
  }

 private:
  std::map<std::string, std::string> values_;
};

std::vector<std::size_t> parse_layers(const std::string& value) {
  std::vector<std::size_t> layers;
  for (const auto& part : text::split(value, ',')) {
    const auto width = text::parse_uint(part);
    if (!width || *width == 0) {
      throw ConfigError("model.layers", "invalid layer width '" + part + "'");
    }
    layers.push_back(static_cast<std::size_t>(*width));
  }
  if (layers.size() < 2) throw ConfigError("model.layers", "needs at least two entries");
  return layers;
}

// "0.5:0.1,0.75:0.1"
std::vector<StepDrop> parse_step_fractions(const std::string& value) {
  std::vector<StepDrop> drops;
  for (const auto& part : text::split(value, ',')) {
    const auto pieces = text::split(part, ':');
    if (pieces.size() != 2) {
      throw ConfigError("schedule.step_fractions", "expected fraction:multiplier pairs");
    }
    const auto fraction = text::parse_double(pieces[0]);
    const auto multiplier = text::parse_double(pieces[1]);
    if (!fraction || !multiplier) {
      throw ConfigError("schedule.step_fractions", "non-numeric entry '" + part + "'");
    }
    drops.push_back({*fraction, *multiplier});
  }
  return drops;
}

std::map<std::string, std::string> parse_data_params(const std::string& value) {
  std::map<std::string, std::string> params;
  if (text::trim(value).empty()) return params;
  for (const auto& part : text::split(value, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("data.params", "expected name=value, got '" + part + "'");
    }
    params[std::string(text::trim(part.substr(0, eq)))] =
        std::string(text::trim(part.substr(eq + 1)));
  }
  return params;
}

}  // namespace

ExperimentConfig parse_config(const std::string& content) {
  std::map<std::string, std::string> raw;
  std::istringstream lines(content);
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = text::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(number), "expected 'key = value'");
    }
    const std::string key(text::trim(body.substr(0, eq)));
    const std::string value(text::trim(body.substr(eq + 1)));
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key");
    if (!raw.emplace(key, value).second) throw ConfigError(key, "duplicate key");
  }
  const KeyValues kv(std::move(raw));

  ExperimentConfig config;
  TrainConfig& train = config.train;
  train.model.layer_sizes = parse_layers(kv.require("model.layers"));
  train.model.dropout_rate = kv.real_or("model.dropout", 0.0);

  train.mode = parse_train_mode(kv.require("train.mode"));
  train.schedule.kind = parse_schedule_kind(kv.require("schedule.kind"));
  train.schedule.alpha0 = kv.real("schedule.alpha0");
  if (train.schedule.kind == ScheduleKind::kCyclicCosine) {
    train.schedule.cycles = kv.integer("schedule.cycles");
  } else if (kv.has("schedule.cycles")) {
    throw ConfigError("schedule.cycles", "only valid for the cyclic_cosine schedule");
  }
  if (kv.has("schedule.step_fractions")) {
    if (train.schedule.kind != ScheduleKind::kStep) {
      throw ConfigError("schedule.step_fractions", "only valid for the step schedule");
    }
    train.schedule.step_drops = parse_step_fractions(kv.require("schedule.step_fractions"));
  }

  train.epochs = kv.integer("train.epochs");
  const auto batch = kv.integer("train.batch_size");
  if (batch < 1) throw ConfigError("train.batch_size", "must be at least 1");
  train.batch_size = static_cast<std::size_t>(batch);
  train.momentum = kv.real_or("train.momentum", 0.9);
  train.weight_decay = kv.real_or("train.weight_decay", 0.0);
  train.seed = kv.unsigned_or("train.seed", 0);
  if (train.mode == TrainMode::kNoCycle) {
    train.snapshot_count = kv.integer("train.snapshots");
  } else if (kv.has("train.snapshots")) {
    throw ConfigError("train.snapshots", "only valid for nocycle mode");
  }

  config.data.source = kv.require("data.source");
  if (kv.has("data.params")) config.data.params = parse_data_params(kv.require("data.params"));
  config.output_dir = kv.require("output.dir");
  if (config.output_dir.empty()) throw ConfigError("output.dir", "must not be empty");
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StorageError(path.string(), "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

namespace {

class DataParams {
 public:
  explicit DataParams(const std::map<std::string, std::string>& params) : params_(params) {}

  std::string text_or(const std::string& name, const std::string& fallback) {
    used_.insert(name);
    const auto it = params_.find(name);
    return it == params_.end() ? fallback : it->second;
  }

  std::string require(const std::string& name) {
    used_.insert(name);
    const auto it = params_.find(name);
    if (it == params_.end()) throw ConfigError("data.params", "missing '" + name + "'");
    return it->second;
  }

  double real_or(const std::string& name, double fallback) {
    const std::string value = text_or(name, "");
    if (value.empty()) return fallback;
    const auto v = text::parse_double(value);
    if (!v) throw ConfigError("data.params", "'" + name + "' is not a number");
    return *v;
  }

  std::uint64_t count_or(const std::string& name, std::uint64_t fallback) {
    const std::string value = text_or(name, "");
    if (value.empty()) return fallback;
    const auto v = text::parse_uint(value);
    if (!v) throw ConfigError("data.params", "'" + name + "' is not a non-negative integer");
    return *v;
  }

  void reject_unused() const {
    for (const auto& [name, value] : params_) {
      if (!used_.count(name)) throw ConfigError("data.params", "unknown parameter '" + name + "'");
    }
  }

 private:
  const std::map<std::string, std::string>& params_;
  std::set<std::string> used_;
};

}  // namespace

Split prepare_data(const DataConfig& data) {
  DataParams p(data.params);
  const std::uint64_t seed = p.count_or("seed", 0);
  const double train_fraction = p.real_or("split", 0.5);
  const std::uint64_t split_seed = p.count_or("split_seed", seed);
  const bool normalize_features = p.count_or("normalize", 1) != 0;

  auto wrap = [](auto&& build) -> Dataset {
    try {
      return build();
    } catch (const InputError& e) {
      throw ConfigError("data.params", e.what());
    }
  };

  Split parts;
  bool presplit = false;
  if (data.source == "two_moons") {
    const auto n = p.count_or("n", 1000);
    const double noise = p.real_or("noise", 0.1);
    parts.train = wrap([&] { return gen_two_moons(n, noise, seed); });
  } else if (data.source == "spirals") {
    const auto n = p.count_or("n", 2000);
    const double turns = p.real_or("turns", 1.5);
    const double noise = p.real_or("noise", 0.08);
    parts.train = wrap([&] { return gen_spirals(n, turns, noise, seed); });
  } else if (data.source == "blobs") {
    const auto n = p.count_or("n", 600);
    const auto classes = p.count_or("classes", 3);
    const double spread = p.real_or("spread", 1.0);
    parts.train = wrap([&] { return gen_blobs(n, classes, spread, seed); });
  } else if (data.source == "csv") {
    const std::string label = p.text_or("label", "label");
    parts.train = load_csv(p.require("path"), label);
    if (const auto test = p.text_or("test_path", ""); !test.empty()) {
      parts.test = load_csv(test, label);
      presplit = true;
    }
  } else if (data.source == "idx") {
    parts.train = load_idx(p.require("images"), p.require("labels"));
    const auto test_images = p.text_or("test_images", "");
    const auto test_labels = p.text_or("test_labels", "");
    if (!test_images.empty() || !test_labels.empty()) {
      parts.test = load_idx(p.require("test_images"), p.require("test_labels"));
      presplit = true;
    }
  } else {
    throw ConfigError("data.source", "unknown source '" + data.source + "'");
  }
  p.reject_unused();

  if (!presplit) {
    try {
      parts = split(parts.train, train_fraction, split_seed);
    } catch (const InputError& e) {
      throw ConfigError("data.params", e.what());
    }
  } else {
    const std::size_t classes = std::max(parts.train.class_count, parts.test.class_count);
    parts.train.class_count = parts.test.class_count = classes;
  }
  parts.train.validate();
  parts.test.validate();
  if (normalize_features) {
    Normalized n = normalize(parts.train, parts.test);
    parts.train = std::move(n.train);
    parts.test = std::move(n.test);
  }
  return parts;
}

ExperimentOutcome run_experiment(ExperimentConfig config) {
  ExperimentOutcome outcome;
  outcome.data = prepare_data(config.data);
  TrainConfig& train = config.train;
  train.schedule.total_iterations =
      total_iterations(train.epochs, outcome.data.train.size(), train.batch_size);
  outcome.result = snapens::train(train, outcome.data.train);

  write_run(outcome.result, config.output_dir);
  save_csv(outcome.data.train, config.output_dir / "train.csv");
  save_csv(outcome.data.test, config.output_dir / "test.csv");

  const auto predictions = predict_all(outcome.result.snapshots, outcome.data.test);
  const auto all = ensemble_eval(predictions, outcome.data.test.labels, predictions.size(),
                                 Order::kLatest);
  outcome.final_error = all.member_errors.back();
  outcome.ensemble_error = all.ensemble_error;
  return outcome;
}

}  // namespace snapens::cli
