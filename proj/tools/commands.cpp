// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "experiment.hpp"
#include "snapens/analysis.hpp"
#include "snapens/data.hpp"
#include "snapens/error.hpp"
#include "snapens/snapshot_store.hpp"
#include "snapens/text.hpp"

namespace snapens::cli {

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DivergenceError*>(&e)) return kExitNumerical;
  if (dynamic_cast<const UndefinedCorrelationError*>(&e)) return kExitNumerical;
  if (dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
  if (dynamic_cast<const InputError*>(&e)) return kExitUsage;
  if (dynamic_cast<const StorageError*>(&e)) return kExitIo;
  if (dynamic_cast<const FormatError*>(&e)) return kExitIo;
  if (dynamic_cast<const ConsistencyError*>(&e)) return kExitIo;
  if (dynamic_cast<const CLI::ParseError*>(&e)) return kExitUsage;
  return kExitIo;
}

void gen_data_command(const GenDataOptions& options) {
  Dataset data;
  if (options.kind == "two_moons") {
    data = gen_two_moons(options.n, options.noise, options.seed);
  } else if (options.kind == "spirals") {
    data = gen_spirals(options.n, options.turns, options.noise, options.seed);
  } else if (options.kind == "blobs") {
    data = gen_blobs(options.n, options.classes, options.spread, options.seed);
  } else {
    throw InputError("unknown dataset kind '" + options.kind + "'");
  }
  save_csv(data, options.out);
}

std::filesystem::path train_command(const std::filesystem::path& config_path, std::ostream& log) {
  ExperimentConfig config = load_config(config_path);
  const auto dir = config.output_dir;
  const ExperimentOutcome outcome = run_experiment(std::move(config));
  log << "wrote " << outcome.result.snapshots.size() << " snapshots to " << dir.string()
      << " (final error " << text::format_double(outcome.final_error) << ", ensemble error "
      << text::format_double(outcome.ensemble_error) << ")\n";
  return dir;
}

namespace {

struct RunData {
  LoadedRun run;
  Dataset data;
  std::vector<PredictionMatrix> predictions;
};

RunData load_run_data(const std::filesystem::path& manifest, const std::filesystem::path& data) {
  RunData rd{load_run(manifest), load_csv(data, "label"), {}};
  rd.data.validate();
  rd.predictions = predict_all(rd.run.snapshots, rd.data);
  return rd;
}

}  // namespace

void ensemble_command(const EnsembleOptions& options, std::ostream& csv) {
  const RunData rd = load_run_data(options.manifest, options.data);
  const std::size_t total = rd.predictions.size();
  if (options.m && (*options.m < 1 || *options.m > total)) {
    throw InputError("--m " + std::to_string(*options.m) + " outside [1, " +
                     std::to_string(total) + "]");
  }
  std::vector<double> standalone;
  for (const auto& p : rd.predictions) standalone.push_back(prediction_error(p, rd.data.labels));

  csv << "m,ensemble_error";
  for (std::size_t k = 1; k <= total; ++k) csv << ",member_error_" << k;
  csv << '\n';
  const std::size_t lo = options.m ? *options.m : 1;
  const std::size_t hi = options.m ? *options.m : total;
  for (std::size_t m = lo; m <= hi; ++m) {
    const auto result = ensemble_eval(rd.predictions, rd.data.labels, m, options.order);
    csv << m << ',' << text::format_double(result.ensemble_error) << ','
        << text::join_doubles(standalone) << '\n';
  }
}

void curve_command(const std::filesystem::path& manifest, const std::filesystem::path& data,
                   std::ostream& csv) {
  const RunData rd = load_run_data(manifest, data);
  csv << "k,single_error,ensemble_error\n";
  for (const auto& point : error_over_time(rd.predictions, rd.data.labels)) {
    csv << point.k << ',' << text::format_double(point.single_error) << ','
        << text::format_double(point.ensemble_error) << '\n';
  }
}

void interpolate_command(const InterpolateOptions& options, std::ostream& csv) {
  if (options.pair.has_value() == options.against_final) {
    throw InputError("choose exactly one of --pair and --against-final");
  }
  const LoadedRun run = load_run(options.manifest);
  Dataset data = load_csv(options.data, "label");
  data.validate();
  const auto grid = default_lambda_grid(options.points);
  const std::size_t total = run.snapshots.size();
  auto snapshot = [&](std::size_t k) -> const SnapshotRecord& {
    if (k < 1 || k > total) {
      throw InputError("snapshot " + std::to_string(k) + " outside [1, " +
                       std::to_string(total) + "]");
    }
    return run.snapshots[k - 1];
  };

  if (options.pair) {
    const auto& a = snapshot(options.pair->first);
    const auto& b = snapshot(options.pair->second);
    if (!(a.spec == b.spec)) throw InputError("snapshots use different architectures");
    const auto curve = interpolate(a.spec, a.params, b.params, data, grid);
    csv << "lambda,test_error\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv << text::format_double(curve.lambdas[i]) << ','
          << text::format_double(curve.errors[i]) << '\n';
    }
    return;
  }
  const auto& final_snapshot = snapshot(total);
  csv << "snapshot,lambda,test_error\n";
  for (std::size_t k = 1; k < total; ++k) {
    const auto& other = snapshot(k);
    if (!(other.spec == final_snapshot.spec)) {
      throw InputError("snapshots use different architectures");
    }
    const auto curve = interpolate(final_snapshot.spec, final_snapshot.params, other.params, data, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv << k << ',' << text::format_double(curve.lambdas[i]) << ','
          << text::format_double(curve.errors[i]) << '\n';
    }
  }
}

void correlate_command(const std::filesystem::path& manifest, const std::filesystem::path& data,
                       std::ostream& triples, std::ostream* grid) {
  const RunData rd = load_run_data(manifest, data);
  const CorrelationMatrix corr = softmax_correlation(rd.predictions);
  const std::size_t count = corr.values.rows();
  triples << "i,j,corr\n";
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      triples << i + 1 << ',' << j + 1 << ',' << text::format_double(corr.values(i, j)) << '\n';
    }
  }
  if (grid) {
    for (std::size_t j = 0; j < count; ++j) *grid << (j ? "," : "") << "snap_" << j + 1;
    *grid << '\n';
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) {
        *grid << (j ? "," : "") << text::format_double(corr.values(i, j));
      }
      *grid << '\n';
    }
  }
}

std::filesystem::path sweep_command(const SweepOptions& options, std::ostream& log) {
  std::vector<std::filesystem::path> configs;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(options.config_dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".conf") {
      configs.push_back(entry.path());
    }
  }
  if (ec) throw StorageError(options.config_dir.string(), "cannot list config directory");
  if (configs.empty()) throw InputError("no .conf files in " + options.config_dir.string());
  std::sort(configs.begin(), configs.end());

  // Parse everything up front so config errors surface before any training.
  std::vector<ExperimentConfig> parsed;
  std::set<std::filesystem::path> outputs;
  for (const auto& path : configs) {
    try {
      parsed.push_back(load_config(path));
    } catch (const ConfigError& e) {
      throw ConfigError(e.key(), path.filename().string() + ": " + e.what());
    }
    const auto out = std::filesystem::weakly_canonical(parsed.back().output_dir);
    if (!outputs.insert(out).second) {
      throw ConfigError("output.dir", path.filename().string() + " reuses " + out.string());
    }
  }

  std::vector<ExperimentOutcome> outcomes(parsed.size());
  std::vector<std::exception_ptr> failures(parsed.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < parsed.size(); i = next++) {
      try {
        outcomes[i] = run_experiment(parsed[i]);
        const std::lock_guard lock(log_mutex);
        log << configs[i].filename().string() << ": ensemble error "
            << text::format_double(outcomes[i].ensemble_error) << '\n';
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, parsed.size()));
  std::vector<std::thread> threads;
  for (unsigned j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  const auto summary =
      options.summary.empty() ? options.config_dir / "summary.csv" : options.summary;
  std::ofstream out(summary, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError(summary.string(), "cannot write summary");
  out << "run,cycles,epochs,seed,snapshots,final_error,ensemble_error\n";
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const TrainConfig& c = parsed[i].train;
    const std::int64_t cycles =
        c.schedule.kind == ScheduleKind::kCyclicCosine ? c.schedule.cycles : 0;
    out << i + 1 << ',' << cycles << ',' << c.epochs << ',' << c.seed << ','
        << outcomes[i].result.snapshots.size() << ','
        << text::format_double(outcomes[i].final_error) << ','
        << text::format_double(outcomes[i].ensemble_error) << '\n';
  }
  if (!out) throw StorageError(summary.string(), "write failed");
  return summary;
}

namespace {

// Runs `body` with `out_path` opened as the output stream, or `fallback` when
// the path is empty.
template <typename Body>
void with_output(const std::filesystem::path& out_path, std::ostream& fallback, Body&& body) {
  if (out_path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw StorageError(out_path.string(), "cannot open output file");
  body(file);
  if (!file) throw StorageError(out_path.string(), "write failed");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Snapshot ensembles: cyclic cosine training, ensembling and diversity analysis"};
  app.require_subcommand(1);

  GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic dataset to CSV");
  gen_cmd->add_option("--kind", gen.kind, "two_moons, spirals or blobs")
      ->check(CLI::IsMember({"two_moons", "spirals", "blobs"}));
  gen_cmd->add_option("--n", gen.n, "Number of examples");
  gen_cmd->add_option("--noise", gen.noise, "Gaussian noise (two_moons, spirals)");
  gen_cmd->add_option("--turns", gen.turns, "Spiral revolutions");
  gen_cmd->add_option("--classes", gen.classes, "Blob count");
  gen_cmd->add_option("--spread", gen.spread, "Blob standard deviation");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--out", gen.out, "Output CSV")->required();

  std::filesystem::path config_path;
  auto* train_cmd = app.add_subcommand("train", "Train one configuration");
  train_cmd->add_option("config", config_path, "Config file")->required();

  EnsembleOptions ens;
  std::string order = "latest";
  std::filesystem::path out_path;
  auto* ens_cmd = app.add_subcommand("ensemble", "Ensemble error for m = 1..M or one m");
  ens_cmd->add_option("--manifest", ens.manifest)->required();
  ens_cmd->add_option("--data", ens.data, "Labelled CSV to evaluate on")->required();
  ens_cmd->add_option("--m", ens.m, "Ensemble size (default: sweep)");
  ens_cmd->add_option("--order", order)->check(CLI::IsMember({"latest", "earliest"}));
  ens_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  std::filesystem::path manifest;
  std::filesystem::path data;
  auto* curve_cmd = app.add_subcommand("curve", "Single and earliest-k ensemble error per snapshot");
  curve_cmd->add_option("--manifest", manifest)->required();
  curve_cmd->add_option("--data", data)->required();
  curve_cmd->add_option("--out", out_path);

  InterpolateOptions interp;
  std::vector<std::size_t> pair;
  auto* interp_cmd = app.add_subcommand("interpolate", "Error along a line between two snapshots");
  interp_cmd->add_option("--manifest", interp.manifest)->required();
  interp_cmd->add_option("--data", interp.data)->required();
  auto* pair_opt = interp_cmd->add_option("--pair", pair, "Snapshots i j (1-based)")->expected(2);
  auto* final_opt = interp_cmd->add_flag("--against-final", interp.against_final,
                                         "Final snapshot against every earlier one");
  pair_opt->excludes(final_opt);
  interp_cmd->add_option("--points", interp.points, "Lambda grid size")
      ->check(CLI::Range(2, 100000));
  interp_cmd->add_option("--out", out_path);

  std::filesystem::path grid_path;
  auto* corr_cmd = app.add_subcommand("correlate", "Pairwise softmax correlation of snapshots");
  corr_cmd->add_option("--manifest", manifest)->required();
  corr_cmd->add_option("--data", data)->required();
  corr_cmd->add_option("--out", out_path, "i,j,corr triples (default stdout)");
  corr_cmd->add_option("--grid", grid_path, "M x M matrix CSV");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Train every *.conf in a directory");
  sweep_cmd->add_option("configs", sweep.config_dir, "Directory of config files")->required();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Parallel runs")->check(CLI::Range(1u, 256u));
  sweep_cmd->add_option("--summary", sweep.summary, "Summary CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) {
      gen_data_command(gen);
    } else if (train_cmd->parsed()) {
      train_command(config_path, out);
    } else if (ens_cmd->parsed()) {
      ens.order = parse_order(order);
      with_output(out_path, out, [&](std::ostream& s) { ensemble_command(ens, s); });
    } else if (curve_cmd->parsed()) {
      with_output(out_path, out, [&](std::ostream& s) { curve_command(manifest, data, s); });
    } else if (interp_cmd->parsed()) {
      if (!pair.empty()) interp.pair = std::make_pair(pair[0], pair[1]);
      with_output(out_path, out, [&](std::ostream& s) { interpolate_command(interp, s); });
    } else if (corr_cmd->parsed()) {
      with_output(out_path, out, [&](std::ostream& s) {
        if (grid_path.empty()) {
          correlate_command(manifest, data, s, nullptr);
          return;
        }
        with_output(grid_path, out, [&](std::ostream& g) { correlate_command(manifest, data, s, &g); });
      });
    } else if (sweep_cmd->parsed()) {
      const auto summary = sweep_command(sweep, out);
      out << "summary: " << summary.string() << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitOk;
}

}  // namespace snapens::cli
