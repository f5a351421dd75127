// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "experiment.hpp"
#include "oracles.hpp"
#include "snapens/analysis.hpp"
#include "snapens/data.hpp"
#include "snapens/ensemble.hpp"
#include "snapens/error.hpp"
#include "snapens/rng.hpp"
#include "snapens/schedule.hpp"
#include "snapens/snapshot_store.hpp"
#include "snapens/text.hpp"
#include "snapens/trainer.hpp"

namespace {

using namespace snapens;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr int kSeeds = 7;
constexpr std::int64_t kEpochs = 120;
constexpr std::size_t kBatch = 64;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail,
            Clock::time_point start) {
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("criterion %d %-28s %s  %s (%.1f s)\n", id, name.c_str(), pass ? "PASS" : "FAIL",
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Spirals, n = 2000, noise 0.08, 50/50 split, one fixed draw shared by every seed.
const std::string kSpiralParams = "n=2000,noise=0.08,turns=1.5,seed=1000,split_seed=2000";

Split spiral_data() {
  cli::DataConfig d{"spirals", {}};
  for (const auto& kv : text::split(kSpiralParams, ',')) {
    const auto eq = kv.find('=');
    d.params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return cli::prepare_data(d);
}

void criterion1() {
  const auto start = Clock::now();
  bool ok = true;
  double worst = 0.0;
  auto check = [&](double got, double want) {
    worst = std::max(worst, std::abs(got - want));
    ok = ok && std::abs(got - want) <= 1e-12;
  };
  const ScheduleSpec c = ScheduleSpec::cyclic(0.2, 600, 6);
  check(lr_at(c, 1), 0.2);
  check(lr_at(c, 51), 0.1);
  check(lr_at(c, 101), 0.2);
  check(lr_at(c, 100), 4.934396342684430e-05);  // 0.1 * (cos(0.99 pi) + 1), 30-digit oracle
  for (std::int64_t t0 = 1; t0 <= 600; t0 += 100) check(lr_at(c, t0), 0.2);
  const ScheduleSpec s = ScheduleSpec::step(0.1, 300);
  check(lr_at(s, 1), 0.1);
  check(lr_at(s, 150), 0.1);
  check(lr_at(s, 151), 0.01);
  check(lr_at(s, 225), 0.01);
  check(lr_at(s, 226), 0.001);
  check(lr_at(s, 300), 0.001);
  report(1, "schedule exactness", ok, "max abs deviation " + fmt("%.3g", worst), start);
}

void criterion2() {
  const auto start = Clock::now();
  const ModelSpec spec{{2, 4, 3}};
  Rng rng(20240101);
  double worst = 0.0;
  const int cases = 40;
  for (int k = 0; k < cases; ++k) {
    ParamVector p = init_params(spec, 500 + static_cast<std::uint64_t>(k));
    for (double& v : p.values) v += rng.uniform(-0.1, 0.1);
    Batch b{Matrix(6, 2), std::vector<Label>(6)};
    for (std::size_t r = 0; r < 6; ++r) {
      b.inputs(r, 0) = rng.normal();
      b.inputs(r, 1) = rng.normal();
      b.labels[r] = static_cast<Label>(rng.below(3));
    }
    const auto analytic = loss_and_grad(spec, p, b).grad.values;
    const auto numeric = testing::finite_difference_grad(spec, p.values, b, 1e-5);
    worst = std::max(worst, testing::relative_error(analytic, numeric));
  }
  report(2, "gradient oracle", worst < 1e-6,
         std::to_string(cases) + " cases, max relative error " + fmt("%.3g", worst), start);
}

struct SeedOutcome {
  double ensemble = 0, single = 0, best_member = 0, nocycle = 0;
  double corr_cyclic = 0, corr_nocycle = 0;
  bool endpoints_exact = true;
  double spike = 0;  // max over early snapshots of (interior max - max endpoint)
};

SeedOutcome run_seed(const Split& data, std::uint64_t seed) {
  SeedOutcome o;
  const ModelSpec spec{{2, 64, 64, 2}};
  const std::int64_t T = total_iterations(kEpochs, data.train.size(), kBatch);

  TrainConfig cyc{spec, ScheduleSpec::cyclic(0.2, T, 6), TrainMode::kSnapshot, kEpochs, kBatch,
                  0.9, 0.0, seed, 0};
  const TrainResult rc = train(cyc, data.train);
  const auto pc = predict_all(rc.snapshots, data.test);
  const EnsembleResult ec = ensemble_eval(pc, data.test.labels, pc.size(), Order::kLatest);
  o.ensemble = ec.ensemble_error;
  o.best_member = *std::min_element(ec.member_errors.begin(), ec.member_errors.end());

  TrainConfig single{spec, ScheduleSpec::step(0.1, T), TrainMode::kSingle, kEpochs, kBatch,
                     0.9, 0.0, seed, 0};
  const TrainResult rs = train(single, data.train);
  o.single = evaluate_error(spec, rs.snapshots.back().params, data.test);

  TrainConfig noc = single;
  noc.mode = TrainMode::kNoCycle;
  noc.snapshot_count = 6;
  const TrainResult rn = train(noc, data.train);
  const auto pn = predict_all(rn.snapshots, data.test);
  o.nocycle = ensemble_eval(pn, data.test.labels, pn.size(), Order::kLatest).ensemble_error;

  o.corr_cyclic = mean_off_diagonal(softmax_correlation(pc), 3, 3);
  o.corr_nocycle = mean_off_diagonal(softmax_correlation(pn), 3, 3);

  const auto& snaps = rc.snapshots;
  std::vector<double> standalone;
  for (const auto& s : snaps) standalone.push_back(evaluate_error(spec, s.params, data.test));
  const std::vector<double> ends{0.0, 0.5, 1.0};
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    for (std::size_t j = 0; j < snaps.size(); ++j) {
      if (i == j) continue;
      const auto c = interpolate(spec, snaps[i].params, snaps[j].params, data.test, ends);
      o.endpoints_exact = o.endpoints_exact && c.errors.back() == standalone[i] &&
                          c.errors.front() == standalone[j];
    }
  }
  const auto grid = default_lambda_grid();
  o.spike = -1.0;
  for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
    const auto c = interpolate(spec, snaps.back().params, snaps[i].params, data.test, grid);
    const double interior = *std::max_element(c.errors.begin() + 1, c.errors.end() - 1);
    o.spike = std::max(o.spike, interior - std::max(c.errors.front(), c.errors.back()));
  }
  return o;
}

void criteria3to7() {
  const auto start = Clock::now();
  const Split data = spiral_data();
  std::vector<SeedOutcome> runs;
  for (int s = 0; s < kSeeds; ++s) runs.push_back(run_seed(data, static_cast<std::uint64_t>(s)));
  auto med = [&](double SeedOutcome::*field) {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.*field);
    return median(v);
  };
  const double ens = med(&SeedOutcome::ensemble), single = med(&SeedOutcome::single);
  const double best = med(&SeedOutcome::best_member), noc = med(&SeedOutcome::nocycle);
  const double cc = med(&SeedOutcome::corr_cyclic), cn = med(&SeedOutcome::corr_nocycle);
  const double spike = med(&SeedOutcome::spike);
  const bool exact = std::all_of(runs.begin(), runs.end(), [](const auto& r) { return r.endpoints_exact; });

  report(3, "snapshot ensemble benefit", ens <= single,
         "median ensemble " + fmt("%.4f", ens) + " vs single model " + fmt("%.4f", single), start);
  report(4, "ensemble member dominance", ens <= best + 0.01,
         "median ensemble " + fmt("%.4f", ens) + " vs best snapshot " + fmt("%.4f", best) + " + 0.01",
         start);
  report(5, "nocycle contrast", ens <= noc,
         "median cyclic " + fmt("%.4f", ens) + " vs nocycle " + fmt("%.4f", noc), start);
  report(6, "diversity ordering", cc < cn,
         "median last-3 correlation cyclic " + fmt("%.4f", cc) + " vs nocycle " + fmt("%.4f", cn),
         start);
  report(7, "interpolation endpoints", exact && spike > 0.0,
         std::string(exact ? "endpoints bit-exact" : "endpoint mismatch") +
             ", median interior spike " + fmt("%.4f", spike),
         start);
}

SnapshotRecord random_record(Rng& rng) {
  SnapshotRecord r;
  const std::size_t depth = 2 + rng.below(3);
  for (std::size_t i = 0; i < depth; ++i) r.spec.layer_sizes.push_back(1 + rng.below(12));
  r.spec.dropout_rate = rng.below(2) ? 0.0 : rng.uniform(0.0, 0.9);
  r.params.values.resize(param_count(r.spec));
  for (auto& v : r.params.values) v = rng.normal() * std::ldexp(1.0, static_cast<int>(rng.below(200)) - 100);
  r.cycle_index = 1 + static_cast<std::int64_t>(rng.below(20));
  r.iteration = static_cast<std::int64_t>(rng.below(100000));
  r.train_loss = rng.uniform();
  r.config_digest = Digest::of(std::to_string(rng.below(1u << 20)));
  return r;
}

std::string spiral_conf(const fs::path& out, int cycles, std::uint64_t seed, std::int64_t epochs) {
  std::ostringstream s;
  s << "model.layers = 2,64,64,2\nschedule.kind = cyclic_cosine\nschedule.alpha0 = 0.2\n"
    << "schedule.cycles = " << cycles << "\ntrain.mode = snapshot\ntrain.epochs = " << epochs
    << "\ntrain.batch_size = 64\ntrain.seed = " << seed << "\ndata.source = spirals\n"
    << "data.params = " << kSpiralParams << "\noutput.dir = " << out.string() << "\n";
  return s.str();
}

void criterion8(const fs::path& work) {
  const auto start = Clock::now();
  bool ok = true;
  std::ostringstream log;
  for (const char* name : {"a", "b"}) {
    std::ofstream(work / (std::string(name) + ".conf")) << spiral_conf(work / name, 6, 3, 12);
    cli::train_command(work / (std::string(name) + ".conf"), log);
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(work / "a")) {
    const auto name = entry.path().filename();
    if (name.extension() != ".snap" && name != "run.manifest") continue;
    ++files;
    ok = ok && slurp(entry.path()) == slurp(work / "b" / name);
  }
  ok = ok && files == 7;

  Rng rng(8);
  const int trials = 200;
  for (int k = 0; k < trials; ++k) {
    const SnapshotRecord r = random_record(rng);
    const std::string bytes = encode_snapshot(r);
    const SnapshotRecord back = decode_snapshot(bytes);
    ok = ok && back.spec == r.spec && encode_snapshot(back) == bytes;
    for (std::size_t i = 0; ok && i < r.params.values.size(); ++i) {
      ok = std::bit_cast<std::uint64_t>(r.params.values[i]) ==
           std::bit_cast<std::uint64_t>(back.params.values[i]);
    }

    RunManifest m{r.config_digest, {}, {}};
    const std::size_t count = 1 + rng.below(8);
    for (std::size_t i = 1; i <= count; ++i) {
      m.snapshot_files.push_back(snapshot_file_name(i));
      m.epoch_losses.push_back(rng.uniform() * std::ldexp(1.0, -static_cast<int>(rng.below(40))));
    }
    const fs::path dir = work / "manifests";
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const auto& f : m.snapshot_files) write_snapshot(r, dir / f);
    write_manifest(m, dir / "run.manifest");
    ok = ok && read_manifest(dir / "run.manifest") == m;
  }
  report(8, "determinism and persistence", ok,
         std::to_string(files) + " rerun files identical, " + std::to_string(trials) +
             " snapshot and manifest round-trips",
         start);
}

void criterion9(const fs::path& work) {
  const auto start = Clock::now();
  const std::vector<int> ms{2, 4, 6, 8, 10};
  std::map<int, std::vector<double>> errors;
  bool ok = true;
  std::ostringstream log;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const fs::path dir = work / ("sweep_seed" + std::to_string(seed));
    fs::create_directories(dir);
    for (int m : ms) {
      char name[32];
      std::snprintf(name, sizeof name, "m%02d.conf", m);
      std::ofstream(dir / name) << spiral_conf(dir / ("run_m" + std::to_string(m)), m,
                                               static_cast<std::uint64_t>(seed), kEpochs);
    }
    cli::SweepOptions options{dir, 4, {}};
    const Dataset summary = load_csv(cli::sweep_command(options, log), std::nullopt);
    ok = ok && summary.size() == ms.size();
    for (std::size_t r = 0; ok && r < summary.size(); ++r) {
      const int cycles = static_cast<int>(summary.inputs(r, 1));
      ok = cycles == ms[r] && summary.inputs(r, 4) == cycles;
      errors[cycles].push_back(summary.inputs(r, 6));
    }
  }
  std::string detail = "median ensemble error by M:";
  double lo = 1.0, hi = 0.0;
  for (int m : ms) {
    if (errors[m].empty()) continue;
    const double v = median(errors[m]);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    detail += " " + std::to_string(m) + "=" + fmt("%.4f", v);
  }
  detail += ", spread " + fmt("%.4f", hi - lo);
  report(9, "varying M robustness", ok, detail, start);
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / ("snapens_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);
  try {
    criterion1();
    criterion2();
    criteria3to7();
    criterion8(work);
    criterion9(work);
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    ++failures;
  }
  fs::remove_all(work);
  std::printf("%s: %d criterion failure(s)\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
