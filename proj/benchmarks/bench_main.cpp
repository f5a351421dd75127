// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "snapens/data.hpp"
#include "snapens/ensemble.hpp"
#include "snapens/nn.hpp"
#include "snapens/trainer.hpp"

namespace {

using namespace snapens;

Dataset spirals() {
  const Split s = split(gen_spirals(2000, 1.5, 0.08, 1), 0.5, 2);
  return normalize(s.train, s.test).train;
}

void BM_Forward(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  const ModelSpec spec{{2, width, width, 2}};
  const ParamVector p = init_params(spec, 1);
  const Batch batch = spirals().gather(std::vector<std::size_t>(64, 0));
  for (auto _ : state) benchmark::DoNotOptimize(forward(spec, p, batch.inputs));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(64)->Arg(128);

void BM_LossAndGrad(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  const ModelSpec spec{{2, width, width, 2}};
  const ParamVector p = init_params(spec, 1);
  const Dataset data = spirals();
  std::vector<std::size_t> idx(64);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const Batch batch = data.gather(idx);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_grad(spec, p, batch));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_LossAndGrad)->Arg(32)->Arg(64)->Arg(128);

void BM_TrainEpoch(benchmark::State& state) {
  const Dataset data = spirals();
  TrainConfig c;
  c.model = ModelSpec{{2, 64, 64, 2}};
  c.epochs = 1;
  c.batch_size = 64;
  c.mode = TrainMode::kSingle;
  c.schedule = ScheduleSpec::step(0.1, total_iterations(1, data.size(), 64));
  for (auto _ : state) benchmark::DoNotOptimize(train(c, data));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

void BM_EnsembleAverage(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  std::vector<PredictionMatrix> members;
  for (std::size_t k = 0; k < m; ++k) members.push_back({Matrix(1000, 10, 0.1), {}});
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_average(members));
}
BENCHMARK(BM_EnsembleAverage)->Arg(2)->Arg(6)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
