/*
 * Copyright 2026 The es-unicycle Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Serial reference vs OpenMP sweeps.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "esu/analysis.hpp"
#include "esu/scenario.hpp"

using namespace esu;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_OmegaStudy(benchmark::State& state) {
  auto setup = find_scenario("sim-moving")->setup(LawKind::Cont2);
  setup.config.t_end = 20.0;
  const std::vector<int> ks{10, 20, 40, 80};
  for (auto _ : state) benchmark::DoNotOptimize(omega_convergence_study(setup, ks, mode(state)));
}

void BM_VolterraStudy(benchmark::State& state) {
  const auto setup = find_scenario("fixed-origin")->setup(LawKind::Cont2);
  const std::vector<double> omegas{50, 100, 200, 400, 800};
  for (auto _ : state) benchmark::DoNotOptimize(volterra_scaling_study(setup, omegas, mode(state)));
}

void BM_ProbeStudy(benchmark::State& state) {
  const auto setup = find_scenario("sim-moving")->setup(LawKind::Cont1);
  ProbeOptions opt;
  opt.omega_grid = {50, 100};
  opt.horizon = 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(practical_stability_probe(setup, opt, mode(state)));
}

void BM_OracleResidual(benchmark::State& state) {
  const auto law = make_builtin_law(LawKind::Cont4, 1.0, 10, 5.0);
  const CostFunction cost(1.0, TargetPath::line_sine());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Vec2> states;
  for (int i = 0; i < 200; ++i) states.push_back({U(rng), 0.5 + U(rng)});
  for (auto _ : state) benchmark::DoNotOptimize(oracle_equivalence_residual(law, cost, states, 0.0, mode(state)));
}

}  // namespace

BENCHMARK(BM_OmegaStudy)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VolterraStudy)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProbeStudy)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleResidual)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
