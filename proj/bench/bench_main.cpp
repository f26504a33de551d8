/*
 * Copyright 2026 The carbonsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "carbonsim/oracle.hpp"
#include "carbonsim/scenario.hpp"
#include "carbonsim/simulator.hpp"

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

namespace {

using namespace carbonsim;

const std::vector<SlotState>& oracle_states() {
  static const auto states = random_slot_states(8, 11);
  return states;
}

const std::vector<SlotState>& dominance_states() {
  static const auto states = random_slot_states(2000, 5, {2, 6});
  return states;
}

void BM_OracleSerial(benchmark::State& bs) {
  for (auto _ : bs) benchmark::DoNotOptimize(oracle_gaps_serial(oracle_states(), Policy::DETA, 0.05));
}

void BM_OracleParallel(benchmark::State& bs) {
  for (auto _ : bs) benchmark::DoNotOptimize(oracle_gaps(oracle_states(), Policy::DETA, 0.05));
}

void BM_DominanceSerial(benchmark::State& bs) {
  for (auto _ : bs) benchmark::DoNotOptimize(check_dominance_serial(dominance_states()));
}

void BM_DominanceParallel(benchmark::State& bs) {
  for (auto _ : bs) benchmark::DoNotOptimize(check_dominance(dominance_states()));
}

Scenario sweep_scenario() {
  return load_scenario(std::string(CARBONSIM_SOURCE_DIR) + "/scenarios/deta_reference_10servers.json");
}

std::vector<SweepAxis> sweep_axes() {
  return {{"server_count", {"2", "4", "6", "8", "10"}}, {"policy", {"Baseline", "DETA"}}};
}

void BM_SweepSerial(benchmark::State& bs) {
  const auto sc = sweep_scenario();
  for (auto _ : bs) benchmark::DoNotOptimize(sweep_serial(sc, sweep_axes()));
}

void BM_SweepParallel(benchmark::State& bs) {
  const auto sc = sweep_scenario();
  const int jobs = static_cast<int>(bs.range(0));
  for (auto _ : bs) benchmark::DoNotOptimize(sweep(sc, sweep_axes(), jobs));
}

}  // namespace

BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DominanceSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DominanceParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
