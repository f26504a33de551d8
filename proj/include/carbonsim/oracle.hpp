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

#pragma once

#include "carbonsim/deta.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

/// Brute-force reference for the slot LP, plus batch kernels that compare the
/// two over many states. Each kernel has an OpenMP version and a serial one;
/// they return identical results and the serial one is what tests trust.
namespace carbonsim {

inline constexpr std::size_t kOracleMaxServers = 3;

struct OracleResult {
  AllocationDecision decision;  // objective is the oracle's own evaluation
  std::size_t evaluated = 0;    // grid points visited
  bool role_pruned = false;
};

/// Enumerates transfers e[i][j] = k * step * (harvest_i + battery_i) and
/// offloads x[i][j] = k * step * units_i over all integer k within the caps,
/// completing each point greedily and keeping the least-emission one. When
/// the full grid is too large (three servers), only points where every server
/// is a pure exporter, pure importer or idle per flow type are visited; some
/// LP optimum always has that shape.
/// Throws ContractError for more than 3 servers or step outside (0, 0.25].
OracleResult solve_oracle(const SlotState& state, Policy policy, double grid_step);
OracleResult solve_oracle_serial(const SlotState& state, Policy policy, double grid_step);

struct RandomStateOptions {
  std::size_t min_servers = 2;
  std::size_t max_servers = 3;
  bool uniform_intensity = false;
  /// Equal compute cost everywhere and no server with spare renewable energy.
  bool symmetric = false;
};

/// Random slot problem with a system-wide energy deficit (total renewable at
/// most 60% of the least possible demand), so every optimum draws grid power.
SlotState random_slot_state(std::mt19937_64& engine, const RandomStateOptions& options = {});

/// K states drawn from one seed; state k depends only on (seed, k).
std::vector<SlotState> random_slot_states(std::size_t count, std::uint64_t seed, const RandomStateOptions& options = {});

struct GapReport {
  std::size_t states = 0;
  double max_relative_gap = 0.0;  // (oracle - lp) / lp
  std::size_t below_lp = 0;       // oracle beat the LP by more than 1e-9 relative
  std::vector<double> gaps;
};

GapReport oracle_gaps(const std::vector<SlotState>& states, Policy policy, double grid_step);
GapReport oracle_gaps_serial(const std::vector<SlotState>& states, Policy policy, double grid_step);

struct DominanceReport {
  std::size_t states = 0;
  std::size_t violations = 0;  // any nesting broken by more than the tolerance
  double worst_excess = 0.0;   // gCO2e
};

/// DETA <= DET <= Baseline and DETA <= DAT <= Baseline on every state.
DominanceReport check_dominance(const std::vector<SlotState>& states, double tolerance = 1e-9);
DominanceReport check_dominance_serial(const std::vector<SlotState>& states, double tolerance = 1e-9);

}  // namespace carbonsim
