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

#include "carbonsim/harvest.hpp"
#include "carbonsim/scenario.hpp"

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace carbonsim {

/// Dense row-major square matrix for per-pair flows.
class PairMatrix {
 public:
  PairMatrix() = default;
  explicit PairMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  [[nodiscard]] std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  [[nodiscard]] double row_sum(std::size_t i) const;
  [[nodiscard]] double col_sum(std::size_t j) const;
  [[nodiscard]] double sum() const;

  bool operator==(const PairMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// What one server contributes to a slot problem. Everything the solver sees
/// about every server (complete information).
struct ServerSlot {
  double harvest = 0.0;            // kWh arriving this slot
  BatteryState battery;            // level at slot start
  double task_units = 0.0;         // local work units (sample-epochs)
  double fixed_kwh = 0.0;          // static + comm (or serving) demand
  double compute_kwh_per_unit = 0.0;
  double intensity = 0.0;          // gCO2e/kWh of the server's region this slot
  bool accepts_offload = true;

  [[nodiscard]] double renewable() const { return harvest + battery.level; }
};

struct SlotState {
  std::vector<ServerSlot> servers;
  double alpha_energy = 0.5;
  double alpha_task = 0.5;
  double trading_loss = 0.05;  // eta
  double backbone_kwh_per_byte = 0.0;
  double backbone_intensity = 0.0;
  double bytes_per_work_unit = 0.0;

  [[nodiscard]] std::size_t size() const { return servers.size(); }
  /// kWh of backbone transport per offloaded work unit.
  [[nodiscard]] double transport_kwh_per_unit() const { return bytes_per_work_unit * backbone_kwh_per_byte; }
  /// gCO2e of backbone transport per offloaded work unit.
  [[nodiscard]] double transport_g_per_unit() const { return transport_kwh_per_unit() * backbone_intensity; }
};

struct AllocationDecision {
  Policy policy = Policy::Baseline;
  PairMatrix energy_transfer;  // e[i][j], kWh debited at i
  PairMatrix task_offload;     // x[i][j], work units moved i -> j
  std::vector<double> grid_draw;
  std::vector<double> renewable_local;  // own harvest + battery consumed locally
  std::vector<double> harvest_used;     // consumed locally, exported, or charged
  std::vector<double> battery_charge;
  std::vector<double> battery_discharge;
  std::vector<double> overflow;  // harvest neither used nor storable
  std::vector<double> load_kwh;  // demand after offloading
  std::vector<double> residual_units;
  double grid_emissions = 0.0;       // gCO2e
  double transport_kwh = 0.0;
  double transport_emissions = 0.0;  // gCO2e
  double objective = 0.0;            // grid + transport gCO2e
};

/// Completes a decision from its transfer and offload matrices: each server
/// uses its own renewable energy first (harvest before battery), then grid;
/// leftover harvest charges the battery, the rest overflows.
/// Throws ContractError if a matrix breaks a cap or delivers more energy than
/// the receiver consumes.
AllocationDecision allocate(const SlotState& state, Policy policy, PairMatrix energy_transfer, PairMatrix task_offload);

/// Exact LP optimum of the policy's restricted problem:
///   min sum_i g_i CI_i + transport_g_per_unit * sum x
/// subject to per-server energy balance, renewable budget and both caps.
/// Ties go to the least total transferred energy, then the least offloaded work.
/// Throws SolverError with a constraint dump if the LP misbehaves.
AllocationDecision solve(const SlotState& state, Policy policy);

/// Servers left with no local work after offloading.
std::vector<std::size_t> sleep_mask(const AllocationDecision& decision, const SlotState& state);

/// Largest violation of any decision invariant (caps, balance, bounds); 0 if all hold.
double decision_violation(const SlotState& state, const AllocationDecision& decision);

SlotState scale_intensities(SlotState state, double factor);

nlohmann::ordered_json to_json(const AllocationDecision& decision);

}  // namespace carbonsim
