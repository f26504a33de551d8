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

#include "carbonsim/carbon_ledger.hpp"
#include "carbonsim/deta.hpp"
#include "carbonsim/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace carbonsim {

/// Ledger node that carries backbone transport of offloaded work.
inline constexpr const char* kBackboneNode = "backbone";

struct RunOptions {
  std::optional<Policy> policy;  // overrides scenario.policy
  bool keep_decisions = false;
};

struct SlotDecision {
  std::int64_t slot = 0;
  LifecycleStage stage = LifecycleStage::Development;
  int round = 0;  // 0 outside Development
  std::vector<std::size_t> sleeping;
  AllocationDecision decision;
};

struct DecisionSummary {
  double energy_transferred_kwh = 0.0;  // debited at exporters
  double energy_lost_kwh = 0.0;         // trading loss
  double units_offloaded = 0.0;
  double grid_kwh = 0.0;
  double renewable_kwh = 0.0;  // consumed locally or received
  double overflow_kwh = 0.0;
  double transport_kwh = 0.0;
  std::size_t sleeping_server_slots = 0;
};

/// Energy bookkeeping of a whole run. Every residual should be ~0.
struct ConservationAudit {
  double harvested_kwh = 0.0;
  double grid_kwh = 0.0;  // servers and backbone
  double battery_start_kwh = 0.0;
  double battery_end_kwh = 0.0;
  double consumed_kwh = 0.0;  // ledger total
  double trading_loss_kwh = 0.0;
  double charge_loss_kwh = 0.0;
  double overflow_kwh = 0.0;
  double model_terms_kwh = 0.0;  // static + compute + comm + upload + serving + transport

  double energy_residual = 0.0;    // sources minus sinks, whole run
  double harvest_residual = 0.0;   // worst per-slot |harvest - used - overflow|
  double ledger_residual = 0.0;    // ledger kWh minus model terms
  double emission_residual = 0.0;  // ledger gCO2e minus slot objectives and unoptimised terms

  [[nodiscard]] double worst_energy_residual() const;
  [[nodiscard]] bool passed(double tolerance_kwh = 1e-9) const;
};

struct RunReport {
  std::string scenario_name;
  Policy policy = Policy::Baseline;
  std::uint64_t seed = 0;
  std::vector<std::string> server_ids;
  std::vector<std::string> server_regions;
  EmissionLedger ledger;
  int rounds_used = 0;
  double final_accuracy = 0.0;
  bool target_reached = false;
  std::vector<double> slot_objectives;  // gCO2e, one per optimised slot
  double unoptimised_gco2e = 0.0;       // Preparation upload
  DecisionSummary summary;
  ConservationAudit audit;
  std::vector<SlotDecision> decisions;  // only with RunOptions::keep_decisions

  [[nodiscard]] double total_kwh() const { return ledger.total().kwh; }
  [[nodiscard]] double total_gco2e() const { return ledger.total().gco2e; }
  [[nodiscard]] double backbone_kwh() const;
  [[nodiscard]] double backbone_gco2e() const;
};

/// Region of every server: explicit ids, or a seeded uniform draw per server
/// (server 0 pinned to the lowest mean-intensity region with anchor_lowest).
std::vector<std::string> assign_regions(const Scenario& scenario);

/// Samples per server: an even split, remainder to the lowest index.
std::vector<std::int64_t> split_samples(std::int64_t total, std::size_t servers);

/// Preparation (slot 0), one Development slot per round until the target
/// accuracy or max_rounds, then the serving slots. Deterministic in the seed.
/// Throws ScenarioInvalid for an invalid scenario.
RunReport run(const Scenario& scenario, const RunOptions& options = {});

/// Fields accepted by apply_override and sweeps.
const std::vector<std::string>& sweep_fields();

/// Sets one scenario field from text. server_count keeps the first N servers.
/// Throws ValidationError for an unknown field or unusable value.
void apply_override(Scenario& scenario, const std::string& field, const std::string& value);

struct SweepAxis {
  std::string field;
  std::vector<std::string> values;
};

struct SweepResult {
  std::vector<std::pair<std::string, std::string>> assignment;
  std::uint64_t seed = 0;
  RunReport report;
};

/// Runs of the cartesian product of the axes, first axis outermost. server_count
/// and policy keep the base seed so their runs nest; every other combination
/// gets a seed derived from the base seed and its index.
std::vector<SweepResult> sweep(const Scenario& scenario, const std::vector<SweepAxis>& axes, int jobs = 1,
                               const RunOptions& options = {});
std::vector<SweepResult> sweep_serial(const Scenario& scenario, const std::vector<SweepAxis>& axes,
                                      const RunOptions& options = {});

}  // namespace carbonsim
