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

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace carbonsim {

/// Point of a step-function intensity series: the value holds from \p slot
/// until the next point. Slots before the first point take the first value.
struct IntensityPoint {
  std::int64_t slot = 0;
  double gco2_per_kwh = 0.0;

  bool operator==(const IntensityPoint&) const = default;
};

using IntensitySeries = std::vector<IntensityPoint>;

double intensity_at(const IntensitySeries& series, std::int64_t slot);
double series_mean(const IntensitySeries& series);

enum class LifecycleStage { Preparation, Development, Application, Recycling };

/// The three stages carried in reports. Recycling is kept in the enum but
/// never recorded.
inline constexpr std::array<LifecycleStage, 3> kReportedStages = {
    LifecycleStage::Preparation, LifecycleStage::Development, LifecycleStage::Application};

std::string to_string(LifecycleStage stage);
LifecycleStage stage_from_string(const std::string& name);

/// Scope-2 emissions in grams: energy (kWh) x intensity (gCO2e/kWh).
/// Throws ContractError on negative input.
double emissions(double energy_kwh, double intensity_gco2_per_kwh);

struct EnergyBySource {
  double grid = 0.0;
  double renewable = 0.0;
  double battery_from_renewable = 0.0;

  [[nodiscard]] double total() const { return grid + renewable + battery_from_renewable; }
};

struct LedgerKey {
  std::string server_id;
  LifecycleStage stage = LifecycleStage::Development;
  std::int64_t slot = 0;

  auto operator<=>(const LedgerKey&) const = default;
};

struct LedgerEntry {
  double kwh = 0.0;
  double grid_kwh = 0.0;
  double gco2e = 0.0;

  bool operator==(const LedgerEntry&) const = default;
};

/// Accumulates energy and emissions per (node, stage, slot). Nodes are edge
/// servers plus any network element (e.g. the backbone) with its own intensity.
class EmissionLedger {
 public:
  void register_node(const std::string& id, IntensitySeries intensity);
  [[nodiscard]] bool has_node(const std::string& id) const { return nodes_.contains(id); }
  [[nodiscard]] double intensity(const std::string& id, std::int64_t slot) const;

  /// Only the grid share produces emissions. Throws LookupError for an
  /// unregistered node and ContractError for negative energies or Recycling.
  void record(const std::string& node_id, LifecycleStage stage, std::int64_t slot, const EnergyBySource& energy);

  [[nodiscard]] const std::map<LedgerKey, LedgerEntry>& entries() const { return entries_; }
  [[nodiscard]] bool empty() const { return entries_.empty(); }
  [[nodiscard]] LedgerEntry total() const;
  [[nodiscard]] LedgerEntry total_for_node(const std::string& node_id) const;
  [[nodiscard]] LedgerEntry total_for_stage(LifecycleStage stage) const;

  /// `server,stage,slot,kwh,gco2e`
  [[nodiscard]] std::string to_csv() const;

  bool operator==(const EmissionLedger&) const = default;

 private:
  std::map<std::string, IntensitySeries> nodes_;
  std::map<LedgerKey, LedgerEntry> entries_;
};

struct StageTotals {
  LifecycleStage stage = LifecycleStage::Preparation;
  double kwh = 0.0;
  double gco2e = 0.0;
  double fraction = 0.0;  // of total emissions
};

struct StageReport {
  std::array<StageTotals, 3> stages;
  StageTotals recycling{LifecycleStage::Recycling, 0.0, 0.0, 0.0};
  double total_kwh = 0.0;
  double total_gco2e = 0.0;

  [[nodiscard]] const StageTotals& of(LifecycleStage stage) const;
};

/// Per-stage totals and emission fractions. An empty or zero-emission ledger
/// yields all-zero fractions.
StageReport stage_report(const EmissionLedger& ledger);

nlohmann::ordered_json to_json(const StageReport& report);

}  // namespace carbonsim
