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

#include "carbonsim/carbon_ledger.hpp"

#include "carbonsim/csv.hpp"
#include "carbonsim/errors.hpp"

#include <algorithm>

namespace carbonsim {

double intensity_at(const IntensitySeries& series, std::int64_t slot) {
  if (series.empty()) throw LookupError("empty intensity series");
  auto it = std::upper_bound(series.begin(), series.end(), slot,
                             [](std::int64_t s, const IntensityPoint& p) { return s < p.slot; });
  if (it == series.begin()) return series.front().gco2_per_kwh;
  return std::prev(it)->gco2_per_kwh;
}

double series_mean(const IntensitySeries& series) {
  if (series.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : series) sum += p.gco2_per_kwh;
  return sum / static_cast<double>(series.size());
}

std::string to_string(LifecycleStage stage) {
  switch (stage) {
    case LifecycleStage::Preparation: return "Preparation";
    case LifecycleStage::Development: return "Development";
    case LifecycleStage::Application: return "Application";
    case LifecycleStage::Recycling: return "Recycling";
  }
  return "unknown";
}

LifecycleStage stage_from_string(const std::string& name) {
  for (auto s : {LifecycleStage::Preparation, LifecycleStage::Development, LifecycleStage::Application,
                 LifecycleStage::Recycling}) {
    if (to_string(s) == name) return s;
  }
  throw ParseError("unknown lifecycle stage '" + name + "'");
}

double emissions(double energy_kwh, double intensity_gco2_per_kwh) {
  if (energy_kwh < 0.0 || intensity_gco2_per_kwh < 0.0) {
    throw ContractError("emissions() needs nonnegative energy and intensity");
  }
  return energy_kwh * intensity_gco2_per_kwh;
}

void EmissionLedger::register_node(const std::string& id, IntensitySeries intensity) {
  if (intensity.empty()) throw ContractError("node '" + id + "' registered without intensity");
  nodes_[id] = std::move(intensity);
}

double EmissionLedger::intensity(const std::string& id, std::int64_t slot) const {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) throw LookupError("unknown ledger node '" + id + "'");
  return intensity_at(it->second, slot);
}

void EmissionLedger::record(const std::string& node_id, LifecycleStage stage, std::int64_t slot,
                            const EnergyBySource& energy) {
  if (energy.grid < 0.0 || energy.renewable < 0.0 || energy.battery_from_renewable < 0.0) {
    throw ContractError("negative energy recorded for '" + node_id + "'");
  }
  if (stage == LifecycleStage::Recycling) throw ContractError("the Recycling stage is not simulated");
  const double ci = intensity(node_id, slot);
  auto& entry = entries_[LedgerKey{node_id, stage, slot}];
  entry.kwh += energy.total();
  entry.grid_kwh += energy.grid;
  entry.gco2e += emissions(energy.grid, ci);
}

LedgerEntry EmissionLedger::total() const {
  LedgerEntry sum;
  for (const auto& [key, e] : entries_) {
    sum.kwh += e.kwh;
    sum.grid_kwh += e.grid_kwh;
    sum.gco2e += e.gco2e;
  }
  return sum;
}

LedgerEntry EmissionLedger::total_for_node(const std::string& node_id) const {
  LedgerEntry sum;
  for (const auto& [key, e] : entries_) {
    if (key.server_id != node_id) continue;
    sum.kwh += e.kwh;
    sum.grid_kwh += e.grid_kwh;
    sum.gco2e += e.gco2e;
  }
  return sum;
}

LedgerEntry EmissionLedger::total_for_stage(LifecycleStage stage) const {
  LedgerEntry sum;
  for (const auto& [key, e] : entries_) {
    if (key.stage != stage) continue;
    sum.kwh += e.kwh;
    sum.grid_kwh += e.grid_kwh;
    sum.gco2e += e.gco2e;
  }
  return sum;
}

std::string EmissionLedger::to_csv() const {
  std::string out = "server,stage,slot,kwh,gco2e\n";
  for (const auto& [key, e] : entries_) {
    out += key.server_id + ',' + to_string(key.stage) + ',' + std::to_string(key.slot) + ',' +
           csv::format_double(e.kwh) + ',' + csv::format_double(e.gco2e) + '\n';
  }
  return out;
}

const StageTotals& StageReport::of(LifecycleStage stage) const {
  for (const auto& s : stages) {
    if (s.stage == stage) return s;
  }
  return recycling;
}

StageReport stage_report(const EmissionLedger& ledger) {
  StageReport report;
  for (std::size_t i = 0; i < kReportedStages.size(); ++i) {
    const auto t = ledger.total_for_stage(kReportedStages[i]);
    report.stages[i] = StageTotals{kReportedStages[i], t.kwh, t.gco2e, 0.0};
    report.total_kwh += t.kwh;
    report.total_gco2e += t.gco2e;
  }
  if (report.total_gco2e > 0.0) {
    for (auto& s : report.stages) s.fraction = s.gco2e / report.total_gco2e;
  }
  return report;
}

nlohmann::ordered_json to_json(const StageReport& report) {
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const auto& s : report.stages) {
    stages.push_back({{"stage", to_string(s.stage)}, {"kwh", s.kwh}, {"gco2e", s.gco2e}, {"fraction", s.fraction}});
  }
  return {{"stages", stages},
          {"recycling", {{"kwh", 0.0}, {"gco2e", 0.0}, {"included_in_fractions", false}}},
          {"total_kwh", report.total_kwh},
          {"total_gco2e", report.total_gco2e}};
}

}  // namespace carbonsim
