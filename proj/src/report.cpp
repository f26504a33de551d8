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

#include "carbonsim/report.hpp"

#include "carbonsim/csv.hpp"
#include "carbonsim/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace carbonsim {

namespace {

std::string fixed(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

double reduction(double baseline, double value) {
  return baseline > 0.0 ? 100.0 * (baseline - value) / baseline : 0.0;
}

const std::vector<std::string> kComparisonHeader = {"server_count",           "policy",
                                                    "total_kwh",              "total_gco2e",
                                                    "reduction_pct",          "gco2e_without_backbone",
                                                    "reduction_without_backbone_pct"};

}  // namespace

nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json servers = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.server_ids.size(); ++i) {
    servers.push_back({{"id", r.server_ids[i]}, {"region", r.server_regions[i]}});
  }
  const auto& s = r.summary;
  const auto& a = r.audit;
  const double kwh = r.total_kwh();
  const double g = r.total_gco2e();
  nlohmann::ordered_json doc = {
      {"schema_version", kReportSchemaVersion},
      {"scenario", r.scenario_name},
      {"policy", to_string(r.policy)},
      {"seed", r.seed},
      {"servers", servers},
      {"rounds_used", r.rounds_used},
      {"final_accuracy", r.final_accuracy},
      {"status", r.target_reached ? "target_reached" : "target_not_reached"},
      {"totals",
       {{"kwh", kwh},
        {"gco2e", g},
        {"backbone_kwh", r.backbone_kwh()},
        {"backbone_gco2e", r.backbone_gco2e()},
        {"kwh_without_backbone", kwh - r.backbone_kwh()},
        {"gco2e_without_backbone", g - r.backbone_gco2e()}}},
      {"lifecycle", to_json(stage_report(r.ledger))},
      {"decisions",
       {{"energy_transferred_kwh", s.energy_transferred_kwh},
        {"energy_lost_kwh", s.energy_lost_kwh},
        {"units_offloaded", s.units_offloaded},
        {"grid_kwh", s.grid_kwh},
        {"renewable_kwh", s.renewable_kwh},
        {"overflow_kwh", s.overflow_kwh},
        {"transport_kwh", s.transport_kwh},
        {"sleeping_server_slots", s.sleeping_server_slots}}},
      {"slot_objectives_gco2e", r.slot_objectives},
      {"unoptimised_gco2e", r.unoptimised_gco2e},
      {"conservation",
       {{"harvested_kwh", a.harvested_kwh},
        {"grid_kwh", a.grid_kwh},
        {"battery_start_kwh", a.battery_start_kwh},
        {"battery_end_kwh", a.battery_end_kwh},
        {"consumed_kwh", a.consumed_kwh},
        {"trading_loss_kwh", a.trading_loss_kwh},
        {"charge_loss_kwh", a.charge_loss_kwh},
        {"overflow_kwh", a.overflow_kwh},
        {"model_terms_kwh", a.model_terms_kwh},
        {"energy_residual", a.energy_residual},
        {"harvest_residual", a.harvest_residual},
        {"ledger_residual", a.ledger_residual},
        {"emission_residual", a.emission_residual},
        {"passed", a.passed()}}},
      {"carbon_impact",
       "This simulated run accounts for " + fixed("%.6g", kwh) + " kWh and " + fixed("%.6g", g) + " gCO2e."}};
  return doc;
}

std::string report_text(const RunReport& report) { return to_json(report).dump(2) + "\n"; }

std::string stage_table(const RunReport& r) {
  const auto st = stage_report(r.ledger);
  std::ostringstream out;
  out << r.scenario_name << "  policy=" << to_string(r.policy) << "  servers=" << r.server_ids.size()
      << "  rounds=" << r.rounds_used << (r.target_reached ? "" : "  (target_not_reached)") << "\n";
  char head[96];
  std::snprintf(head, sizeof head, "%-12s%14s%14s%8s\n", "stage", "kWh", "gCO2e", "share");
  out << head;
  for (const auto& s : st.stages) {
    char line[128];
    std::snprintf(line, sizeof line, "%-12s%14.6g%14.6g%7.1f%%\n", to_string(s.stage).c_str(), s.kwh, s.gco2e,
                  100.0 * s.fraction);
    out << line;
  }
  char line[160];
  std::snprintf(line, sizeof line, "%-12s%14.6g%14.6g\n", "total", st.total_kwh, st.total_gco2e);
  out << line;
  if (r.backbone_gco2e() > 0.0) {
    std::snprintf(line, sizeof line, "backbone transport %.6g gCO2e (%.6g gCO2e without it)\n", r.backbone_gco2e(),
                  st.total_gco2e - r.backbone_gco2e());
    out << line;
  }
  std::snprintf(line, sizeof line, "carbon impact: %.6g kWh, %.6g gCO2e simulated\n", st.total_kwh, st.total_gco2e);
  out << line;
  return out.str();
}

std::optional<ComparisonRow> ComparisonTable::find(int server_count, Policy policy) const {
  for (const auto& r : rows) {
    if (r.server_count == server_count && r.policy == policy) return r;
  }
  return std::nullopt;
}

std::vector<int> ComparisonTable::server_counts() const {
  std::set<int> s;
  for (const auto& r : rows) s.insert(r.server_count);
  return {s.begin(), s.end()};
}

ComparisonTable build_comparison(const std::vector<SweepResult>& results) {
  struct Totals {
    double kwh, g, g_nb;
  };
  std::map<std::pair<int, Policy>, Totals> by_key;
  for (const auto& res : results) {
    const auto& r = res.report;
    const auto key = std::pair{static_cast<int>(r.server_ids.size()), r.policy};
    if (by_key.contains(key)) {
      throw ValidationError("comparison has two runs for " + std::to_string(key.first) + " servers, policy " +
                            to_string(key.second));
    }
    by_key[key] = {r.total_kwh(), r.total_gco2e(), r.total_gco2e() - r.backbone_gco2e()};
  }
  ComparisonTable t;
  for (const auto& [key, v] : by_key) {
    const auto base = by_key.find({key.first, Policy::Baseline});
    if (base == by_key.end()) {
      throw ValidationError("comparison lacks a Baseline run for " + std::to_string(key.first) + " servers");
    }
    t.rows.push_back(ComparisonRow{key.first, key.second, v.kwh, v.g, reduction(base->second.g, v.g), v.g_nb,
                                   reduction(base->second.g_nb, v.g_nb)});
  }
  return t;
}

std::string to_csv(const ComparisonTable& t) {
  std::string out;
  for (std::size_t k = 0; k < kComparisonHeader.size(); ++k) out += (k ? "," : "") + kComparisonHeader[k];
  out += "\n";
  for (const auto& r : t.rows) {
    out += std::to_string(r.server_count) + "," + to_string(r.policy) + "," + csv::format_double(r.total_kwh) + "," +
           csv::format_double(r.total_gco2e) + "," + csv::format_double(r.reduction_pct) + "," +
           csv::format_double(r.gco2e_without_backbone) + "," + csv::format_double(r.reduction_without_backbone_pct) +
           "\n";
  }
  return out;
}

ComparisonTable comparison_from_csv(std::string_view text, const std::string& context) {
  const auto table = csv::parse(text, context);
  csv::require_header(table, kComparisonHeader, context);
  ComparisonTable t;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    const std::string where = context + " row " + std::to_string(k + 2);
    ComparisonRow r;
    r.server_count = static_cast<int>(csv::to_int(row[0], where));
    try {
      r.policy = policy_from_string(row[1]);
    } catch (const std::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    r.total_kwh = csv::to_double(row[2], where);
    r.total_gco2e = csv::to_double(row[3], where);
    r.reduction_pct = csv::to_double(row[4], where);
    r.gco2e_without_backbone = csv::to_double(row[5], where);
    r.reduction_without_backbone_pct = csv::to_double(row[6], where);
    t.rows.push_back(r);
  }
  return t;
}

std::string comparison_summary(const ComparisonTable& t) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%8s%16s%10s%10s%10s\n", "servers", "baseline gCO2e", "DET %", "DAT %", "DETA %");
  out << line;
  for (int n : t.server_counts()) {
    auto pct = [&](Policy p) {
      const auto r = t.find(n, p);
      return r ? fixed("%10.2f", r->reduction_pct) : std::string(9, ' ') + "-";
    };
    const auto base = t.find(n, Policy::Baseline);
    std::snprintf(line, sizeof line, "%8d%16.6g", n, base ? base->total_gco2e : 0.0);
    out << line << pct(Policy::DET) << pct(Policy::DAT) << pct(Policy::DETA) << "\n";
  }
  return out.str();
}

void write_run_artifacts(const std::filesystem::path& dir, const RunReport& report) {
  std::filesystem::create_directories(dir);
  csv::write_atomic(dir / "ledger.csv", report.ledger.to_csv());
  if (!report.decisions.empty()) {
    const auto sub = dir / "decisions";
    std::filesystem::create_directories(sub);
    for (const auto& d : report.decisions) {
      nlohmann::ordered_json doc = {{"slot", d.slot},
                                    {"stage", to_string(d.stage)},
                                    {"round", d.round},
                                    {"sleeping", d.sleeping},
                                    {"decision", to_json(d.decision)}};
      csv::write_atomic(sub / ("slot_" + std::to_string(d.slot) + ".json"), doc.dump(2) + "\n");
    }
  }
  csv::write_atomic(dir / "report.json", report_text(report));
}

}  // namespace carbonsim
