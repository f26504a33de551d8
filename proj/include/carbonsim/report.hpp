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

#include "carbonsim/simulator.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace carbonsim {

inline constexpr int kReportSchemaVersion = 1;

/// Machine-readable run report. Identical runs give identical bytes.
nlohmann::ordered_json to_json(const RunReport& report);
std::string report_text(const RunReport& report);  // to_json, two-space indent, trailing newline

/// Per-stage kWh, gCO2e and share of emissions, plus the carbon-impact line.
std::string stage_table(const RunReport& report);

struct ComparisonRow {
  int server_count = 0;
  Policy policy = Policy::Baseline;
  double total_kwh = 0.0;
  double total_gco2e = 0.0;
  double reduction_pct = 0.0;  // (baseline - policy) / baseline, same server count
  double gco2e_without_backbone = 0.0;
  double reduction_without_backbone_pct = 0.0;

  bool operator==(const ComparisonRow&) const = default;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;

  [[nodiscard]] std::optional<ComparisonRow> find(int server_count, Policy policy) const;
  [[nodiscard]] std::vector<int> server_counts() const;

  bool operator==(const ComparisonTable&) const = default;
};

/// Rows per (server_count, policy) from sweep results; every server count
/// needs a Baseline run. Throws ValidationError otherwise.
ComparisonTable build_comparison(const std::vector<SweepResult>& results);

/// Columns: server_count,policy,total_kwh,total_gco2e,reduction_pct,
/// gco2e_without_backbone,reduction_without_backbone_pct
std::string to_csv(const ComparisonTable& table);
ComparisonTable comparison_from_csv(std::string_view text, const std::string& context);

/// Fixed-width reduction summary, one line per server count.
std::string comparison_summary(const ComparisonTable& table);

/// report.json, ledger.csv and, when decisions were kept, decisions/slot_<n>.json.
void write_run_artifacts(const std::filesystem::path& dir, const RunReport& report);

}  // namespace carbonsim
