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
#include "carbonsim/errors.hpp"
#include "carbonsim/harvest.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace carbonsim {

inline constexpr int kSchemaVersion = 1;

struct Region {
  std::string id;
  std::string label;
  IntensitySeries intensity;  // gCO2e/kWh by slot

  [[nodiscard]] double intensity_at(std::int64_t slot) const { return carbonsim::intensity_at(intensity, slot); }
  bool operator==(const Region&) const = default;
};

struct EdgeServer {
  std::string id;
  std::string region_id;  // empty until placed when placement is random
  double static_power_w = 0.0;
  double compute_kwh_per_unit = 0.0;  // one unit = one sample-epoch of local training
  double comm_kwh_per_byte = 0.0;
  BatteryState battery;
  HarvestParams harvest{HarvestProcess::Constant, 0.0, 0.0, {}, {}};

  bool operator==(const EdgeServer&) const = default;
};

enum class ModelKind { MLP, CNN, LSTM, Custom };

struct AccuracyPoint {
  int round = 0;
  double accuracy = 0.0;

  bool operator==(const AccuracyPoint&) const = default;
};

struct WorkloadSpec {
  ModelKind model_kind = ModelKind::MLP;
  int local_epochs = 1;  // E
  int batch_size = 1;    // B; descriptive only, never enters the energy terms
  std::int64_t total_samples = 0;
  std::int64_t model_bytes = 0;
  double sample_bytes = 0.0;  // payload shipped per offloaded sample
  double target_accuracy = 1.0;
  std::vector<AccuracyPoint> accuracy_curve;

  /// Piecewise-linear over the table, 0 before its first round, flat after its last.
  [[nodiscard]] double accuracy_at(int round) const;
  /// Rounds needed to reach \p target, or nullopt if the curve never does.
  [[nodiscard]] std::optional<int> rounds_to(double target) const;
  [[nodiscard]] double bytes_per_work_unit() const {
    return local_epochs > 0 ? sample_bytes / static_cast<double>(local_epochs) : 0.0;
  }

  bool operator==(const WorkloadSpec&) const = default;
};

enum class Policy { Baseline, DET, DAT, DETA };
inline constexpr std::array<Policy, 4> kAllPolicies = {Policy::Baseline, Policy::DET, Policy::DAT, Policy::DETA};

struct Placement {
  enum class Mode { Explicit, Random };
  Mode mode = Mode::Explicit;
  /// Random mode only: server 0 goes to the lowest mean-intensity region.
  bool anchor_lowest = false;

  bool operator==(const Placement&) const = default;
};

/// Energy terms outside the optimised training loop.
struct LifecycleConfig {
  double device_kwh_per_sample = 0.0;  // user device upload, Preparation
  double ran_kwh_per_sample = 0.0;     // radio access transport, Preparation
  std::int64_t inferences = 0;         // served during Application
  double kwh_per_inference = 0.0;
  int serving_slots = 1;

  bool operator==(const LifecycleConfig&) const = default;
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  std::vector<Region> regions;
  std::vector<EdgeServer> servers;
  WorkloadSpec workload;
  Policy policy = Policy::Baseline;
  double alpha_energy = 0.5;
  double alpha_task = 0.5;
  double trading_loss = 0.05;
  double backbone_kwh_per_byte = 0.0;
  std::optional<double> backbone_intensity;  // unset: mean of region intensities
  double slot_duration_s = 60.0;
  std::uint64_t seed = 0;
  int max_rounds = 100;
  Placement placement;
  LifecycleConfig lifecycle;
  bool deep_sleep = false;

  [[nodiscard]] const Region& region(const std::string& id) const;
  [[nodiscard]] double effective_backbone_intensity() const;

  bool operator==(const Scenario&) const = default;
};

enum class ViolationCode {
  SchemaVersion,
  NoRegions,
  DuplicateId,
  EmptySeries,
  NonIncreasingSlots,
  NegativeIntensity,
  NoServers,
  UnknownRegion,
  MissingRegion,
  NegativeValue,
  BatteryOverfull,
  BadEfficiency,
  BadHarvest,
  NonPositiveEpochs,
  NonPositiveBatch,
  BadTargetAccuracy,
  EmptyAccuracyCurve,
  NonMonotoneAccuracy,
  CapOutOfRange,
  TradingLossOutOfRange,
  NonPositiveSlotDuration,
  NonPositiveMaxRounds,
  BadLifecycle,
};

struct Violation {
  ViolationCode code;
  std::string path;  // JSON path, e.g. servers[0].region_id
  std::string message;
};

std::string to_string(ViolationCode code);

/// Every invariant of the scenario types; empty iff the scenario is valid.
std::vector<Violation> validate_scenario(const Scenario& scenario);

class ScenarioInvalid : public ValidationError {
 public:
  explicit ScenarioInvalid(std::vector<Violation> violations);
  [[nodiscard]] const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Strict parse (unknown keys rejected) of the versioned JSON schema. Relative
/// paths (intensity CSV, harvest traces) resolve against \p base_dir.
/// Throws ParseError, or ScenarioInvalid carrying every violation.
Scenario scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

/// Inverse of scenario_from_json; intensities are always written inline.
nlohmann::ordered_json to_json(const Scenario& scenario);

/// Rows of a `region_id,slot,intensity_gco2_per_kwh` CSV, in file order.
std::map<std::string, IntensitySeries> load_intensity_csv(const std::filesystem::path& path);

std::string to_string(Policy policy);
Policy policy_from_string(const std::string& name);
std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

}  // namespace carbonsim
