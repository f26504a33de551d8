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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>

namespace carbonsim {

enum class HarvestProcess { Constant, TruncatedNormal, Trace };

struct HarvestParams {
  HarvestProcess process = HarvestProcess::TruncatedNormal;
  double mean = 0.0;    // kWh per slot
  double stddev = 0.0;  // kWh per slot
  std::optional<std::filesystem::path> trace_path;
  std::map<std::int64_t, double> trace;  // slot -> kWh, filled from trace_path at load

  bool operator==(const HarvestParams&) const = default;
};

/// One draw of the per-slot arrival. Constant returns the mean; truncated-normal
/// rejects negative draws of N(mean, stddev). Trace is not sampled here.
double harvest_step(const HarvestParams& params, std::mt19937_64& engine);

/// Per-server arrival stream. sample(slot) depends only on (seed, server_index,
/// slot), so runs replay bit-identically and slots may be queried in any order.
class HarvestStream {
 public:
  HarvestStream(HarvestParams params, std::uint64_t seed, std::uint64_t server_index);

  /// Throws LookupError("harvest trace exhausted at slot N") for trace gaps.
  [[nodiscard]] double sample(std::int64_t slot) const;

  [[nodiscard]] const HarvestParams& params() const { return params_; }

 private:
  HarvestParams params_;
  std::uint64_t seed_;
  std::uint64_t server_index_;
};

/// Mean of N(mean, stddev) conditioned on being >= 0.
double truncated_normal_mean(double mean, double stddev);

struct BatteryState {
  double level = 0.0;     // kWh
  double capacity = 0.0;  // kWh
  double charge_efficiency = 1.0;

  bool operator==(const BatteryState&) const = default;
};

struct BatteryStep {
  BatteryState state;
  double overflow = 0.0;  // offered charge (input side, kWh) that did not fit
};

/// level' = clamp(level + eff * charge - discharge, 0, capacity).
/// Throws ContractError on negative flows or discharge > level.
BatteryStep battery_step(const BatteryState& state, double charge, double discharge);

/// Charge that exactly fills the battery after \p discharge (input side, kWh).
double battery_headroom(const BatteryState& state, double discharge);

/// Reads a `server_id,slot,kwh` trace CSV and returns the rows of one server.
std::map<std::int64_t, double> load_harvest_trace(const std::filesystem::path& path, const std::string& server_id);

std::string to_string(HarvestProcess process);
HarvestProcess harvest_process_from_string(const std::string& name);

}  // namespace carbonsim
