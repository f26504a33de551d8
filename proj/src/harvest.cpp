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

#include "carbonsim/harvest.hpp"

#include "carbonsim/csv.hpp"
#include "carbonsim/errors.hpp"
#include "carbonsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace carbonsim {

double harvest_step(const HarvestParams& params, std::mt19937_64& engine) {
  switch (params.process) {
    case HarvestProcess::Constant:
      return params.mean;
    case HarvestProcess::TruncatedNormal: {
      if (params.stddev <= 0.0) return std::max(params.mean, 0.0);
      std::normal_distribution<double> normal(params.mean, params.stddev);
      // mean >= 0 is validated, so acceptance probability is at least 1/2.
      while (true) {
        const double draw = normal(engine);
        if (draw >= 0.0) return draw;
      }
    }
    case HarvestProcess::Trace:
      throw ContractError("trace harvest is sampled through HarvestStream");
  }
  return 0.0;
}

HarvestStream::HarvestStream(HarvestParams params, std::uint64_t seed, std::uint64_t server_index)
    : params_(std::move(params)), seed_(seed), server_index_(server_index) {}

double HarvestStream::sample(std::int64_t slot) const {
  if (params_.process == HarvestProcess::Trace) {
    const auto it = params_.trace.find(slot);
    if (it == params_.trace.end()) throw LookupError("harvest trace exhausted at slot " + std::to_string(slot));
    return it->second;
  }
  auto engine = make_engine(seed_, server_index_, StreamTag::Harvest, static_cast<std::uint64_t>(slot));
  return harvest_step(params_, engine);
}

double truncated_normal_mean(double mean, double stddev) {
  if (stddev <= 0.0) return std::max(mean, 0.0);
  const double alpha = -mean / stddev;
  const double pdf = std::exp(-0.5 * alpha * alpha) / std::sqrt(2.0 * std::numbers::pi);
  const double tail = 0.5 * std::erfc(alpha / std::numbers::sqrt2);
  return mean + stddev * pdf / tail;
}

BatteryStep battery_step(const BatteryState& state, double charge, double discharge) {
  if (charge < 0.0 || discharge < 0.0) throw ContractError("battery flows must be nonnegative");
  if (discharge > state.level) {
    throw ContractError("battery discharge " + std::to_string(discharge) + " kWh exceeds level " +
                        std::to_string(state.level) + " kWh");
  }
  BatteryStep out{state, 0.0};
  const double unclamped = state.level + state.charge_efficiency * charge - discharge;
  if (unclamped > state.capacity) {
    out.state.level = state.capacity;
    out.overflow = state.charge_efficiency > 0.0 ? (unclamped - state.capacity) / state.charge_efficiency : charge;
  } else {
    out.state.level = std::max(unclamped, 0.0);
  }
  return out;
}

double battery_headroom(const BatteryState& state, double discharge) {
  if (state.charge_efficiency <= 0.0) return 0.0;
  return std::max(0.0, state.capacity - state.level + discharge) / state.charge_efficiency;
}

std::map<std::int64_t, double> load_harvest_trace(const std::filesystem::path& path, const std::string& server_id) {
  const auto table = csv::read_file(path);
  csv::require_header(table, {"server_id", "slot", "kwh"}, path.string());
  std::map<std::int64_t, double> out;
  for (const auto& row : table.rows) {
    if (row[0] != server_id) continue;
    const auto slot = csv::to_int(row[1], path.string());
    const double kwh = csv::to_double(row[2], path.string());
    if (kwh < 0.0) throw ParseError(path.string() + ": negative harvest at slot " + row[1]);
    if (!out.emplace(slot, kwh).second) throw ParseError(path.string() + ": duplicate slot " + row[1] + " for " + server_id);
  }
  return out;
}

std::string to_string(HarvestProcess process) {
  switch (process) {
    case HarvestProcess::Constant: return "constant";
    case HarvestProcess::TruncatedNormal: return "truncated_normal";
    case HarvestProcess::Trace: return "trace";
  }
  return "unknown";
}

HarvestProcess harvest_process_from_string(const std::string& name) {
  if (name == "constant") return HarvestProcess::Constant;
  if (name == "truncated_normal") return HarvestProcess::TruncatedNormal;
  if (name == "trace") return HarvestProcess::Trace;
  throw ParseError("unknown harvest process '" + name + "'");
}

}  // namespace carbonsim
