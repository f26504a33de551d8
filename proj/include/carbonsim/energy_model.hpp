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

#include "carbonsim/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace carbonsim {

inline constexpr double kJoulesPerKwh = 3.6e6;

/// Affine per-server energy model of one training round (= one slot).
struct EnergyParams {
  double static_energy_per_slot = 0.0;          // kWh, static_power x slot_duration
  double train_energy_per_sample_epoch = 0.0;   // kWh per work unit
  double comm_energy_per_model_exchange = 0.0;  // kWh, upload + download of the model

  bool operator==(const EnergyParams&) const = default;
};

struct RoundEnergyBreakdown {
  std::string server_id;
  double static_kwh = 0.0;
  double compute_kwh = 0.0;
  double comm_kwh = 0.0;
  double total_kwh = 0.0;
};

EnergyParams energy_params(const EdgeServer& server, double slot_duration_s, std::int64_t model_bytes);

/// Static is charged every round regardless of load; compute is linear in
/// samples x epochs; comm once per round. Throws ContractError for negative samples.
RoundEnergyBreakdown round_energy(const EnergyParams& params, std::string_view server_id, std::int64_t samples_assigned,
                                  int epochs);
RoundEnergyBreakdown round_energy(const EdgeServer& server, const EnergyParams& params, std::int64_t samples_assigned,
                                  int epochs);

/// One row of a calibration table (`model,servers,E,B,total_kwh,co2_g`,
/// optional trailing `rounds`).
struct CalibrationRow {
  std::string model;
  int servers = 1;
  int epochs = 1;
  int batch = 1;
  double total_kwh = 0.0;
  double co2_g = 0.0;
  int rounds = 1;
};

struct CalibrationResult {
  EnergyParams params;
  std::vector<double> predicted_kwh;
  std::vector<double> relative_residuals;  // (predicted - measured) / measured
  double max_abs_residual = 0.0;
};

/// Whole-system training energy of N servers over \p rounds rounds, data split evenly.
double predicted_training_energy(const EnergyParams& params, int servers, std::int64_t total_samples, int epochs,
                                 int rounds);

/// Dataset size the model kind trains on (MNIST for MLP/CNN, Shakespeare
/// characters for LSTM). Custom models must pass samples explicitly.
std::int64_t default_total_samples(ModelKind kind);

/// Nonnegative least squares on relative residuals. Static and per-round
/// communication energy scale identically with N, so only their sum is
/// identified; the minimum-norm split is returned. Throws CalibrationError
/// on fewer than 3 rows, repeated server counts, or all-zero energies.
CalibrationResult calibrate(const std::vector<CalibrationRow>& rows, std::int64_t total_samples);
CalibrationResult calibrate(const std::vector<CalibrationRow>& rows, ModelKind kind);

std::vector<CalibrationRow> load_calibration_table(const std::filesystem::path& path);
std::vector<CalibrationRow> rows_for_model(const std::vector<CalibrationRow>& rows, std::string_view model);

nlohmann::ordered_json to_json(const EnergyParams& params);
nlohmann::ordered_json to_json(const CalibrationResult& result, const std::vector<CalibrationRow>& rows);

}  // namespace carbonsim
