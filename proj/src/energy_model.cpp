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

#include "carbonsim/energy_model.hpp"

#include "carbonsim/csv.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

namespace carbonsim {

EnergyParams energy_params(const EdgeServer& server, double slot_duration_s, std::int64_t model_bytes) {
  return EnergyParams{server.static_power_w * slot_duration_s / kJoulesPerKwh, server.compute_kwh_per_unit,
                      2.0 * static_cast<double>(model_bytes) * server.comm_kwh_per_byte};
}

RoundEnergyBreakdown round_energy(const EnergyParams& params, std::string_view server_id, std::int64_t samples_assigned,
                                  int epochs) {
  if (samples_assigned < 0 || epochs < 0) throw ContractError("round_energy: negative samples or epochs");
  RoundEnergyBreakdown b;
  b.server_id = std::string(server_id);
  b.static_kwh = params.static_energy_per_slot;
  b.compute_kwh =
      params.train_energy_per_sample_epoch * static_cast<double>(samples_assigned) * static_cast<double>(epochs);
  b.comm_kwh = params.comm_energy_per_model_exchange;
  b.total_kwh = b.static_kwh + b.compute_kwh + b.comm_kwh;
  return b;
}

RoundEnergyBreakdown round_energy(const EdgeServer& server, const EnergyParams& params, std::int64_t samples_assigned,
                                  int epochs) {
  return round_energy(params, server.id, samples_assigned, epochs);
}

double predicted_training_energy(const EnergyParams& p, int servers, std::int64_t total_samples, int epochs,
                                 int rounds) {
  const double n = servers;
  const double r = rounds;
  return r * (n * (p.static_energy_per_slot + p.comm_energy_per_model_exchange) +
              static_cast<double>(total_samples) * epochs * p.train_energy_per_sample_epoch);
}

std::int64_t default_total_samples(ModelKind kind) {
  switch (kind) {
    case ModelKind::MLP:
    case ModelKind::CNN: return 60'000;
    case ModelKind::LSTM: return 3'564'579;
    case ModelKind::Custom: break;
  }
  throw CalibrationError("custom models need an explicit sample count");
}

CalibrationResult calibrate(const std::vector<CalibrationRow>& rows, std::int64_t total_samples) {
  if (rows.size() < 3) throw CalibrationError("calibration needs at least 3 rows");
  std::set<int> counts;
  bool any_energy = false;
  for (const auto& row : rows) {
    if (!counts.insert(row.servers).second) {
      throw CalibrationError("server count " + std::to_string(row.servers) + " appears twice");
    }
    if (row.servers < 1 || row.epochs < 1 || row.rounds < 1) throw CalibrationError("servers, E and rounds must be >= 1");
    if (row.total_kwh < 0.0) throw CalibrationError("negative measured energy");
    if (row.total_kwh > 0.0) any_energy = true;
  }
  if (!any_energy) throw CalibrationError("every row has zero energy; nothing to fit");

  // Columns: [static, train, comm]; each row divided by its measurement so
  // the fit minimises squared relative error.
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd a(m, 3);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    const double w = row.total_kwh > 0.0 ? 1.0 / row.total_kwh : 1.0;
    const double rn = static_cast<double>(row.rounds) * row.servers;
    a(i, 0) = w * rn;
    a(i, 1) = w * row.rounds * static_cast<double>(total_samples) * row.epochs;
    a(i, 2) = w * rn;
    b(i) = w * row.total_kwh;
  }

  // Exhaustive active-set NNLS: 3 unknowns, 7 nonempty supports. The
  // minimum-norm least-squares solution on each support is kept when
  // nonnegative; best residual wins, ties go to the smaller norm.
  Eigen::Vector3d best = Eigen::Vector3d::Zero();
  double best_res = b.squaredNorm();
  for (int mask = 1; mask < 8; ++mask) {
    std::vector<int> cols;
    for (int c = 0; c < 3; ++c) {
      if (mask & (1 << c)) cols.push_back(c);
    }
    Eigen::MatrixXd sub(m, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
    const Eigen::VectorXd z = sub.completeOrthogonalDecomposition().solve(b);
    if ((z.array() < -1e-15).any()) continue;
    Eigen::Vector3d full = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < cols.size(); ++k) full(cols[k]) = std::max(0.0, z(static_cast<Eigen::Index>(k)));
    const double res = (a * full - b).squaredNorm();
    const double tie = 1e-12 * b.squaredNorm();
    if (res < best_res - tie || (std::abs(res - best_res) <= tie && full.squaredNorm() < best.squaredNorm())) {
      best = full;
      best_res = res;
    }
  }
  // Static and comm share a column, so only their sum is determined.
  const double fixed = 0.5 * (best(0) + best(2));
  best(0) = fixed;
  best(2) = fixed;

  CalibrationResult out;
  out.params = EnergyParams{best(0), best(1), best(2)};
  for (const auto& row : rows) {
    const double pred = predicted_training_energy(out.params, row.servers, total_samples, row.epochs, row.rounds);
    const double rel = row.total_kwh > 0.0 ? (pred - row.total_kwh) / row.total_kwh : pred;
    out.predicted_kwh.push_back(pred);
    out.relative_residuals.push_back(rel);
    out.max_abs_residual = std::max(out.max_abs_residual, std::abs(rel));
  }
  return out;
}

CalibrationResult calibrate(const std::vector<CalibrationRow>& rows, ModelKind kind) {
  return calibrate(rows, default_total_samples(kind));
}

std::vector<CalibrationRow> load_calibration_table(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  const std::vector<std::string> base = {"model", "servers", "E", "B", "total_kwh", "co2_g"};
  auto with_rounds = base;
  with_rounds.push_back("rounds");
  if (table.header != base && table.header != with_rounds) csv::require_header(table, base, path.string());
  const bool has_rounds = table.header.size() == with_rounds.size();
  const auto ctx = path.string();
  std::vector<CalibrationRow> rows;
  for (const auto& r : table.rows) {
    CalibrationRow row;
    row.model = r[0];
    row.servers = static_cast<int>(csv::to_int(r[1], ctx));
    row.epochs = static_cast<int>(csv::to_int(r[2], ctx));
    row.batch = static_cast<int>(csv::to_int(r[3], ctx));
    row.total_kwh = csv::to_double(r[4], ctx);
    row.co2_g = csv::to_double(r[5], ctx);
    row.rounds = has_rounds ? static_cast<int>(csv::to_int(r[6], ctx)) : 1;
    rows.push_back(row);
  }
  return rows;
}

std::vector<CalibrationRow> rows_for_model(const std::vector<CalibrationRow>& rows, std::string_view model) {
  std::vector<CalibrationRow> out;
  std::copy_if(rows.begin(), rows.end(), std::back_inserter(out), [&](const auto& r) { return r.model == model; });
  return out;
}

nlohmann::ordered_json to_json(const EnergyParams& p) {
  return {{"static_energy_per_slot_kwh", p.static_energy_per_slot},
          {"train_energy_per_sample_epoch_kwh", p.train_energy_per_sample_epoch},
          {"comm_energy_per_model_exchange_kwh", p.comm_energy_per_model_exchange}};
}

nlohmann::ordered_json to_json(const CalibrationResult& result, const std::vector<CalibrationRow>& rows) {
  nlohmann::ordered_json residuals = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    residuals.push_back({{"servers", rows[i].servers},
                         {"rounds", rows[i].rounds},
                         {"measured_kwh", rows[i].total_kwh},
                         {"predicted_kwh", result.predicted_kwh[i]},
                         {"relative_residual", result.relative_residuals[i]}});
  }
  return {{"params", to_json(result.params)}, {"max_abs_relative_residual", result.max_abs_residual}, {"rows", residuals}};
}

}  // namespace carbonsim
