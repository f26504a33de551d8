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

#include "carbonsim/deta.hpp"

#include "carbonsim/lp.hpp"

#include <algorithm>
#include <cmath>

namespace carbonsim {

double PairMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j);
  return s;
}

double PairMatrix::col_sum(std::size_t j) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, j);
  return s;
}

double PairMatrix::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

namespace {

constexpr double kCapTolerance = 1e-9;

bool allows_energy(Policy p) { return p == Policy::DET || p == Policy::DETA; }
bool allows_tasks(Policy p) { return p == Policy::DAT || p == Policy::DETA; }

double demand_kwh(const ServerSlot& s) { return s.fixed_kwh + s.compute_kwh_per_unit * s.task_units; }

}  // namespace

AllocationDecision allocate(const SlotState& state, Policy policy, PairMatrix e, PairMatrix x) {
  const std::size_t n = state.size();
  if (e.size() != n) e = PairMatrix(n);
  if (x.size() != n) x = PairMatrix(n);
  const double keep = 1.0 - state.trading_loss;

  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = state.servers[i];
    if (e(i, i) != 0.0 || x(i, i) != 0.0) throw ContractError("self transfers are not allowed");
    for (std::size_t j = 0; j < n; ++j) {
      if (e(i, j) < 0.0 || x(i, j) < 0.0) throw ContractError("negative transfer or offload");
      if (x(i, j) > 0.0 && !state.servers[j].accepts_offload) throw ContractError("offload to a server that is asleep");
    }
    const double ecap = state.alpha_energy * s.renewable();
    const double xcap = state.alpha_task * s.task_units;
    if (e.row_sum(i) > ecap + kCapTolerance * std::max(1.0, ecap)) throw ContractError("energy-transfer cap exceeded");
    if (x.row_sum(i) > xcap + kCapTolerance * std::max(1.0, xcap)) throw ContractError("offload cap exceeded");
  }
  if (!allows_energy(policy) && e.sum() != 0.0) throw ContractError(to_string(policy) + " cannot transfer energy");
  if (!allows_tasks(policy) && x.sum() != 0.0) throw ContractError(to_string(policy) + " cannot offload tasks");

  AllocationDecision d;
  d.policy = policy;
  d.grid_draw.assign(n, 0.0);
  d.renewable_local.assign(n, 0.0);
  d.harvest_used.assign(n, 0.0);
  d.battery_charge.assign(n, 0.0);
  d.battery_discharge.assign(n, 0.0);
  d.overflow.assign(n, 0.0);
  d.load_kwh.assign(n, 0.0);
  d.residual_units.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = state.servers[i];
    const double units = std::max(0.0, s.task_units - x.row_sum(i) + x.col_sum(i));
    const double load = s.fixed_kwh + s.compute_kwh_per_unit * units;
    const double received = keep * e.col_sum(i);
    const double exported = e.row_sum(i);
    double need = load - received;
    if (need < -kCapTolerance * std::max(1.0, load)) {
      throw ContractError("server receives more energy than it consumes");
    }
    need = std::max(need, 0.0);
    const double own = std::max(0.0, s.renewable() - exported);
    const double local = std::min(need, own);
    const double drawn = local + exported;
    const double from_harvest = std::min(s.harvest, drawn);
    const double discharge = std::min(s.battery.level, drawn - from_harvest);
    const double leftover = s.harvest - from_harvest;
    const double charge = std::min(leftover, battery_headroom(s.battery, discharge));

    d.residual_units[i] = units;
    d.load_kwh[i] = load;
    d.renewable_local[i] = local;
    d.grid_draw[i] = need - local;
    d.battery_discharge[i] = discharge;
    d.battery_charge[i] = charge;
    d.overflow[i] = leftover - charge;
    d.harvest_used[i] = from_harvest + charge;
    d.grid_emissions += d.grid_draw[i] * s.intensity;
  }
  d.energy_transfer = std::move(e);
  d.task_offload = std::move(x);
  d.transport_kwh = d.task_offload.sum() * state.transport_kwh_per_unit();
  d.transport_emissions = d.transport_kwh * state.backbone_intensity;
  d.objective = d.grid_emissions + d.transport_emissions;
  return d;
}

namespace {

// Scaled LP of one slot. Energies in units of energy_scale, work in units of
// unit_scale, costs in units of cost_scale so every coefficient is O(1).
struct SlotLp {
  lp::Problem problem;
  std::vector<int> g, w;
  std::vector<std::vector<int>> e, x;  // -1 where the variable is absent
  std::vector<int> e_vars, x_vars;
  double energy_scale = 1.0;
  double unit_scale = 1.0;
  double cost_scale = 1.0;
};

SlotLp build_lp(const SlotState& state, Policy policy) {
  const std::size_t n = state.size();
  SlotLp m;
  double es = 0.0;
  double us = 0.0;
  double c_max = 0.0;
  for (const auto& s : state.servers) {
    es = std::max({es, demand_kwh(s), s.renewable()});
    us = std::max(us, s.task_units);
    c_max = std::max(c_max, s.compute_kwh_per_unit);
  }
  es = std::max(es, c_max * us);
  m.energy_scale = es > 0.0 ? es : 1.0;
  m.unit_scale = us > 0.0 ? us : 1.0;
  double cs = state.transport_g_per_unit() * m.unit_scale / m.energy_scale;
  for (const auto& s : state.servers) cs = std::max(cs, s.intensity);
  m.cost_scale = cs > 0.0 ? cs : 1.0;

  auto& p = m.problem;
  m.g.resize(n);
  m.w.resize(n);
  m.e.assign(n, std::vector<int>(n, -1));
  m.x.assign(n, std::vector<int>(n, -1));
  for (std::size_t i = 0; i < n; ++i) {
    m.g[i] = p.add_variable(state.servers[i].intensity / m.cost_scale);
    m.w[i] = p.add_variable(0.0);
  }
  const double x_cost = state.transport_g_per_unit() * m.unit_scale / (m.energy_scale * m.cost_scale);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& si = state.servers[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (allows_energy(policy) && state.alpha_energy * si.renewable() > 0.0) {
        m.e[i][j] = p.add_variable(0.0);
        m.e_vars.push_back(m.e[i][j]);
      }
      if (allows_tasks(policy) && state.alpha_task * si.task_units > 0.0 && state.servers[j].accepts_offload) {
        m.x[i][j] = p.add_variable(x_cost);
        m.x_vars.push_back(m.x[i][j]);
      }
    }
  }

  const double keep = 1.0 - state.trading_loss;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& si = state.servers[i];
    const double cu = si.compute_kwh_per_unit * m.unit_scale / m.energy_scale;
    auto& bal = p.add_constraint(lp::Sense::Equal, demand_kwh(si) / m.energy_scale, "balance[" + std::to_string(i) + "]");
    bal.terms.emplace_back(m.g[i], 1.0);
    bal.terms.emplace_back(m.w[i], 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (m.e[j][i] >= 0) bal.terms.emplace_back(m.e[j][i], keep);
      if (cu != 0.0) {
        if (m.x[j][i] >= 0) bal.terms.emplace_back(m.x[j][i], -cu);
        if (m.x[i][j] >= 0) bal.terms.emplace_back(m.x[i][j], cu);
      }
    }

    auto& budget = p.add_constraint(lp::Sense::LessEqual, si.renewable() / m.energy_scale, "renewable[" + std::to_string(i) + "]");
    budget.terms.emplace_back(m.w[i], 1.0);
    std::vector<std::pair<int, double>> out_e, out_x;
    for (std::size_t j = 0; j < n; ++j) {
      if (m.e[i][j] >= 0) out_e.emplace_back(m.e[i][j], 1.0);
      if (m.x[i][j] >= 0) out_x.emplace_back(m.x[i][j], 1.0);
    }
    budget.terms.insert(budget.terms.end(), out_e.begin(), out_e.end());
    if (!out_e.empty()) {
      auto& cap = p.add_constraint(lp::Sense::LessEqual, state.alpha_energy * si.renewable() / m.energy_scale,
                                   "energy_cap[" + std::to_string(i) + "]");
      cap.terms = out_e;
    }
    if (!out_x.empty()) {
      auto& cap = p.add_constraint(lp::Sense::LessEqual, state.alpha_task * si.task_units / m.unit_scale,
                                   "task_cap[" + std::to_string(i) + "]");
      cap.terms = out_x;
    }
  }
  return m;
}

lp::Solution solve_stage(const lp::Problem& problem, Policy policy, const char* stage) {
  auto sol = lp::solve(problem);
  if (sol.status != lp::Status::Optimal) {
    throw SolverError(to_string(policy) + " " + stage + " LP " + lp::to_string(sol.status) + "\n" + lp::dump(problem));
  }
  return sol;
}

std::pair<PairMatrix, PairMatrix> extract(const SlotLp& m, const SlotState& state, const std::vector<double>& sol) {
  const std::size_t n = state.size();
  PairMatrix e(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (m.e[i][j] >= 0) e(i, j) = std::max(0.0, sol[m.e[i][j]]) * m.energy_scale;
      if (m.x[i][j] >= 0) x(i, j) = std::max(0.0, sol[m.x[i][j]]) * m.unit_scale;
      if (e(i, j) < 1e-13 * m.energy_scale) e(i, j) = 0.0;
      if (x(i, j) < 1e-13 * m.unit_scale) x(i, j) = 0.0;
    }
    // Pull rows that overshoot a cap by round-off back onto it.
    const auto& s = state.servers[i];
    const double ecap = state.alpha_energy * s.renewable();
    const double xcap = state.alpha_task * s.task_units;
    if (const double r = e.row_sum(i); r > ecap) {
      for (std::size_t j = 0; j < n; ++j) e(i, j) *= ecap / r;
    }
    if (const double r = x.row_sum(i); r > xcap) {
      for (std::size_t j = 0; j < n; ++j) x(i, j) *= xcap / r;
    }
  }
  // Received energy may overshoot a receiver's load by round-off; trim it.
  const double keep = 1.0 - state.trading_loss;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& s = state.servers[j];
    const double units = std::max(0.0, s.task_units - x.row_sum(j) + x.col_sum(j));
    const double load = s.fixed_kwh + s.compute_kwh_per_unit * units;
    const double in = keep * e.col_sum(j);
    if (in > load && in > 0.0) {
      for (std::size_t i = 0; i < n; ++i) e(i, j) *= load / in;
    }
  }
  return {std::move(e), std::move(x)};
}

}  // namespace

AllocationDecision solve(const SlotState& state, Policy policy) {
  const std::size_t n = state.size();
  if (policy == Policy::Baseline || n < 2) return allocate(state, policy, PairMatrix(n), PairMatrix(n));

  SlotLp m = build_lp(state, policy);
  if (m.e_vars.empty() && m.x_vars.empty()) return allocate(state, policy, PairMatrix(n), PairMatrix(n));

  const auto first = solve_stage(m.problem, policy, "emissions");
  auto [e1, x1] = extract(m, state, first.x);
  AllocationDecision best = allocate(state, policy, std::move(e1), std::move(x1));

  // Lexicographic tie-break: least transferred energy, then least offloaded work,
  // each without giving up more than round-off on the previous objective.
  constexpr double kSlack = 1e-10;
  auto tie_break = [&](const std::vector<int>& vars, const lp::Solution& prev, const std::vector<double>& prev_cost) {
    auto& keep_row = m.problem.add_constraint(lp::Sense::LessEqual, prev.objective + kSlack * std::max(1.0, std::abs(prev.objective)));
    for (int j = 0; j < m.problem.num_vars; ++j) {
      if (prev_cost[j] != 0.0) keep_row.terms.emplace_back(j, prev_cost[j]);
    }
    std::fill(m.problem.objective.begin(), m.problem.objective.end(), 0.0);
    for (int v : vars) m.problem.objective[v] = 1.0;
    return lp::solve(m.problem);
  };

  const auto cost1 = m.problem.objective;
  lp::Solution last = first;
  std::vector<double> last_cost = cost1;
  bool tied_up = false;
  for (const auto* vars : {&m.e_vars, &m.x_vars}) {
    if (vars->empty()) continue;
    auto sol = tie_break(*vars, last, last_cost);
    if (sol.status != lp::Status::Optimal) break;
    last_cost = m.problem.objective;
    last = std::move(sol);
    tied_up = true;
  }
  if (tied_up && last.x != first.x) {
    auto [e2, x2] = extract(m, state, last.x);
    auto tied = allocate(state, policy, std::move(e2), std::move(x2));
    if (tied.objective <= best.objective + 1e-12 * std::max(1.0, std::abs(best.objective))) best = std::move(tied);
  }
  return best;
}

std::vector<std::size_t> sleep_mask(const AllocationDecision& decision, const SlotState& state) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double scale = std::max(1.0, state.servers[i].task_units);
    if (decision.residual_units[i] <= 1e-12 * scale) out.push_back(i);
  }
  return out;
}

double decision_violation(const SlotState& state, const AllocationDecision& d) {
  const std::size_t n = state.size();
  const double keep = 1.0 - state.trading_loss;
  double worst = 0.0;
  auto bump = [&](double v) { worst = std::max(worst, v); };
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = state.servers[i];
    bump(std::abs(d.energy_transfer(i, i)));
    bump(std::abs(d.task_offload(i, i)));
    for (std::size_t j = 0; j < n; ++j) {
      bump(-d.energy_transfer(i, j));
      bump(-d.task_offload(i, j));
    }
    for (double v : {d.grid_draw[i], d.renewable_local[i], d.harvest_used[i], d.battery_charge[i],
                     d.battery_discharge[i], d.overflow[i]}) {
      bump(-v);
    }
    bump(d.energy_transfer.row_sum(i) - state.alpha_energy * s.renewable());
    bump(d.task_offload.row_sum(i) - state.alpha_task * s.task_units);
    const double units = s.task_units - d.task_offload.row_sum(i) + d.task_offload.col_sum(i);
    const double lhs = s.fixed_kwh + s.compute_kwh_per_unit * units;
    const double rhs = d.grid_draw[i] + d.harvest_used[i] + d.battery_discharge[i] + keep * d.energy_transfer.col_sum(i) -
                       d.energy_transfer.row_sum(i) - d.battery_charge[i];
    bump(std::abs(lhs - rhs));
    bump(std::abs(s.harvest - d.harvest_used[i] - d.overflow[i]));
    bump(d.battery_discharge[i] - s.battery.level);
    const double level = s.battery.level + s.battery.charge_efficiency * d.battery_charge[i] - d.battery_discharge[i];
    bump(level - s.battery.capacity);
    bump(-level);
  }
  return worst;
}

SlotState scale_intensities(SlotState state, double factor) {
  for (auto& s : state.servers) s.intensity *= factor;
  state.backbone_intensity *= factor;
  return state;
}

nlohmann::ordered_json to_json(const AllocationDecision& d) {
  using oj = nlohmann::ordered_json;
  auto matrix = [](const PairMatrix& m) {
    oj rows = oj::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
      oj row = oj::array();
      for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(i, j));
      rows.push_back(row);
    }
    return rows;
  };
  return {{"policy", to_string(d.policy)},
          {"energy_transfer_kwh", matrix(d.energy_transfer)},
          {"task_offload_units", matrix(d.task_offload)},
          {"grid_draw_kwh", d.grid_draw},
          {"battery_charge_kwh", d.battery_charge},
          {"battery_discharge_kwh", d.battery_discharge},
          {"overflow_kwh", d.overflow},
          {"grid_gco2e", d.grid_emissions},
          {"transport_gco2e", d.transport_emissions},
          {"objective_gco2e", d.objective}};
}

}  // namespace carbonsim
