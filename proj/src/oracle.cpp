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

#include "carbonsim/oracle.hpp"

#include "carbonsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace carbonsim {

namespace {

constexpr double kGridBudget = 4e6;

enum class Flow { Energy, Task };

struct FlowOption {
  std::vector<int> steps;  // n*n grid multiples
  std::vector<double> out;
  std::vector<double> in;  // energy: after trading loss; tasks: units received
  double total = 0.0;
};

struct FlowGrid {
  std::size_t n = 0;
  double step = 0.0;
  std::vector<double> base;   // per source: renewable or units
  std::vector<int> max_steps;  // per source cap in grid steps
  std::vector<std::vector<bool>> target;
};

FlowGrid make_grid(const SlotState& state, Flow flow, Policy policy, double step) {
  const bool allowed = flow == Flow::Energy ? (policy == Policy::DET || policy == Policy::DETA)
                                            : (policy == Policy::DAT || policy == Policy::DETA);
  const double alpha = flow == Flow::Energy ? state.alpha_energy : state.alpha_task;
  FlowGrid g;
  g.n = state.size();
  g.step = step;
  g.base.resize(g.n);
  g.max_steps.assign(g.n, 0);
  g.target.assign(g.n, std::vector<bool>(g.n, false));
  for (std::size_t i = 0; i < g.n; ++i) {
    const auto& s = state.servers[i];
    g.base[i] = flow == Flow::Energy ? s.renewable() : s.task_units;
    if (allowed && g.base[i] > 0.0) g.max_steps[i] = static_cast<int>(std::floor(alpha / step + 1e-9));
    for (std::size_t j = 0; j < g.n; ++j) {
      g.target[i][j] = i != j && (flow == Flow::Energy || state.servers[j].accepts_offload);
    }
  }
  return g;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double full_count(const FlowGrid& g) {
  double count = 1.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    const int d = static_cast<int>(std::count(g.target[i].begin(), g.target[i].end(), true));
    if (g.max_steps[i] > 0 && d > 0) count *= binomial(g.max_steps[i] + d, d);
  }
  return count;
}

// All ways for each source to spread at most max_steps over the allowed targets.
void enumerate(const FlowGrid& g, const std::vector<std::vector<bool>>& targets, std::size_t src, std::size_t dst,
               int remaining, std::vector<int>& steps, std::set<std::vector<int>>& out) {
  if (src == g.n) {
    out.insert(steps);
    return;
  }
  if (dst == g.n) {
    enumerate(g, targets, src + 1, 0, src + 1 < g.n ? g.max_steps[src + 1] : 0, steps, out);
    return;
  }
  if (!targets[src][dst] || remaining == 0) {
    enumerate(g, targets, src, dst + 1, remaining, steps, out);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    steps[src * g.n + dst] = k;
    enumerate(g, targets, src, dst + 1, remaining - k, steps, out);
  }
  steps[src * g.n + dst] = 0;
}

std::set<std::vector<int>> grid_points(const FlowGrid& g, bool role_pruned) {
  std::set<std::vector<int>> points;
  std::vector<int> steps(g.n * g.n, 0);
  if (!role_pruned) {
    enumerate(g, g.target, 0, 0, g.n ? g.max_steps[0] : 0, steps, points);
    return points;
  }
  // Role patterns: 0 idle, 1 exporter, 2 importer. Exporters only feed importers.
  std::size_t patterns = 1;
  for (std::size_t i = 0; i < g.n; ++i) patterns *= 3;
  for (std::size_t code = 0; code < patterns; ++code) {
    std::vector<int> role(g.n);
    std::size_t c = code;
    for (std::size_t i = 0; i < g.n; ++i, c /= 3) role[i] = static_cast<int>(c % 3);
    auto targets = g.target;
    for (std::size_t i = 0; i < g.n; ++i) {
      for (std::size_t j = 0; j < g.n; ++j) targets[i][j] = targets[i][j] && role[i] == 1 && role[j] == 2;
    }
    enumerate(g, targets, 0, 0, g.n ? g.max_steps[0] : 0, steps, points);
  }
  return points;
}

std::vector<FlowOption> materialize(const FlowGrid& g, const std::set<std::vector<int>>& points, double keep) {
  std::vector<FlowOption> options;
  options.reserve(points.size());
  for (const auto& steps : points) {
    FlowOption o;
    o.steps = steps;
    o.out.assign(g.n, 0.0);
    o.in.assign(g.n, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) {
      for (std::size_t j = 0; j < g.n; ++j) {
        const double v = steps[i * g.n + j] * g.step * g.base[i];
        o.out[i] += v;
        o.in[j] += keep * v;
        o.total += v;
      }
    }
    options.push_back(std::move(o));
  }
  return options;
}

PairMatrix to_matrix(const FlowGrid& g, const FlowOption& o) {
  PairMatrix m(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.n; ++j) m(i, j) = o.steps[i * g.n + j] * g.step * g.base[i];
  }
  return m;
}

struct Candidate {
  double objective = std::numeric_limits<double>::infinity();
  std::size_t x = std::numeric_limits<std::size_t>::max();
  std::size_t e = std::numeric_limits<std::size_t>::max();

  [[nodiscard]] bool before(const Candidate& o) const {
    if (objective != o.objective) return objective < o.objective;
    return x != o.x ? x < o.x : e < o.e;
  }
};

struct Search {
  const SlotState& state;
  FlowGrid egrid, xgrid;
  std::vector<FlowOption> eopts, xopts;
  bool pruned = false;

  // Least-emission completion of one grid point: own renewable first, grid for the rest.
  [[nodiscard]] Candidate scan(std::size_t x_begin, std::size_t x_end) const {
    const std::size_t n = state.size();
    const double transport = state.transport_g_per_unit();
    Candidate best;
    std::vector<double> load(n);
    for (std::size_t xi = x_begin; xi < x_end; ++xi) {
      const auto& xo = xopts[xi];
      for (std::size_t i = 0; i < n; ++i) {
        const auto& s = state.servers[i];
        load[i] = s.fixed_kwh + s.compute_kwh_per_unit * std::max(0.0, s.task_units - xo.out[i] + xo.in[i]);
      }
      for (std::size_t ei = 0; ei < eopts.size(); ++ei) {
        const auto& eo = eopts[ei];
        double grid_g = 0.0;
        bool feasible = true;
        for (std::size_t i = 0; i < n; ++i) {
          double need = load[i] - eo.in[i];
          if (need < -1e-9 * std::max(1.0, load[i])) {
            feasible = false;
            break;
          }
          need = std::max(need, 0.0);
          const double own = std::max(0.0, state.servers[i].renewable() - eo.out[i]);
          grid_g += (need - std::min(need, own)) * state.servers[i].intensity;
        }
        if (!feasible) continue;
        const Candidate c{grid_g + xo.total * transport, xi, ei};
        if (c.before(best)) best = c;
      }
    }
    return best;
  }
};

Search prepare(const SlotState& state, Policy policy, double grid_step) {
  if (state.size() > kOracleMaxServers) {
    throw ContractError("oracle refuses " + std::to_string(state.size()) + " servers (at most " +
                        std::to_string(kOracleMaxServers) + ")");
  }
  if (!(grid_step > 0.0 && grid_step <= 0.25)) throw ContractError("oracle grid step must lie in (0, 0.25]");
  Search s{state, make_grid(state, Flow::Energy, policy, grid_step), make_grid(state, Flow::Task, policy, grid_step), {}, {}, false};
  s.pruned = full_count(s.egrid) * full_count(s.xgrid) > kGridBudget;
  s.eopts = materialize(s.egrid, grid_points(s.egrid, s.pruned), 1.0 - state.trading_loss);
  s.xopts = materialize(s.xgrid, grid_points(s.xgrid, s.pruned), 1.0);
  return s;
}

OracleResult finish(const Search& s, Policy policy, const Candidate& best) {
  OracleResult r;
  r.role_pruned = s.pruned;
  r.evaluated = s.eopts.size() * s.xopts.size();
  r.decision = allocate(s.state, policy, to_matrix(s.egrid, s.eopts[best.e]), to_matrix(s.xgrid, s.xopts[best.x]));
  r.decision.objective = best.objective;
  return r;
}

}  // namespace

OracleResult solve_oracle_serial(const SlotState& state, Policy policy, double grid_step) {
  const auto s = prepare(state, policy, grid_step);
  return finish(s, policy, s.scan(0, s.xopts.size()));
}

OracleResult solve_oracle(const SlotState& state, Policy policy, double grid_step) {
  const auto s = prepare(state, policy, grid_step);
  const auto count = static_cast<std::int64_t>(s.xopts.size());
  Candidate best;
#pragma omp parallel
  {
    Candidate local;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::int64_t xi = 0; xi < count; ++xi) {
      const auto c = s.scan(static_cast<std::size_t>(xi), static_cast<std::size_t>(xi) + 1);
      if (c.before(local)) local = c;
    }
#pragma omp critical(carbonsim_oracle_merge)
    if (local.before(best)) best = local;
  }
  return finish(s, policy, best);
}

SlotState random_slot_state(std::mt19937_64& engine, const RandomStateOptions& options) {
  std::uniform_int_distribution<std::size_t> count(options.min_servers, options.max_servers);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(engine); };

  SlotState st;
  const std::size_t n = count(engine);
  st.alpha_energy = 0.5;
  st.alpha_task = 0.5;
  st.trading_loss = between(0.0, 0.2);
  st.bytes_per_work_unit = between(0.0, 2000.0);
  st.backbone_kwh_per_byte = between(0.0, 1e-9);
  st.backbone_intensity = between(50.0, 500.0);
  const double shared_ci = between(20.0, 800.0);
  const double shared_c = between(1e-3, 4e-3);

  double min_demand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ServerSlot s;
    s.intensity = options.uniform_intensity ? shared_ci : between(20.0, 800.0);
    s.fixed_kwh = between(0.05, 0.5);
    s.task_units = unit(engine) < 0.1 ? 0.0 : between(50.0, 500.0);
    s.compute_kwh_per_unit = options.symmetric ? shared_c : between(1e-3, 4e-3);
    s.battery.capacity = between(0.0, 1.0);
    s.battery.level = between(0.0, 1.0) * s.battery.capacity;
    s.harvest = unit(engine) < 0.3 ? 0.0 : between(0.0, 1.5);
    st.servers.push_back(s);
  }
  double c_min = std::numeric_limits<double>::infinity();
  for (const auto& s : st.servers) c_min = std::min(c_min, s.compute_kwh_per_unit);
  double renewable = 0.0;
  for (const auto& s : st.servers) {
    min_demand += s.fixed_kwh + c_min * s.task_units;
    renewable += s.renewable();
  }
  // Rescale renewables so the system as a whole runs a deficit.
  const double limit = 0.6 * min_demand;
  if (renewable > limit && renewable > 0.0) {
    const double f = limit / renewable;
    for (auto& s : st.servers) {
      s.harvest *= f;
      s.battery.level *= f;
      s.battery.capacity *= f;
    }
  }
  if (options.symmetric) {
    // Nobody holds renewable energy beyond its own demand.
    for (auto& s : st.servers) {
      const double demand = s.fixed_kwh + s.compute_kwh_per_unit * s.task_units;
      if (s.renewable() > demand) {
        const double f = demand / s.renewable();
        s.harvest *= f;
        s.battery.level *= f;
        s.battery.capacity *= f;
      }
    }
  }
  return st;
}

std::vector<SlotState> random_slot_states(std::size_t count, std::uint64_t seed, const RandomStateOptions& options) {
  std::vector<SlotState> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::mt19937_64 engine{derive_seed(seed, k)};
    out.push_back(random_slot_state(engine, options));
  }
  return out;
}

namespace {

double relative_gap(double oracle, double lp) {
  const double denom = std::max(std::abs(lp), 1e-300);
  return (oracle - lp) / denom;
}

void merge(GapReport& into, double gap) {
  into.max_relative_gap = std::max(into.max_relative_gap, gap);
  if (gap < -1e-9) ++into.below_lp;
}

struct DominanceCheck {
  std::size_t violations = 0;
  double excess = 0.0;
};

DominanceCheck dominance_of(const SlotState& st, double tol) {
  const double base = solve(st, Policy::Baseline).objective;
  const double det = solve(st, Policy::DET).objective;
  const double dat = solve(st, Policy::DAT).objective;
  const double deta = solve(st, Policy::DETA).objective;
  DominanceCheck c;
  for (const auto& [lo, hi] : {std::pair{deta, det}, {det, base}, {deta, dat}, {dat, base}}) {
    c.excess = std::max(c.excess, lo - hi);
    if (lo > hi + tol) ++c.violations;
  }
  return c;
}

}  // namespace

GapReport oracle_gaps_serial(const std::vector<SlotState>& states, Policy policy, double grid_step) {
  GapReport r;
  r.states = states.size();
  for (const auto& st : states) {
    const double gap = relative_gap(solve_oracle_serial(st, policy, grid_step).decision.objective, solve(st, policy).objective);
    r.gaps.push_back(gap);
    merge(r, gap);
  }
  return r;
}

GapReport oracle_gaps(const std::vector<SlotState>& states, Policy policy, double grid_step) {
  GapReport r;
  r.states = states.size();
  r.gaps.assign(states.size(), 0.0);
  const auto count = static_cast<std::int64_t>(states.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < count; ++k) {
    const auto& st = states[static_cast<std::size_t>(k)];
    r.gaps[static_cast<std::size_t>(k)] =
        relative_gap(solve_oracle_serial(st, policy, grid_step).decision.objective, solve(st, policy).objective);
  }
  for (double gap : r.gaps) merge(r, gap);
  return r;
}

DominanceReport check_dominance_serial(const std::vector<SlotState>& states, double tolerance) {
  DominanceReport r;
  r.states = states.size();
  for (const auto& st : states) {
    const auto c = dominance_of(st, tolerance);
    r.violations += c.violations;
    r.worst_excess = std::max(r.worst_excess, c.excess);
  }
  return r;
}

DominanceReport check_dominance(const std::vector<SlotState>& states, double tolerance) {
  std::vector<DominanceCheck> checks(states.size());
  const auto count = static_cast<std::int64_t>(states.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t k = 0; k < count; ++k) {
    checks[static_cast<std::size_t>(k)] = dominance_of(states[static_cast<std::size_t>(k)], tolerance);
  }
  DominanceReport r;
  r.states = states.size();
  for (const auto& c : checks) {
    r.violations += c.violations;
    r.worst_excess = std::max(r.worst_excess, c.excess);
  }
  return r;
}

}  // namespace carbonsim
