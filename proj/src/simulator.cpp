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

#include "carbonsim/simulator.hpp"

#include "carbonsim/energy_model.hpp"
#include "carbonsim/errors.hpp"
#include "carbonsim/harvest.hpp"
#include "carbonsim/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>

namespace carbonsim {

double ConservationAudit::worst_energy_residual() const {
  return std::max({std::abs(energy_residual), std::abs(harvest_residual), std::abs(ledger_residual)});
}

bool ConservationAudit::passed(double tolerance_kwh) const { return worst_energy_residual() <= tolerance_kwh; }

double RunReport::backbone_kwh() const {
  return ledger.has_node(kBackboneNode) ? ledger.total_for_node(kBackboneNode).kwh : 0.0;
}

double RunReport::backbone_gco2e() const {
  return ledger.has_node(kBackboneNode) ? ledger.total_for_node(kBackboneNode).gco2e : 0.0;
}

std::vector<std::string> assign_regions(const Scenario& scenario) {
  std::vector<std::string> out;
  out.reserve(scenario.servers.size());
  if (scenario.placement.mode == Placement::Mode::Explicit) {
    for (const auto& s : scenario.servers) out.push_back(s.region_id);
    return out;
  }
  if (scenario.regions.empty()) throw ValidationError("random placement needs at least one region");
  std::size_t lowest = 0;
  for (std::size_t r = 1; r < scenario.regions.size(); ++r) {
    if (series_mean(scenario.regions[r].intensity) < series_mean(scenario.regions[lowest].intensity)) lowest = r;
  }
  for (std::size_t i = 0; i < scenario.servers.size(); ++i) {
    if (i == 0 && scenario.placement.anchor_lowest) {
      out.push_back(scenario.regions[lowest].id);
      continue;
    }
    auto engine = make_engine(scenario.seed, i, StreamTag::Placement, 0);
    std::uniform_int_distribution<std::size_t> pick(0, scenario.regions.size() - 1);
    out.push_back(scenario.regions[pick(engine)].id);
  }
  return out;
}

std::vector<std::int64_t> split_samples(std::int64_t total, std::size_t servers) {
  if (servers == 0) return {};
  const auto n = static_cast<std::int64_t>(servers);
  std::vector<std::int64_t> out(servers, total / n);
  out[0] += total % n;
  return out;
}

namespace {

struct Server {
  const EdgeServer* spec = nullptr;
  const Region* region = nullptr;
  EnergyParams params;
  std::int64_t samples = 0;
  HarvestStream harvest;
  BatteryState battery;
};

class Simulation {
 public:
  Simulation(const Scenario& sc, const RunOptions& options) : sc_(sc), options_(options) {
    auto violations = validate_scenario(sc);
    if (!violations.empty()) throw ScenarioInvalid(std::move(violations));
    report_.scenario_name = sc.name;
    report_.policy = options.policy.value_or(sc.policy);
    report_.seed = sc.seed;

    const auto regions = assign_regions(sc);
    const auto samples = split_samples(sc.workload.total_samples, sc.servers.size());
    for (std::size_t i = 0; i < sc.servers.size(); ++i) {
      const auto& spec = sc.servers[i];
      if (spec.id == kBackboneNode) throw ValidationError("server id '" + spec.id + "' is reserved");
      const Region& region = sc.region(regions[i]);
      servers_.push_back(Server{&spec, &region, energy_params(spec, sc.slot_duration_s, sc.workload.model_bytes),
                                samples[i], HarvestStream(spec.harvest, sc.seed, i), spec.battery});
      report_.ledger.register_node(spec.id, region.intensity);
      report_.server_ids.push_back(spec.id);
      report_.server_regions.push_back(region.id);
      report_.audit.battery_start_kwh += spec.battery.level;
    }
    backbone_intensity_ = sc.effective_backbone_intensity();
    report_.ledger.register_node(kBackboneNode, {{0, backbone_intensity_}});
  }

  RunReport run() && {
    preparation();
    std::int64_t slot = 1;
    for (int round = 1;; ++round, ++slot) {
      development(slot, round);
      report_.rounds_used = round;
      report_.final_accuracy = sc_.workload.accuracy_at(round);
      if (report_.final_accuracy >= sc_.workload.target_accuracy) {
        report_.target_reached = true;
        break;
      }
      if (round >= sc_.max_rounds) break;
    }
    for (int k = 0; k < sc_.lifecycle.serving_slots; ++k) application(++slot);
    close_audit();
    return std::move(report_);
  }

 private:
  void preparation() {
    const double per_sample = sc_.lifecycle.device_kwh_per_sample + sc_.lifecycle.ran_kwh_per_sample;
    for (const auto& s : servers_) {
      const double kwh = per_sample * static_cast<double>(s.samples);
      report_.ledger.record(s.spec->id, LifecycleStage::Preparation, 0, EnergyBySource{kwh, 0.0, 0.0});
      report_.unoptimised_gco2e += emissions(kwh, s.region->intensity_at(0));
      report_.audit.grid_kwh += kwh;
      report_.audit.model_terms_kwh += kwh;
    }
  }

  SlotState slot_state(std::int64_t slot) {
    SlotState st;
    st.alpha_energy = sc_.alpha_energy;
    st.alpha_task = sc_.alpha_task;
    st.trading_loss = sc_.trading_loss;
    st.backbone_kwh_per_byte = sc_.backbone_kwh_per_byte;
    st.backbone_intensity = backbone_intensity_;
    st.bytes_per_work_unit = sc_.workload.bytes_per_work_unit();
    for (const auto& s : servers_) {
      ServerSlot ss;
      ss.harvest = s.harvest.sample(slot);
      ss.battery = s.battery;
      ss.compute_kwh_per_unit = s.params.train_energy_per_sample_epoch;
      ss.intensity = s.region->intensity_at(slot);
      st.servers.push_back(ss);
    }
    return st;
  }

  void development(std::int64_t slot, int round) {
    SlotState st = slot_state(slot);
    for (std::size_t i = 0; i < servers_.size(); ++i) {
      const auto& p = servers_[i].params;
      st.servers[i].task_units = static_cast<double>(servers_[i].samples) * sc_.workload.local_epochs;
      st.servers[i].fixed_kwh = p.static_energy_per_slot + p.comm_energy_per_model_exchange;
    }
    auto decision = solve(st, report_.policy);
    std::vector<std::size_t> asleep;
    if (sc_.deep_sleep) {
      for (std::size_t i : sleep_mask(decision, st)) {
        if (st.servers[i].task_units == 0.0) asleep.push_back(i);
      }
      if (!asleep.empty()) {
        for (std::size_t i : asleep) {
          st.servers[i].fixed_kwh -= servers_[i].params.static_energy_per_slot;
          st.servers[i].fixed_kwh = std::max(st.servers[i].fixed_kwh, 0.0);
          st.servers[i].accepts_offload = false;
        }
        decision = solve(st, report_.policy);
      }
    }
    for (std::size_t i = 0; i < servers_.size(); ++i) {
      report_.audit.model_terms_kwh +=
          st.servers[i].fixed_kwh + st.servers[i].compute_kwh_per_unit * decision.residual_units[i];
    }
    commit(slot, LifecycleStage::Development, round, st, std::move(decision), std::move(asleep));
  }

  void application(std::int64_t slot) {
    SlotState st = slot_state(slot);
    const double total = static_cast<double>(sc_.lifecycle.inferences) * sc_.lifecycle.kwh_per_inference /
                         static_cast<double>(sc_.lifecycle.serving_slots);
    const double each = servers_.empty() ? 0.0 : total / static_cast<double>(servers_.size());
    for (auto& ss : st.servers) ss.fixed_kwh = each;
    report_.audit.model_terms_kwh += each * static_cast<double>(servers_.size());
    commit(slot, LifecycleStage::Application, 0, st, solve(st, report_.policy), {});
  }

  void commit(std::int64_t slot, LifecycleStage stage, int round, const SlotState& st, AllocationDecision d,
              std::vector<std::size_t> asleep) {
    auto& audit = report_.audit;
    auto& sum = report_.summary;
    for (std::size_t i = 0; i < servers_.size(); ++i) {
      const auto& ss = st.servers[i];
      const double exported = d.energy_transfer.row_sum(i);
      const double local_battery = std::min(d.battery_discharge[i], d.renewable_local[i]);
      const double renewable = d.load_kwh[i] - d.grid_draw[i];
      report_.ledger.record(servers_[i].spec->id, stage, slot,
                            EnergyBySource{d.grid_draw[i], std::max(0.0, renewable - local_battery), local_battery});

      const double from_harvest = d.harvest_used[i] - d.battery_charge[i];
      audit.harvest_residual =
          std::max(audit.harvest_residual, std::abs(ss.harvest - from_harvest - d.battery_charge[i] - d.overflow[i]));
      audit.harvested_kwh += ss.harvest;
      audit.grid_kwh += d.grid_draw[i];
      audit.trading_loss_kwh += sc_.trading_loss * exported;
      audit.charge_loss_kwh += (1.0 - ss.battery.charge_efficiency) * d.battery_charge[i];
      audit.overflow_kwh += d.overflow[i];

      sum.energy_transferred_kwh += exported;
      sum.energy_lost_kwh += sc_.trading_loss * exported;
      sum.units_offloaded += d.task_offload.row_sum(i);
      sum.grid_kwh += d.grid_draw[i];
      sum.renewable_kwh += renewable;
      sum.overflow_kwh += d.overflow[i];

      const auto step = battery_step(servers_[i].battery, d.battery_charge[i], d.battery_discharge[i]);
      servers_[i].battery = step.state;
      audit.overflow_kwh += step.overflow;
    }
    if (d.transport_kwh > 0.0) {
      report_.ledger.record(kBackboneNode, stage, slot, EnergyBySource{d.transport_kwh, 0.0, 0.0});
      audit.grid_kwh += d.transport_kwh;
      audit.model_terms_kwh += d.transport_kwh;
      sum.transport_kwh += d.transport_kwh;
    }
    sum.sleeping_server_slots += asleep.size();
    report_.slot_objectives.push_back(d.objective);
    if (options_.keep_decisions) {
      report_.decisions.push_back(SlotDecision{slot, stage, round, std::move(asleep), std::move(d)});
    }
  }

  void close_audit() {
    auto& a = report_.audit;
    for (const auto& s : servers_) a.battery_end_kwh += s.battery.level;
    const auto total = report_.ledger.total();
    a.consumed_kwh = total.kwh;
    a.energy_residual = (a.harvested_kwh + a.grid_kwh + a.battery_start_kwh - a.battery_end_kwh) -
                        (a.consumed_kwh + a.trading_loss_kwh + a.charge_loss_kwh + a.overflow_kwh);
    a.ledger_residual = a.consumed_kwh - a.model_terms_kwh;
    double objectives = report_.unoptimised_gco2e;
    for (double o : report_.slot_objectives) objectives += o;
    a.emission_residual = total.gco2e - objectives;
  }

  const Scenario& sc_;
  RunOptions options_;
  std::vector<Server> servers_;
  double backbone_intensity_ = 0.0;
  RunReport report_;
};

double parse_number(const std::string& field, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ValidationError("sweep field '" + field + "': '" + text + "' is not a number");
  return v;
}

std::int64_t parse_integer(const std::string& field, const std::string& text) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError("sweep field '" + field + "': '" + text + "' is not an integer");
  }
  return v;
}

bool is_nesting_field(const std::string& field) { return field == "server_count" || field == "policy" || field == "seed"; }

struct Combination {
  std::vector<std::pair<std::string, std::string>> assignment;
  Scenario scenario;
};

std::vector<Combination> combinations(const Scenario& base, const std::vector<SweepAxis>& axes) {
  for (const auto& axis : axes) {
    const auto& fields = sweep_fields();
    if (std::find(fields.begin(), fields.end(), axis.field) == fields.end()) {
      throw ValidationError("unknown sweep field '" + axis.field + "'");
    }
    if (axis.values.empty()) throw ValidationError("sweep field '" + axis.field + "' has no values");
  }
  std::size_t total = 1;
  for (const auto& axis : axes) total *= axis.values.size();

  std::vector<Combination> out;
  out.reserve(total);
  for (std::size_t index = 0; index < total; ++index) {
    Combination c{{}, base};
    std::size_t rest = index;
    std::size_t stride = total;
    std::uint64_t free_index = 0;
    bool derived = false;
    for (const auto& axis : axes) {
      stride /= axis.values.size();
      const std::size_t k = rest / stride;
      rest %= stride;
      c.assignment.emplace_back(axis.field, axis.values[k]);
      if (!is_nesting_field(axis.field)) {
        free_index = free_index * axis.values.size() + k;
        derived = true;
      }
    }
    for (const auto& [field, value] : c.assignment) apply_override(c.scenario, field, value);
    if (derived) c.scenario.seed = derive_seed(c.scenario.seed, free_index, static_cast<std::uint64_t>(StreamTag::Sweep));
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

RunReport run(const Scenario& scenario, const RunOptions& options) { return Simulation(scenario, options).run(); }

const std::vector<std::string>& sweep_fields() {
  static const std::vector<std::string> fields = {
      "server_count", "policy",       "seed",     "alpha_energy", "alpha_task",           "trading_loss",
      "target_accuracy", "local_epochs", "max_rounds", "deep_sleep", "backbone_kwh_per_byte", "backbone_intensity",
      "inferences"};
  return fields;
}

void apply_override(Scenario& target, const std::string& field, const std::string& value) {
  Scenario sc = target;
  if (field == "server_count") {
    const auto n = parse_integer(field, value);
    if (n < 1 || static_cast<std::size_t>(n) > sc.servers.size()) {
      throw ValidationError("server_count " + value + " outside 1.." + std::to_string(sc.servers.size()));
    }
    sc.servers.resize(static_cast<std::size_t>(n));
  } else if (field == "policy") {
    try {
      sc.policy = policy_from_string(value);
    } catch (const std::exception& e) {
      throw ValidationError(std::string("policy: ") + e.what());
    }
  } else if (field == "seed") {
    const auto s = parse_integer(field, value);
    if (s < 0) throw ValidationError("seed must be nonnegative");
    sc.seed = static_cast<std::uint64_t>(s);
  } else if (field == "alpha_energy") {
    sc.alpha_energy = parse_number(field, value);
  } else if (field == "alpha_task") {
    sc.alpha_task = parse_number(field, value);
  } else if (field == "trading_loss") {
    sc.trading_loss = parse_number(field, value);
  } else if (field == "target_accuracy") {
    sc.workload.target_accuracy = parse_number(field, value);
  } else if (field == "local_epochs") {
    sc.workload.local_epochs = static_cast<int>(parse_integer(field, value));
  } else if (field == "max_rounds") {
    sc.max_rounds = static_cast<int>(parse_integer(field, value));
  } else if (field == "deep_sleep") {
    if (value != "true" && value != "false") throw ValidationError("deep_sleep must be true or false");
    sc.deep_sleep = value == "true";
  } else if (field == "backbone_kwh_per_byte") {
    sc.backbone_kwh_per_byte = parse_number(field, value);
  } else if (field == "backbone_intensity") {
    sc.backbone_intensity = parse_number(field, value);
  } else if (field == "inferences") {
    sc.lifecycle.inferences = parse_integer(field, value);
  } else {
    throw ValidationError("unknown sweep field '" + field + "'");
  }
  auto violations = validate_scenario(sc);
  if (!violations.empty()) throw ScenarioInvalid(std::move(violations));
  target = std::move(sc);
}

std::vector<SweepResult> sweep_serial(const Scenario& scenario, const std::vector<SweepAxis>& axes,
                                      const RunOptions& options) {
  auto combos = combinations(scenario, axes);
  std::vector<SweepResult> out;
  out.reserve(combos.size());
  for (auto& c : combos) {
    out.push_back(SweepResult{c.assignment, c.scenario.seed, run(c.scenario, options)});
  }
  return out;
}

std::vector<SweepResult> sweep(const Scenario& scenario, const std::vector<SweepAxis>& axes, int jobs,
                               const RunOptions& options) {
  if (jobs <= 1) return sweep_serial(scenario, axes, options);
  auto combos = combinations(scenario, axes);
  std::vector<SweepResult> out(combos.size());
  std::vector<std::exception_ptr> errors(combos.size());
  const auto count = static_cast<std::int64_t>(combos.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (std::int64_t k = 0; k < count; ++k) {
    auto& c = combos[static_cast<std::size_t>(k)];
    try {
      out[static_cast<std::size_t>(k)] = SweepResult{c.assignment, c.scenario.seed, run(c.scenario, options)};
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace carbonsim
