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

#include "carbonsim/csv.hpp"
#include "carbonsim/energy_model.hpp"
#include "carbonsim/errors.hpp"
#include "carbonsim/oracle.hpp"
#include "carbonsim/report.hpp"
#include "carbonsim/scenario.hpp"
#include "carbonsim/simulator.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace fs = std::filesystem;
using namespace carbonsim;

namespace {

enum Exit { kOk = 0, kInternal = 1, kInvalid = 2, kGap = 3 };

Scenario load_with_env(const fs::path& path) {
  Scenario sc = load_scenario(path);
  if (const char* env = std::getenv("CARBONSIM_SEED"); env != nullptr && *env != '\0') {
    apply_override(sc, "seed", env);
  }
  return sc;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

struct RunArgs {
  fs::path scenario;
  std::string policy;
  fs::path out = "out";
  bool dump = false;
};

int cmd_run(const RunArgs& a) {
  const Scenario sc = load_with_env(a.scenario);
  RunOptions opt;
  if (!a.policy.empty()) opt.policy = policy_from_string(a.policy);
  opt.keep_decisions = a.dump;
  const RunReport report = run(sc, opt);
  write_run_artifacts(a.out, report);
  std::cout << stage_table(report);
  if (!report.audit.passed()) {
    std::cerr << "conservation audit failed: worst residual " << report.audit.worst_energy_residual() << " kWh\n";
    return kInternal;
  }
  return kOk;
}

struct CompareArgs {
  fs::path scenario;
  std::string servers;
  fs::path out = "out";
  int jobs = 1;
};

int cmd_compare(const CompareArgs& a) {
  const Scenario sc = load_with_env(a.scenario);
  std::vector<SweepAxis> axes;
  if (!a.servers.empty()) axes.push_back({"server_count", split_list(a.servers)});
  SweepAxis policies{"policy", {}};
  for (Policy p : kAllPolicies) policies.values.push_back(to_string(p));
  axes.push_back(policies);
  const auto table = build_comparison(sweep(sc, axes, a.jobs));
  fs::create_directories(a.out);
  csv::write_atomic(a.out / "comparison.csv", to_csv(table));
  std::cout << comparison_summary(table);
  return kOk;
}

struct SweepArgs {
  fs::path scenario;
  std::vector<std::string> vary;
  fs::path out = "out";
  int jobs = 1;
};

int cmd_sweep(const SweepArgs& a) {
  const Scenario sc = load_with_env(a.scenario);
  std::vector<SweepAxis> axes;
  for (const auto& spec : a.vary) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ValidationError("--vary expects field=v1,v2,... got '" + spec + "'");
    axes.push_back({spec.substr(0, eq), split_list(spec.substr(eq + 1))});
  }
  const auto results = sweep(sc, axes, a.jobs);
  std::string table = "run,";
  for (const auto& axis : axes) table += axis.field + ",";
  table += "seed,rounds_used,total_kwh,total_gco2e,gco2e_without_backbone\n";
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    table += std::to_string(k) + ",";
    for (const auto& [field, value] : r.assignment) table += value + ",";
    table += std::to_string(r.seed) + "," + std::to_string(r.report.rounds_used) + "," +
             csv::format_double(r.report.total_kwh()) + "," + csv::format_double(r.report.total_gco2e()) + "," +
             csv::format_double(r.report.total_gco2e() - r.report.backbone_gco2e()) + "\n";
    write_run_artifacts(a.out / ("run_" + std::to_string(k)), r.report);
  }
  csv::write_atomic(a.out / "sweep.csv", table);
  std::cout << table;
  return kOk;
}

struct CalibrateArgs {
  fs::path table;
  std::string model;
  fs::path out = "params.json";
  long long samples = 0;
  int rounds = 0;
};

int cmd_calibrate(const CalibrateArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  auto rows = rows_for_model(load_calibration_table(a.table), a.model);
  if (a.rounds > 0) {
    for (auto& r : rows) r.rounds = a.rounds;
  }
  const CalibrationResult result =
      a.samples > 0 ? calibrate(rows, a.samples) : calibrate(rows, model_kind_from_string(a.model));
  csv::write_atomic(a.out, to_json(result, rows).dump(2) + "\n");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::printf("%-6s%8s%4s%6s%14s%14s%10s\n", "model", "servers", "E", "B", "measured kWh", "fitted kWh", "resid %");
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::printf("%-6s%8d%4d%6d%14.6g%14.6g%10.2f\n", rows[k].model.c_str(), rows[k].servers, rows[k].epochs,
                rows[k].batch, rows[k].total_kwh, result.predicted_kwh[k], 100.0 * result.relative_residuals[k]);
  }
  std::printf("static %.6g kWh/slot, train %.6g kWh/sample-epoch, comm %.6g kWh/exchange\n",
              result.params.static_energy_per_slot, result.params.train_energy_per_sample_epoch,
              result.params.comm_energy_per_model_exchange);
  std::printf("max |residual| %.2f%%  (%.3f s)\n", 100.0 * result.max_abs_residual, secs);
  return kOk;
}

struct VerifyArgs {
  std::size_t states = 100;
  std::uint64_t seed = 1;
  double step = 0.02;
  double max_gap = 0.02;
  std::string policy = "DETA";
  bool uniform = false;
  int jobs = 0;
};

int cmd_verify(const VerifyArgs& a) {
  if (a.jobs > 0) omp_set_num_threads(a.jobs);
  const auto start = std::chrono::steady_clock::now();
  RandomStateOptions opt;
  opt.uniform_intensity = a.uniform;
  opt.symmetric = a.uniform;
  const auto states = random_slot_states(a.states, a.seed, opt);
  const Policy policy = policy_from_string(a.policy);
  const GapReport gaps = oracle_gaps(states, policy, a.step);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("states %zu  policy %s  grid step %g\n", gaps.states, to_string(policy).c_str(), a.step);
  std::printf("max relative gap %.4f%%  (limit %.4f%%)  oracle below LP: %zu  (%.2f s)\n",
              100.0 * gaps.max_relative_gap, 100.0 * a.max_gap, gaps.below_lp, secs);
  int code = kOk;
  if (a.uniform) {
    double worst = 0.0;
    for (const auto& st : states) {
      const double base = solve(st, Policy::Baseline).objective;
      worst = std::max(worst, std::abs(solve(st, policy).objective - base) / std::max(base, 1e-300));
    }
    std::printf("uniform intensity: max |LP - Baseline| / Baseline %.3g\n", worst);
    if (worst > 1e-9) code = kGap;
  }
  if (gaps.max_relative_gap > a.max_gap || gaps.below_lp > 0) code = kGap;
  std::puts(code == kOk ? "PASS" : "FAIL");
  return code;
}

int cmd_validate(const fs::path& path) {
  const Scenario sc = load_with_env(path);
  std::printf("%s: valid (%zu regions, %zu servers)\n", sc.name.c_str(), sc.regions.size(), sc.servers.size());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carbonsim: carbon-aware federated edge intelligence simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and write report.json and ledger.csv");
  run_cmd->add_option("--scenario", run_args.scenario, "Scenario JSON")->required();
  run_cmd->add_option("--policy", run_args.policy, "Baseline, DET, DAT or DETA (default: scenario)");
  run_cmd->add_option("--out", run_args.out, "Output directory");
  run_cmd->add_flag("--dump-decisions", run_args.dump, "Write decisions/slot_<n>.json");

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "All four policies per server count");
  cmp_cmd->add_option("--scenario", cmp.scenario, "Scenario JSON")->required();
  cmp_cmd->add_option("--servers", cmp.servers, "Comma-separated server counts (default: all servers)");
  cmp_cmd->add_option("--out", cmp.out, "Output directory");
  cmp_cmd->add_option("--jobs", cmp.jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Cartesian sweep over scenario fields");
  sweep_cmd->add_option("--scenario", sw.scenario, "Scenario JSON")->required();
  sweep_cmd->add_option("--vary", sw.vary, "field=v1,v2,... (repeatable)")->required();
  sweep_cmd->add_option("--out", sw.out, "Output directory");
  sweep_cmd->add_option("--jobs", sw.jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Fit per-server energy parameters to a measured table");
  cal_cmd->add_option("--table", cal.table, "CSV: model,servers,E,B,total_kwh,co2_g[,rounds]")->required();
  cal_cmd->add_option("--model", cal.model, "Model rows to fit (MLP, CNN, LSTM, ...)")->required();
  cal_cmd->add_option("--out", cal.out, "Parameter JSON");
  cal_cmd->add_option("--samples", cal.samples, "Training samples (default: dataset of the model)");
  cal_cmd->add_option("--rounds", cal.rounds, "Rounds behind every row (default: table column or 1)");

  VerifyArgs ver;
  auto* ver_cmd = app.add_subcommand("verify", "Compare the LP against the brute-force oracle");
  ver_cmd->add_option("--random-states", ver.states, "Number of random states");
  ver_cmd->add_option("--seed", ver.seed, "Seed of the state generator");
  ver_cmd->add_option("--grid-step", ver.step, "Oracle grid step (fraction)");
  ver_cmd->add_option("--max-gap", ver.max_gap, "Largest accepted relative gap");
  ver_cmd->add_option("--policy", ver.policy, "Policy to verify");
  ver_cmd->add_flag("--uniform-intensity", ver.uniform, "Symmetric uniform-intensity states; also checks LP == Baseline");
  ver_cmd->add_option("--jobs", ver.jobs, "OpenMP threads (default: runtime)");

  fs::path validate_path;
  auto* val_cmd = app.add_subcommand("validate", "Check a scenario file");
  val_cmd->add_option("--scenario", validate_path, "Scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run_cmd) return cmd_run(run_args);
    if (*cmp_cmd) return cmd_compare(cmp);
    if (*sweep_cmd) return cmd_sweep(sw);
    if (*cal_cmd) return cmd_calibrate(cal);
    if (*ver_cmd) return cmd_verify(ver);
    if (*val_cmd) return cmd_validate(validate_path);
  } catch (const ScenarioInvalid& e) {
    std::cerr << "invalid scenario (" << e.violations().size() << " violations)\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v.path << ": " << to_string(v.code) << ": " << v.message << "\n";
    return kInvalid;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const CalibrationError& e) {
    std::cerr << "calibration error: " << e.what() << "\n";
    return kInvalid;
  } catch (const LookupError& e) {
    std::cerr << "lookup error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
