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
#include "carbonsim/oracle.hpp"
#include "carbonsim/report.hpp"
#include "carbonsim/simulator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;
using namespace carbonsim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const fs::path kRoot = CARBONSIM_SOURCE_DIR;

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("carbonsim_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int shell(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd = "\"" CARBONSIM_CLI "\" " + args + " >\"" + stdout_file.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

Scenario mlp() { return load_scenario(kRoot / "scenarios/mnist_mlp_10regions.json"); }
Scenario reference() { return load_scenario(kRoot / "scenarios/deta_reference_10servers.json"); }

double worst_audit = 0.0;
std::size_t audited_runs = 0;

RunReport audited(const Scenario& s, const RunOptions& o = {}) {
  auto r = run(s, o);
  worst_audit = std::max(worst_audit, r.audit.worst_energy_residual());
  ++audited_runs;
  return r;
}

Outcome calibration() {
  const auto dir = scratch("calibrate");
  double worst = 0.0;
  double slowest = 0.0;
  std::size_t rows = 0;
  for (const char* model : {"MLP", "CNN", "LSTM"}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = dir / (std::string(model) + ".json");
    const int code = shell("calibrate --table \"" + (kRoot / "data/table1.csv").string() + "\" --model " + model +
                               " --out \"" + out.string() + "\"",
                           dir / "log.txt");
    slowest = std::max(slowest, seconds_since(t0));
    if (code != 0) return {false, std::string("calibrate exited ") + std::to_string(code) + " for " + model};
    const auto doc = nlohmann::json::parse(slurp(out));
    for (const auto& row : doc["rows"]) {
      worst = std::max(worst, std::abs(row["relative_residual"].get<double>()));
      ++rows;
    }
  }
  return {rows == 18 && worst <= 0.15 && slowest < 1.0,
          fmt("%.0f rows, max |residual| %.2f%%, slowest %.3f s", static_cast<double>(rows), 100.0 * worst, slowest)};
}

Outcome linear_scaling() {
  const auto t0 = std::chrono::steady_clock::now();
  auto s = mlp();
  for (auto& e : s.servers) {
    e.comm_kwh_per_byte = 0.0;
    e.harvest = {HarvestProcess::Constant, 0.0, 0.0, {}, {}};
  }
  std::vector<double> n, y;
  for (int k : {1, 3, 5, 7, 9, 11}) {
    auto v = s;
    apply_override(v, "server_count", std::to_string(k));
    n.push_back(k);
    y.push_back(audited(v).total_kwh());
  }
  const double nm = std::accumulate(n.begin(), n.end(), 0.0) / n.size();
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < n.size(); ++k) {
    sxy += (n[k] - nm) * (y[k] - ym);
    sxx += (n[k] - nm) * (n[k] - nm);
    syy += (y[k] - ym) * (y[k] - ym);
  }
  const double r2 = sxy * sxy / (sxx * syy);
  const double secs = seconds_since(t0);
  return {r2 >= 0.99 && secs < 5.0, fmt("R^2 %.6f over N = 1..11, %.3f s", r2, secs)};
}

Outcome superlinear_emissions() {
  double em = 0.0;
  double en = 0.0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    auto s = mlp();
    apply_override(s, "seed", std::to_string(1000 + seed));
    const auto eleven = audited(s);
    apply_override(s, "server_count", "1");
    const auto one = audited(s);
    em += eleven.total_gco2e() / one.total_gco2e();
    en += eleven.total_kwh() / one.total_kwh();
  }
  em /= seeds;
  en /= seeds;
  return {em > en, fmt("mean emission ratio %.3f vs energy ratio %.3f over 20 seeds", em, en)};
}

Outcome dominance() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = check_dominance(random_slot_states(1000, 20240, {2, 4, false, false}), 1e-9);
  const double secs = seconds_since(t0);
  return {report.states >= 1000 && report.violations == 0 && secs < 60.0,
          fmt("%.0f states, %.0f violations, %.2f s", static_cast<double>(report.states),
              static_cast<double>(report.violations), secs)};
}

Outcome oracle_equivalence() {
  const auto dir = scratch("verify");
  const auto t0 = std::chrono::steady_clock::now();
  const int code = shell("verify --random-states 100 --seed 1 --grid-step 0.02", dir / "out.txt");
  const double secs = seconds_since(t0);
  const auto text = slurp(dir / "out.txt");
  double gap = -1.0;
  if (const auto at = text.find("max relative gap "); at != std::string::npos) {
    gap = std::atof(text.c_str() + at + 17) / 100.0;
  }
  return {code == 0 && gap >= 0.0 && gap <= 0.02 && secs < 120.0,
          fmt("max gap %.4f%%, exit %.0f, %.2f s", 100.0 * gap, code, secs)};
}

Outcome deta_regime() {
  std::vector<std::string> counts;
  for (int n = 2; n <= 10; ++n) counts.push_back(std::to_string(n));
  const auto results = sweep(reference(), {{"server_count", counts}, {"policy", {"Baseline", "DETA"}}}, 4);
  for (const auto& r : results) {
    worst_audit = std::max(worst_audit, r.report.audit.worst_energy_residual());
    ++audited_runs;
  }
  const auto table = build_comparison(results);
  std::vector<double> red;
  for (int n = 2; n <= 10; ++n) red.push_back(table.find(n, Policy::DETA)->reduction_pct);
  int inversions = 0;
  for (std::size_t k = 1; k < red.size(); ++k) inversions += red[k] < red[k - 1];
  const double nb = table.find(10, Policy::DETA)->reduction_without_backbone_pct;
  return {red.back() >= 60.0 && inversions <= 1,
          fmt("N=10 reduction %.2f%% (%.2f%% without backbone), ", red.back(), nb) +
              std::to_string(inversions) + " inversions over N=2..10"};
}

Outcome lifecycle_portions() {
  auto lo = reference();
  auto hi = reference();
  apply_override(lo, "target_accuracy", "0.95");
  apply_override(hi, "target_accuracy", "0.975");
  const auto a = stage_report(audited(lo).ledger);
  const auto b = stage_report(audited(hi).ledger);
  auto sum = [](const StageReport& r) {
    double f = 0.0;
    for (const auto& s : r.stages) f += s.fraction;
    return f;
  };
  const double fa = a.of(LifecycleStage::Development).fraction;
  const double fb = b.of(LifecycleStage::Development).fraction;
  const bool sums = std::abs(sum(a) - 1.0) <= 1e-9 && std::abs(sum(b) - 1.0) <= 1e-9;
  return {fb > fa && sums, fmt("Development share %.2f%% at 95%% -> %.2f%% at 97.5%%", 100.0 * fa, 100.0 * fb)};
}

Outcome conservation() {
  for (const char* name : {"single_server.json", "mnist_mlp_10regions.json", "deta_reference_10servers.json"}) {
    for (Policy p : kAllPolicies) audited(load_scenario(kRoot / "scenarios" / name), {p, false});
  }
  return {worst_audit <= 1e-9,
          fmt("worst residual %.3g kWh over %.0f runs", worst_audit, static_cast<double>(audited_runs))};
}

Outcome determinism() {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const auto scen = "\"" + (kRoot / "scenarios/deta_reference_10servers.json").string() + "\"";
  const int ca = shell("run --scenario " + scen + " --out \"" + a.string() + "\"", a / "log.txt");
  const int cb = shell("run --scenario " + scen + " --out \"" + b.string() + "\"", b / "log.txt");
  const auto ra = slurp(a / "report.json");
  const auto rb = slurp(b / "report.json");
  return {ca == 0 && cb == 0 && !ra.empty() && ra == rb,
          fmt("%.0f bytes, identical: ", static_cast<double>(ra.size())) + (ra == rb ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 calibration fidelity", calibration},
      {"2 linear energy scaling", linear_scaling},
      {"3 super-linear emission growth", superlinear_emissions},
      {"4 policy dominance", dominance},
      {"5 oracle equivalence", oracle_equivalence},
      {"6 DETA reduction regime", deta_regime},
      {"7 lifecycle portions", lifecycle_portions},
      {"8 conservation audit", conservation},
      {"9 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %-32s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
