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

#include "carbonsim/report.hpp"

#include "support.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <doctest.h>

using namespace carbonsim;
using carbonsim::testing::scratch_dir;
using carbonsim::testing::source_path;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result cli(const std::string& args, const std::string& env = {}) {
  static int counter = 0;
  const auto dir = scratch_dir("cli_io_" + std::to_string(counter++));
  const std::string cmd = env + " \"" CARBONSIM_CLI "\" " + args + " >\"" + (dir / "out").string() + "\" 2>\"" +
                          (dir / "err").string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "out"), slurp(dir / "err")};
}

std::string scenario(const char* name) { return "\"" + source_path(std::string("scenarios/") + name).string() + "\""; }

}  // namespace

TEST_CASE("run writes report and ledger and prints the stage table") {
  const auto out = scratch_dir("cli_run");
  const auto r = cli("run --scenario " + scenario("single_server.json") + " --out \"" + out.string() + "\" --dump-decisions");
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(out / "report.json"));
  CHECK(std::filesystem::exists(out / "ledger.csv"));
  CHECK(std::filesystem::exists(out / "decisions" / "slot_1.json"));
  CHECK(r.out.find("Development") != std::string::npos);
}

TEST_CASE("malformed and invalid scenarios exit 2 naming the JSON path") {
  const auto dir = scratch_dir("cli_bad");
  auto doc = nlohmann::json::parse(slurp(source_path("scenarios/single_server.json")));
  doc["intensity_csv"] = source_path("data/us_regions_intensity.csv").string();
  doc["servers"][0]["region_id"] = "mars";
  std::ofstream(dir / "mars.json") << doc.dump();
  auto r = cli("run --scenario \"" + (dir / "mars.json").string() + "\" --out \"" + (dir / "o").string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("servers[0].region_id") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "o" / "report.json"));

  doc["servers"][0]["region_id"] = "us-ca";
  doc["servers"][0]["wattage"] = 3;
  std::ofstream(dir / "typo.json") << doc.dump();
  r = cli("validate --scenario \"" + (dir / "typo.json").string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("servers[0].wattage") != std::string::npos);

  std::ofstream(dir / "broken.json") << "{";
  CHECK(cli("validate --scenario \"" + (dir / "broken.json").string() + "\"").code == 2);
}

TEST_CASE("usage errors exit 2") {
  CHECK(cli("teleport").code == 2);
  CHECK(cli("run").code == 2);
  CHECK(cli("run --scenario " + scenario("single_server.json") + " --policy Greedy --out /tmp/carbonsim_cli_greedy").code == 2);
}

TEST_CASE("verify exit codes") {
  CHECK(cli("verify --random-states 0 --seed 1 --grid-step 0.02").code == 0);
  const auto r = cli("verify --random-states 8 --seed 3 --grid-step 0.05");
  CHECK(r.code == 0);
  CHECK(r.out.find("max relative gap") != std::string::npos);
  CHECK(cli("verify --random-states 8 --seed 3 --grid-step 0.05 --uniform-intensity").code == 0);
  // A coarse grid cannot get within a hundredth of a percent.
  CHECK(cli("verify --random-states 10 --seed 3 --grid-step 0.25 --max-gap 0.0001").code == 3);
}

TEST_CASE("calibrate writes parameters and rejects degenerate tables") {
  const auto dir = scratch_dir("cli_calibrate");
  const auto r = cli("calibrate --table \"" + source_path("data/table1.csv").string() + "\" --model CNN --out \"" +
                     (dir / "p.json").string() + "\"");
  CHECK(r.code == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "p.json"));
  CHECK(doc["max_abs_relative_residual"].get<double>() <= 0.15);
  std::ofstream(dir / "zero.csv") << "model,servers,E,B,total_kwh,co2_g\nX,1,1,1,0,0\nX,2,1,1,0,0\nX,3,1,1,0,0\n";
  CHECK(cli("calibrate --table \"" + (dir / "zero.csv").string() + "\" --model X --samples 10 --out \"" +
            (dir / "z.json").string() + "\"")
            .code == 2);
}

TEST_CASE("compare emits a round-tripping table") {
  const auto dir = scratch_dir("cli_compare");
  const auto r = cli("compare --scenario " + scenario("deta_reference_10servers.json") + " --servers 1,2,10 --jobs 2 --out \"" +
                     dir.string() + "\"");
  CHECK(r.code == 0);
  const auto text = slurp(dir / "comparison.csv");
  const auto table = comparison_from_csv(text, "comparison.csv");
  CHECK(table.rows.size() == 12);
  CHECK(to_csv(table) == text);
  for (const auto& row : table.rows) {
    if (row.server_count == 1) CHECK(row.reduction_pct == 0.0);
  }
}

TEST_CASE("sweep writes one run per combination") {
  const auto dir = scratch_dir("cli_sweep");
  const auto r = cli("sweep --scenario " + scenario("single_server.json") +
                     " --vary policy=Baseline,DETA --vary trading_loss=0,0.1 --out \"" + dir.string() + "\"");
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(dir / "run_3" / "report.json"));
  CHECK(cli("sweep --scenario " + scenario("single_server.json") + " --vary nonsense=1 --out \"" + dir.string() + "\"")
            .code == 2);
}

TEST_CASE("CARBONSIM_SEED overrides the scenario seed") {
  const auto a = scratch_dir("cli_seed_a");
  const auto b = scratch_dir("cli_seed_b");
  CHECK(cli("run --scenario " + scenario("mnist_mlp_10regions.json") + " --out \"" + a.string() + "\"",
            "CARBONSIM_SEED=123")
            .code == 0);
  CHECK(cli("run --scenario " + scenario("mnist_mlp_10regions.json") + " --out \"" + b.string() + "\"").code == 0);
  const auto ja = nlohmann::json::parse(slurp(a / "report.json"));
  const auto jb = nlohmann::json::parse(slurp(b / "report.json"));
  CHECK(ja["seed"] == 123);
  CHECK(jb["seed"] == 7);
}
