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

#include "carbonsim/errors.hpp"
#include "carbonsim/scenario.hpp"

#include "support.hpp"

#include <algorithm>
#include <fstream>

#include <doctest.h>

using namespace carbonsim;
using carbonsim::testing::source_path;
using carbonsim::testing::tiny_scenario;

namespace {

bool has_code(const std::vector<Violation>& v, ViolationCode code) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.code == code; });
}

nlohmann::json minimal_doc() {
  return nlohmann::json::parse(R"({
    "schema_version": 1,
    "regions": [{"id": "r0", "intensity": [[0, 120]]}],
    "servers": [{"id": "s0", "region_id": "r0", "static_power_w": 1.0,
                 "compute_kwh_per_unit": 1e-9, "comm_kwh_per_byte": 0}],
    "workload": {"model_kind": "MLP", "local_epochs": 5, "batch_size": 10, "total_samples": 100,
                 "model_bytes": 10, "sample_bytes": 1, "target_accuracy": 0.9,
                 "accuracy_curve": [[1, 0.5], [4, 0.95]]}
  })");
}

}  // namespace

TEST_CASE("minimal document loads with defaults") {
  const auto s = scenario_from_json(minimal_doc(), ".");
  CHECK(s.policy == Policy::Baseline);
  CHECK(s.alpha_energy == 0.5);
  CHECK(s.alpha_task == 0.5);
  CHECK(s.servers.size() == 1);
  CHECK(validate_scenario(s).empty());
}

TEST_CASE("undeclared region is reported at its JSON path") {
  auto doc = minimal_doc();
  doc["servers"][0]["region_id"] = "mars";
  try {
    scenario_from_json(doc, ".");
    FAIL("no exception");
  } catch (const ScenarioInvalid& e) {
    REQUIRE(!e.violations().empty());
    CHECK(e.violations()[0].path == "servers[0].region_id");
    CHECK(e.violations()[0].code == ViolationCode::UnknownRegion);
    CHECK(std::string(e.what()).find("servers[0].region_id") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected with their path") {
  auto doc = minimal_doc();
  doc["servers"][0]["static_power"] = 3.0;
  try {
    scenario_from_json(doc, ".");
    FAIL("no exception");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("servers[0].static_power") != std::string::npos);
  }
  auto top = minimal_doc();
  top["polcy"] = "DETA";
  CHECK_THROWS_AS(scenario_from_json(top, "."), ParseError);
}

TEST_CASE("validation codes") {
  auto s = tiny_scenario();
  CHECK(validate_scenario(s).empty());

  auto caps = s;
  caps.alpha_energy = 1.5;
  const auto v = validate_scenario(caps);
  REQUIRE(v.size() == 1);
  CHECK(v[0].code == ViolationCode::CapOutOfRange);

  auto full = s;
  full.servers[0].battery = {2.0, 1.0, 1.0};
  CHECK(has_code(validate_scenario(full), ViolationCode::BatteryOverfull));

  auto curve = s;
  curve.workload.accuracy_curve = {{1, 0.9}, {2, 0.8}};
  CHECK(has_code(validate_scenario(curve), ViolationCode::NonMonotoneAccuracy));

  auto loss = s;
  loss.trading_loss = 1.0;
  CHECK(has_code(validate_scenario(loss), ViolationCode::TradingLossOutOfRange));

  auto epochs = s;
  epochs.workload.local_epochs = 0;
  CHECK(has_code(validate_scenario(epochs), ViolationCode::NonPositiveEpochs));

  auto none = s;
  none.servers.clear();
  CHECK(has_code(validate_scenario(none), ViolationCode::NoServers));

  auto dup = s;
  dup.servers.push_back(dup.servers[0]);
  CHECK(has_code(validate_scenario(dup), ViolationCode::DuplicateId));

  auto series = s;
  series.regions[0].intensity = {{3, 1.0}, {3, 2.0}};
  CHECK(has_code(validate_scenario(series), ViolationCode::NonIncreasingSlots));
}

TEST_CASE("a file loads iff validation of its parsed value is empty") {
  auto doc = minimal_doc();
  for (double alpha : {-0.1, 0.0, 0.5, 1.0, 1.01}) {
    doc["alpha_task"] = alpha;
    auto s = tiny_scenario();
    s.alpha_task = alpha;
    const bool valid = validate_scenario(s).empty();
    bool loaded = true;
    try {
      scenario_from_json(doc, ".");
    } catch (const ScenarioInvalid&) {
      loaded = false;
    }
    CHECK(loaded == valid);
  }
}

TEST_CASE("shipped fixtures load and round-trip") {
  for (const char* name : {"scenarios/single_server.json", "scenarios/mnist_mlp_10regions.json",
                           "scenarios/deta_reference_10servers.json"}) {
    CAPTURE(name);
    const auto s = load_scenario(source_path(name));
    const auto back = scenario_from_json(nlohmann::json::parse(to_json(s).dump()), source_path("scenarios"));
    CHECK(back == s);
  }
  const auto mlp = load_scenario(source_path("scenarios/mnist_mlp_10regions.json"));
  CHECK(mlp.regions.size() == 10);
  CHECK(mlp.servers.size() == 11);
  CHECK(mlp.workload.local_epochs == 50);
}

TEST_CASE("intensity CSV feeds regions without inline series") {
  const auto dir = testing::scratch_dir("scenario_csv");
  std::ofstream(dir / "ci.csv") << "region_id,slot,intensity_gco2_per_kwh\nr0,0,50\nr0,4,70\n";
  auto doc = minimal_doc();
  doc["regions"][0].erase("intensity");
  doc["intensity_csv"] = "ci.csv";
  const auto s = scenario_from_json(doc, dir);
  CHECK(s.regions[0].intensity_at(3) == 50.0);
  CHECK(s.regions[0].intensity_at(4) == 70.0);
}

TEST_CASE("accuracy curve interpolation and rounds to target") {
  WorkloadSpec w;
  w.accuracy_curve = {{2, 0.5}, {4, 0.9}};
  CHECK(w.accuracy_at(1) == 0.0);
  CHECK(w.accuracy_at(3) == doctest::Approx(0.7));
  CHECK(w.accuracy_at(10) == 0.9);
  CHECK(w.rounds_to(0.7) == 3);
  CHECK(w.rounds_to(0.4) == 2);
  CHECK_FALSE(w.rounds_to(0.95).has_value());
}

TEST_CASE("missing file and malformed JSON are parse errors") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/carbonsim.json"), ParseError);
  const auto dir = testing::scratch_dir("scenario_bad");
  std::ofstream(dir / "bad.json") << "{ \"schema_version\": 1, ";
  CHECK_THROWS_AS(load_scenario(dir / "bad.json"), ParseError);
}
