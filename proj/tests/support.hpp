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

#include <filesystem>
#include <string>

namespace carbonsim::testing {

inline std::filesystem::path source_path(const std::string& relative) {
  return std::filesystem::path(CARBONSIM_SOURCE_DIR) / relative;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("carbonsim_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// One region, one server, a three-point accuracy curve. Valid as built.
inline Scenario tiny_scenario() {
  Scenario s;
  s.name = "tiny";
  s.regions.push_back(Region{"r0", "zero", {{0, 100.0}}});
  EdgeServer e;
  e.id = "s0";
  e.region_id = "r0";
  e.static_power_w = 1.0;
  e.compute_kwh_per_unit = 1e-9;
  e.comm_kwh_per_byte = 1e-11;
  s.servers.push_back(e);
  s.workload.model_kind = ModelKind::MLP;
  s.workload.local_epochs = 2;
  s.workload.batch_size = 10;
  s.workload.total_samples = 1000;
  s.workload.model_bytes = 1000;
  s.workload.sample_bytes = 100;
  s.workload.target_accuracy = 0.9;
  s.workload.accuracy_curve = {{1, 0.5}, {3, 0.8}, {5, 0.95}};
  return s;
}

}  // namespace carbonsim::testing
