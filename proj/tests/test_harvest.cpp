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
#include "carbonsim/harvest.hpp"

#include "support.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <doctest.h>

using namespace carbonsim;

namespace {

// E[X | X >= 0] for X ~ N(mu, sigma), by composite Simpson integration of
// x * pdf(x) and pdf(x) over [0, mu + 12 sigma].
double integrated_truncated_mean(double mu, double sigma) {
  const auto pdf = [&](double x) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
  };
  const double hi = std::max(mu, 0.0) + 12.0 * sigma;
  const int n = 20000;
  const double h = hi / n;
  double num = 0.0;
  double den = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    const double x = k * h;
    num += w * x * pdf(x);
    den += w * pdf(x);
  }
  return num / den;
}

}  // namespace

TEST_CASE("constant process returns the mean every slot") {
  HarvestParams p{HarvestProcess::Constant, 0.002, 0.0, {}, {}};
  HarvestStream s(p, 5, 0);
  for (int t = 0; t < 20; ++t) CHECK(s.sample(t) == 0.002);
}

TEST_CASE("truncated normal with zero stddev is the mean exactly") {
  HarvestParams p{HarvestProcess::TruncatedNormal, 0.002, 0.0, {}, {}};
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) CHECK(harvest_step(p, rng) == 0.002);
}

TEST_CASE("truncated normal sample mean matches the integrated expectation") {
  HarvestParams p{HarvestProcess::TruncatedNormal, 0.002, 0.001, {}, {}};
  HarvestStream s(p, 99, 3);
  double sum = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const double v = s.sample(t);
    REQUIRE(v >= 0.0);
    sum += v;
  }
  const double expected = integrated_truncated_mean(0.002, 0.001);
  CHECK(std::abs(sum / 10000.0 - expected) <= 0.03 * expected);
}

TEST_CASE("closed-form truncated mean agrees with numerical integration") {
  for (const auto [mu, sigma] : {std::pair{0.002, 0.001}, {0.0, 1.0}, {-1.0, 1.0}, {3.0, 0.5}, {0.1, 2.0}}) {
    CHECK(truncated_normal_mean(mu, sigma) == doctest::Approx(integrated_truncated_mean(mu, sigma)).epsilon(1e-6));
  }
}

TEST_CASE("streams replay bit-identically and differ across servers") {
  HarvestParams p{HarvestProcess::TruncatedNormal, 1.0, 0.5, {}, {}};
  HarvestStream a(p, 42, 0), b(p, 42, 0), c(p, 42, 1);
  bool any_diff = false;
  for (int t = 30; t >= 0; --t) {
    CHECK(a.sample(t) == b.sample(t));
    any_diff = any_diff || a.sample(t) != c.sample(t);
  }
  CHECK(any_diff);
}

TEST_CASE("trace process reads its rows and names the exhausted slot") {
  const auto dir = testing::scratch_dir("harvest_trace");
  const auto path = dir / "trace.csv";
  std::ofstream(path) << "server_id,slot,kwh\ns0,0,0.5\ns1,0,9\ns0,1,0.25\n";
  HarvestParams p{HarvestProcess::Trace, 0.0, 0.0, path, load_harvest_trace(path, "s0")};
  HarvestStream s(p, 1, 0);
  CHECK(s.sample(0) == 0.5);
  CHECK(s.sample(1) == 0.25);
  try {
    (void)s.sample(2);
    FAIL("no exception");
  } catch (const LookupError& e) {
    CHECK(std::string(e.what()).find("slot 2") != std::string::npos);
  }
}

TEST_CASE("battery step examples") {
  auto r = battery_step({0.0, 1.0, 1.0}, 2.0, 0.0);
  CHECK(r.state.level == 1.0);
  CHECK(r.overflow == 1.0);
  r = battery_step({0.5, 1.0, 1.0}, 0.0, 0.5);
  CHECK(r.state.level == 0.0);
  r = battery_step({0.2, 1.0, 0.9}, 0.5, 0.1);
  CHECK(r.state.level == doctest::Approx(0.55).epsilon(1e-12));
  CHECK_THROWS_AS(battery_step({0.2, 1.0, 1.0}, 0.0, 0.3), ContractError);
  CHECK_THROWS_AS(battery_step({0.2, 1.0, 1.0}, -0.1, 0.0), ContractError);
}

TEST_CASE("battery level stays within bounds over random step sequences") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int seq = 0; seq < 200; ++seq) {
    BatteryState b{0.0, 0.5 + u(rng), 0.5 + 0.5 * u(rng)};
    for (int t = 0; t < 50; ++t) {
      const double discharge = b.level * u(rng);
      const double charge = u(rng);
      const auto step = battery_step(b, charge, discharge);
      CHECK(step.state.level >= 0.0);
      CHECK(step.state.level <= step.state.capacity);
      CHECK(step.overflow >= 0.0);
      b = step.state;
    }
  }
}

TEST_CASE("headroom charge fills the battery exactly") {
  BatteryState b{0.2, 1.0, 0.8};
  const double h = battery_headroom(b, 0.1);
  const auto step = battery_step(b, h, 0.1);
  CHECK(step.state.level == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(step.overflow == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("process names round-trip") {
  for (auto p : {HarvestProcess::Constant, HarvestProcess::TruncatedNormal, HarvestProcess::Trace}) {
    CHECK(harvest_process_from_string(to_string(p)) == p);
  }
  CHECK_THROWS(harvest_process_from_string("solar"));
}
