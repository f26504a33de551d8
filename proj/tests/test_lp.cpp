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

#include "carbonsim/lp.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include <doctest.h>

using namespace carbonsim;

namespace {

struct Row {
  std::vector<double> a;
  lp::Sense sense;
  double b;
};

// Gaussian elimination with partial pivoting; nullopt when singular.
std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> m, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    }
    if (std::abs(m[p][c]) < 1e-12) return std::nullopt;
    std::swap(m[p], m[c]);
    std::swap(rhs[p], rhs[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  for (std::size_t c = 0; c < n; ++c) rhs[c] /= m[c][c];
  return rhs;
}

bool feasible(const std::vector<Row>& rows, const std::vector<double>& x) {
  for (double v : x) {
    if (v < -1e-9) return false;
  }
  for (const auto& r : rows) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += r.a[j] * x[j];
    if (r.sense == lp::Sense::LessEqual && lhs > r.b + 1e-9) return false;
    if (r.sense == lp::Sense::GreaterEqual && lhs < r.b - 1e-9) return false;
    if (r.sense == lp::Sense::Equal && std::abs(lhs - r.b) > 1e-9) return false;
  }
  return true;
}

// Minimum over all vertices: every choice of n tight rows among the
// constraints and the bounds x >= 0. Bounded feasible sets only.
std::optional<double> vertex_minimum(const std::vector<double>& c, const std::vector<Row>& rows) {
  const std::size_t n = c.size();
  std::vector<Row> all = rows;
  for (std::size_t j = 0; j < n; ++j) {
    Row r{std::vector<double>(n, 0.0), lp::Sense::GreaterEqual, 0.0};
    r.a[j] = 1.0;
    all.push_back(r);
  }
  std::optional<double> best;
  const std::size_t m = all.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != n) continue;
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    bool has_all_equalities = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].sense == lp::Sense::Equal && !(mask >> k & 1U)) has_all_equalities = false;
    }
    if (!has_all_equalities) continue;
    for (std::size_t k = 0; k < m; ++k) {
      if (mask >> k & 1U) {
        a.push_back(all[k].a);
        b.push_back(all[k].b);
      }
    }
    const auto x = solve_square(a, b);
    if (!x || !feasible(rows, *x)) continue;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += c[j] * (*x)[j];
    if (!best || obj < *best) best = obj;
  }
  return best;
}

}  // namespace

TEST_CASE("textbook problem") {
  // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
  lp::Problem p;
  const int x = p.add_variable(-3.0);
  const int y = p.add_variable(-5.0);
  p.add_constraint(lp::Sense::LessEqual, 4.0).terms = {{x, 1.0}};
  p.add_constraint(lp::Sense::LessEqual, 12.0).terms = {{y, 2.0}};
  p.add_constraint(lp::Sense::LessEqual, 18.0).terms = {{x, 3.0}, {y, 2.0}};
  const auto s = lp::solve(p);
  REQUIRE(s.status == lp::Status::Optimal);
  CHECK(s.objective == doctest::Approx(-36.0).epsilon(1e-12));
  CHECK(s.x[0] == doctest::Approx(2.0));
  CHECK(s.x[1] == doctest::Approx(6.0));
}

TEST_CASE("infeasible and unbounded problems are classified") {
  lp::Problem inf;
  const int a = inf.add_variable(1.0);
  inf.add_constraint(lp::Sense::LessEqual, 1.0).terms = {{a, 1.0}};
  inf.add_constraint(lp::Sense::GreaterEqual, 2.0).terms = {{a, 1.0}};
  CHECK(lp::solve(inf).status == lp::Status::Infeasible);

  lp::Problem unb;
  const int b = unb.add_variable(-1.0);
  const int c = unb.add_variable(0.0);
  unb.add_constraint(lp::Sense::GreaterEqual, 1.0).terms = {{b, 1.0}, {c, -1.0}};
  CHECK(lp::solve(unb).status == lp::Status::Unbounded);
  CHECK_FALSE(lp::dump(unb).empty());
}

TEST_CASE("redundant equality rows are tolerated") {
  lp::Problem p;
  const int x = p.add_variable(1.0);
  const int y = p.add_variable(2.0);
  p.add_constraint(lp::Sense::Equal, 3.0).terms = {{x, 1.0}, {y, 1.0}};
  p.add_constraint(lp::Sense::Equal, 6.0).terms = {{x, 2.0}, {y, 2.0}};
  const auto s = lp::solve(p);
  REQUIRE(s.status == lp::Status::Optimal);
  CHECK(s.objective == doctest::Approx(3.0));
}

TEST_CASE("random small LPs match vertex enumeration") {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 5);
  int optimal = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
    const std::size_t m = 2 + static_cast<std::size_t>(trial % 4);
    std::vector<double> c(n);
    for (auto& v : c) v = u(rng);
    std::vector<Row> rows;
    for (std::size_t k = 0; k < m; ++k) {
      Row r{std::vector<double>(n), lp::Sense::LessEqual, 2.0 * u(rng)};
      for (auto& v : r.a) v = u(rng);
      const int s = pick(rng);
      r.sense = s < 3 ? lp::Sense::LessEqual : (s < 5 ? lp::Sense::GreaterEqual : lp::Sense::Equal);
      rows.push_back(r);
    }
    rows.push_back({std::vector<double>(n, 1.0), lp::Sense::LessEqual, 10.0});

    lp::Problem p;
    for (double v : c) p.add_variable(v);
    for (const auto& r : rows) {
      auto& con = p.add_constraint(r.sense, r.b);
      for (std::size_t j = 0; j < n; ++j) con.terms.emplace_back(static_cast<int>(j), r.a[j]);
    }
    const auto s = lp::solve(p);
    const auto ref = vertex_minimum(c, rows);
    CAPTURE(trial);
    if (!ref) {
      CHECK(s.status == lp::Status::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(s.status == lp::Status::Optimal);
    CHECK(s.objective == doctest::Approx(*ref).epsilon(1e-9).scale(1.0));
    CHECK(lp::max_violation(p, s.x) <= 1e-9);
    ++optimal;
  }
  CHECK(optimal > 100);
  CHECK(infeasible > 10);
}

TEST_CASE("degenerate problem terminates") {
  // Many tight rows through the same vertex.
  lp::Problem p;
  const int x = p.add_variable(-1.0);
  const int y = p.add_variable(-1.0);
  for (int k = 1; k <= 30; ++k) {
    p.add_constraint(lp::Sense::LessEqual, 1.0 + k).terms = {{x, static_cast<double>(k)}, {y, 1.0}};
  }
  p.add_constraint(lp::Sense::LessEqual, 1.0).terms = {{x, 1.0}};
  const auto s = lp::solve(p);
  REQUIRE(s.status == lp::Status::Optimal);
  CHECK(s.objective == doctest::Approx(-2.0));
  CHECK(lp::max_violation(p, s.x) <= 1e-9);
}
