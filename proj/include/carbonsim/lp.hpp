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

#include <string>
#include <utility>
#include <vector>

/// Dense two-phase primal simplex for small LPs:
///   minimize c'x  subject to  rows (<=, =, >=),  x >= 0.
/// Sized for per-slot allocation problems (a few hundred columns).
namespace carbonsim::lp {

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Constraint {
  std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  std::string name;
};

struct Problem {
  int num_vars = 0;
  std::vector<double> objective;  // size num_vars, minimized
  std::vector<Constraint> constraints;

  int add_variable(double cost = 0.0);
  Constraint& add_constraint(Sense sense, double rhs, std::string name = {});
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Options {
  double pivot_tolerance = 1e-9;
  double optimality_tolerance = 1e-11;
  double feasibility_tolerance = 1e-9;
  int max_iterations = 100000;
  /// Consecutive degenerate pivots before switching from Dantzig to Bland's rule.
  int degenerate_switch = 50;
};

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
};

Solution solve(const Problem& problem, const Options& options = {});

/// Largest violation of any row or bound by \p x (0 when feasible).
double max_violation(const Problem& problem, const std::vector<double>& x);

/// Human-readable listing of every row, for solver error reports.
std::string dump(const Problem& problem);

std::string to_string(Status status);

}  // namespace carbonsim::lp
