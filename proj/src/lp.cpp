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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace carbonsim::lp {

int Problem::add_variable(double cost) {
  objective.push_back(cost);
  return num_vars++;
}

Constraint& Problem::add_constraint(Sense sense, double rhs, std::string name) {
  constraints.push_back(Constraint{{}, sense, rhs, std::move(name)});
  return constraints.back();
}

namespace {

// Standard form: rows of [structural | slack/surplus | artificial] = rhs >= 0.
class Tableau {
 public:
  Tableau(const Problem& problem, const Options& options) : options_(options) {
    n_struct_ = problem.num_vars;
    const auto& rows = problem.constraints;
    m_ = static_cast<int>(rows.size());

    int n_slack = 0;
    int n_art = 0;
    for (const auto& row : rows) {
      const Sense sense = effective_sense(row);
      if (sense != Sense::Equal) ++n_slack;
      if (sense != Sense::LessEqual) ++n_art;
    }
    art_begin_ = n_struct_ + n_slack;
    n_ = art_begin_ + n_art;
    width_ = n_ + 1;
    a_.assign(static_cast<std::size_t>(m_) * width_, 0.0);
    basis_.assign(m_, -1);

    int slack = n_struct_;
    int art = art_begin_;
    for (int i = 0; i < m_; ++i) {
      const auto& row = rows[i];
      const double sign = row.rhs < 0.0 ? -1.0 : 1.0;
      for (const auto& [var, coef] : row.terms) at(i, var) += sign * coef;
      at(i, n_) = sign * row.rhs;
      switch (effective_sense(row)) {
        case Sense::LessEqual:
          at(i, slack) = 1.0;
          basis_[i] = slack++;
          break;
        case Sense::GreaterEqual:
          at(i, slack++) = -1.0;
          at(i, art) = 1.0;
          basis_[i] = art++;
          break;
        case Sense::Equal:
          at(i, art) = 1.0;
          basis_[i] = art++;
          break;
      }
    }
    original_ = a_;
  }

  Status run(const std::vector<double>& cost, int& iterations) {
    // Phase 1: minimise the sum of artificials.
    std::vector<double> phase1(n_, 0.0);
    for (int j = art_begin_; j < n_; ++j) phase1[j] = 1.0;
    set_cost(phase1);
    Status st = iterate(n_, iterations);
    if (st != Status::Optimal) return st;
    if (-reduced_[n_] > options_.feasibility_tolerance * std::max(1.0, rhs_scale())) return Status::Infeasible;
    drive_out_artificials();

    // Phase 2 over structural + slack columns only.
    std::vector<double> phase2(n_, 0.0);
    std::copy(cost.begin(), cost.end(), phase2.begin());
    set_cost(phase2);
    return iterate(art_begin_, iterations);
  }

  std::vector<double> primal() const {
    std::vector<double> x(n_, 0.0);
    for (int i = 0; i < m_; ++i) x[basis_[i]] = at(i, n_);
    refine(x);
    x.resize(n_struct_);
    for (double& v : x) v = std::max(v, 0.0);
    return x;
  }

 private:
  static Sense effective_sense(const Constraint& row) {
    if (row.rhs >= 0.0 || row.sense == Sense::Equal) return row.sense;
    return row.sense == Sense::LessEqual ? Sense::GreaterEqual : Sense::LessEqual;
  }

  double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * width_ + j]; }
  double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * width_ + j]; }
  double orig(int i, int j) const { return original_[static_cast<std::size_t>(i) * width_ + j]; }

  double rhs_scale() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) s = std::max(s, std::abs(orig(i, n_)));
    return s;
  }

  void set_cost(const std::vector<double>& cost) {
    cost_ = cost;
    reduced_.assign(width_, 0.0);
    for (int j = 0; j < n_; ++j) reduced_[j] = cost[j];
    for (int i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j <= n_; ++j) reduced_[j] -= cb * at(i, j);
    }
  }

  void pivot(int r, int c) {
    const double inv = 1.0 / at(r, c);
    for (int j = 0; j <= n_; ++j) at(r, j) *= inv;
    at(r, c) = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (int j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    const double f = reduced_[c];
    if (f != 0.0) {
      for (int j = 0; j <= n_; ++j) reduced_[j] -= f * at(r, j);
      reduced_[c] = 0.0;
    }
    basis_[r] = c;
  }

  Status iterate(int enterable, int& iterations) {
    int degenerate = 0;
    while (true) {
      if (iterations >= options_.max_iterations) return Status::IterationLimit;
      const bool bland = degenerate >= options_.degenerate_switch;

      int enter = -1;
      double best = -options_.optimality_tolerance;
      for (int j = 0; j < enterable; ++j) {
        if (reduced_[j] < best) {
          enter = j;
          if (bland) break;
          best = reduced_[j];
        }
      }
      if (enter < 0) return Status::Optimal;

      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= options_.pivot_tolerance) continue;
        const double q = at(i, n_) / a;
        if (leave < 0 || q < ratio - 1e-12) {
          leave = i;
          ratio = q;
        } else if (q <= ratio + 1e-12) {
          const bool take = bland ? basis_[i] < basis_[leave] : a > at(leave, enter);
          if (take) {
            leave = i;
            ratio = std::min(ratio, q);
          }
        }
      }
      if (leave < 0) return Status::Unbounded;
      degenerate = ratio <= 1e-14 ? degenerate + 1 : 0;
      pivot(leave, enter);
      ++iterations;
    }
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < art_begin_) continue;
      int best = -1;
      double mag = options_.pivot_tolerance;
      for (int j = 0; j < art_begin_; ++j) {
        if (std::abs(at(i, j)) > mag) {
          mag = std::abs(at(i, j));
          best = j;
        }
      }
      // A row with no structural entry left is redundant; its artificial stays
      // basic at zero and can never re-enter.
      if (best >= 0) pivot(i, best);
    }
  }

  // Re-solve B x_B = b on the original data to shed accumulated pivot error.
  void refine(std::vector<double>& x) const {
    if (m_ == 0) return;
    Eigen::MatrixXd basis(m_, m_);
    Eigen::VectorXd rhs(m_);
    for (int i = 0; i < m_; ++i) {
      rhs(i) = orig(i, n_);
      for (int k = 0; k < m_; ++k) basis(i, k) = orig(i, basis_[k]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd xb = lu.solve(rhs);
    if (!xb.allFinite()) return;
    for (int k = 0; k < m_; ++k) {
      const double drift = std::abs(xb(k) - x[basis_[k]]);
      if (drift > 1e-6 * std::max(1.0, std::abs(x[basis_[k]]))) return;
    }
    for (int k = 0; k < m_; ++k) x[basis_[k]] = xb(k);
  }

  Options options_;
  int m_ = 0;
  int n_struct_ = 0;
  int art_begin_ = 0;
  int n_ = 0;
  int width_ = 0;
  std::vector<double> a_;
  std::vector<double> original_;
  std::vector<int> basis_;
  std::vector<double> cost_;
  std::vector<double> reduced_;
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  Solution out;
  Tableau tableau(problem, options);
  out.status = tableau.run(problem.objective, out.iterations);
  if (out.status != Status::Optimal) return out;
  out.x = tableau.primal();
  out.objective = 0.0;
  for (int j = 0; j < problem.num_vars; ++j) out.objective += problem.objective[j] * out.x[j];
  return out;
}

double max_violation(const Problem& problem, const std::vector<double>& x) {
  double worst = 0.0;
  for (double v : x) worst = std::max(worst, -v);
  for (const auto& row : problem.constraints) {
    double lhs = 0.0;
    for (const auto& [var, coef] : row.terms) lhs += coef * x[var];
    switch (row.sense) {
      case Sense::LessEqual: worst = std::max(worst, lhs - row.rhs); break;
      case Sense::GreaterEqual: worst = std::max(worst, row.rhs - lhs); break;
      case Sense::Equal: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  return worst;
}

std::string dump(const Problem& problem) {
  std::ostringstream os;
  os.precision(17);
  os << "minimize";
  for (int j = 0; j < problem.num_vars; ++j) {
    if (problem.objective[j] != 0.0) os << " + " << problem.objective[j] << "*x" << j;
  }
  os << '\n';
  for (const auto& row : problem.constraints) {
    os << (row.name.empty() ? "row" : row.name) << ":";
    for (const auto& [var, coef] : row.terms) os << " + " << coef << "*x" << var;
    os << (row.sense == Sense::LessEqual ? " <= " : row.sense == Sense::Equal ? " = " : " >= ") << row.rhs << '\n';
  }
  return os.str();
}

std::string to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

}  // namespace carbonsim::lp
