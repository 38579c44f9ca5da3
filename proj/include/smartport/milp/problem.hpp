// Copyright 2026 The smartport Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace smartport::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  int var = 0;
  double coef = 0;
};

struct Row {
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0;
  std::string name;
};

struct Variable {
  double lower = 0;
  double upper = kInfinity;
  double objective = 0;
  bool binary = false;
  std::string name;
};

/// Ordered weights of which at most two adjacent ones may be nonzero.
/// `reference` holds strictly increasing values attached to the members
/// (typically the breakpoint abscissae) that guide branching; when empty
/// the member positions 1, 2, ... are used.
struct Sos2Group {
  std::vector<int> members;
  std::string name;
  std::vector<double> reference;

  double reference_at(std::size_t k) const {
    return reference.empty() ? static_cast<double>(k + 1) : reference[k];
  }
};

/// Maximization problem: objective_offset + sum(objective_j * x_j).
struct MilpProblem {
  std::vector<Variable> variables;
  std::vector<Row> rows;
  std::vector<Sos2Group> sos2;
  double objective_offset = 0;

  int num_variables() const { return static_cast<int>(variables.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_variable(double lower, double upper, double objective,
                   std::string name = {}) {
    variables.push_back({lower, upper, objective, false, std::move(name)});
    return num_variables() - 1;
  }

  int add_binary(double objective, std::string name = {}) {
    variables.push_back({0.0, 1.0, objective, true, std::move(name)});
    return num_variables() - 1;
  }

  int add_row(std::vector<Term> terms, Relation rel, double rhs,
              std::string name = {}) {
    rows.push_back({std::move(terms), rel, rhs, std::move(name)});
    return num_rows() - 1;
  }

  void add_sos2(std::vector<int> members, std::string name = {},
                std::vector<double> reference = {}) {
    sos2.push_back({std::move(members), std::move(name), std::move(reference)});
  }

  int num_binaries() const {
    int n = 0;
    for (const auto& v : variables) n += v.binary ? 1 : 0;
    return n;
  }

  double objective_value(const std::vector<double>& x) const {
    double obj = objective_offset;
    for (int j = 0; j < num_variables(); ++j) obj += variables[j].objective * x[j];
    return obj;
  }

  /// Throws std::domain_error when the problem is malformed.
  void validate() const {
    const int n = num_variables();
    for (int j = 0; j < n; ++j) {
      const auto& v = variables[j];
      if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
        throw std::domain_error("variable " + std::to_string(j) + " has bad bounds");
      }
      if (!std::isfinite(v.objective)) {
        throw std::domain_error("variable " + std::to_string(j) +
                                " has a non-finite objective");
      }
      if (v.binary && (v.lower < 0 || v.upper > 1)) {
        throw std::domain_error("binary " + std::to_string(j) + " outside [0, 1]");
      }
    }
    for (int i = 0; i < num_rows(); ++i) {
      if (!std::isfinite(rows[i].rhs)) {
        throw std::domain_error("row " + std::to_string(i) + " has a non-finite rhs");
      }
      for (const Term& t : rows[i].terms) {
        if (t.var < 0 || t.var >= n || !std::isfinite(t.coef)) {
          throw std::domain_error("row " + std::to_string(i) + " has a bad term");
        }
      }
    }
    for (const auto& g : sos2) {
      if (g.members.size() < 2) throw std::domain_error("SOS2 group needs >= 2 members");
      for (int m : g.members) {
        if (m < 0 || m >= n) throw std::domain_error("SOS2 member out of range");
      }
      if (!g.reference.empty()) {
        if (g.reference.size() != g.members.size()) {
          throw std::domain_error("SOS2 reference values do not match members");
        }
        for (std::size_t k = 1; k < g.reference.size(); ++k) {
          if (!(g.reference[k] > g.reference[k - 1])) {
            throw std::domain_error("SOS2 reference values must increase strictly");
          }
        }
      }
    }
  }
};

enum class SolveStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kNodeLimit,
  kTimeLimit,
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kIterationLimit: return "iteration-limit";
    case SolveStatus::kNodeLimit: return "node-limit";
    case SolveStatus::kTimeLimit: return "time-limit";
  }
  return "unknown";
}

struct SolveStats {
  long nodes = 0;
  long simplex_iterations = 0;
  double wall_seconds = 0;
  // Incumbent objective after each improvement, in discovery order.
  std::vector<double> incumbent_trace;
};

struct Solution {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<double> values;
  double objective = -kInfinity;
  // Proven upper bound on the optimum (maximization).
  double best_bound = kInfinity;
  // Row multipliers of the final LP, signed for the maximization problem.
  std::vector<double> row_duals;
  SolveStats stats;

  bool has_values() const { return !values.empty(); }
};

struct SolutionViolation {
  enum class Kind { kRow, kBound, kIntegrality, kSos2 };
  Kind kind = Kind::kRow;
  int index = 0;  // row, variable or SOS2 group index
  double magnitude = 0;
};

struct CheckTolerances {
  double feasibility = 1e-7;
  double integrality = 1e-6;
  // SOS2 weights at or below this are treated as zero.
  double sos2_zero = 1e-9;
};

inline double row_activity(const Row& row, const std::vector<double>& x) {
  double a = 0;
  for (const Term& t : row.terms) a += t.coef * x[t.var];
  return a;
}

/// Recomputes every row, bound, integrality and SOS2 condition from scratch.
inline std::vector<SolutionViolation> check_solution(const MilpProblem& p,
                                                     const std::vector<double>& x,
                                                     const CheckTolerances& tol = {}) {
  using Kind = SolutionViolation::Kind;
  std::vector<SolutionViolation> out;
  if (static_cast<int>(x.size()) != p.num_variables()) {
    throw std::domain_error("check_solution: value vector has wrong length");
  }
  for (int i = 0; i < p.num_rows(); ++i) {
    const Row& r = p.rows[i];
    const double excess = row_activity(r, x) - r.rhs;
    double v = 0;
    if (r.relation != Relation::kGreaterEqual && excess > tol.feasibility) v = excess;
    if (r.relation != Relation::kLessEqual && excess < -tol.feasibility) v = -excess;
    if (v > 0) out.push_back({Kind::kRow, i, v});
  }
  for (int j = 0; j < p.num_variables(); ++j) {
    const Variable& var = p.variables[j];
    if (x[j] < var.lower - tol.feasibility) {
      out.push_back({Kind::kBound, j, var.lower - x[j]});
    } else if (x[j] > var.upper + tol.feasibility) {
      out.push_back({Kind::kBound, j, x[j] - var.upper});
    }
    if (var.binary) {
      const double frac = std::abs(x[j] - std::round(x[j]));
      if (frac > tol.integrality) out.push_back({Kind::kIntegrality, j, frac});
    }
  }
  for (int g = 0; g < static_cast<int>(p.sos2.size()); ++g) {
    const auto& m = p.sos2[g].members;
    int first = -1;
    int last = -1;
    for (int k = 0; k < static_cast<int>(m.size()); ++k) {
      if (std::abs(x[m[k]]) > tol.sos2_zero) {
        if (first < 0) first = k;
        last = k;
      }
    }
    if (first >= 0 && last - first > 1) {
      out.push_back({Kind::kSos2, g, static_cast<double>(last - first)});
    }
  }
  return out;
}

inline std::vector<SolutionViolation> check_solution(const MilpProblem& p,
                                                     const Solution& s,
                                                     const CheckTolerances& tol = {}) {
  return check_solution(p, s.values, tol);
}

}  // namespace smartport::milp
