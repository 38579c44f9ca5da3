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

// Best-bound branch-and-bound over binary variables and SOS2 groups.
//
// Node order: until a first incumbent exists the search is depth first,
// always continuing with the preferred child (the rounding side of a
// binary, the SOS2 side holding the weighted mean) and backtracking to the
// newest open node. Afterwards it is best bound, highest parent bound first
// with ties in creation order, still plunging into the preferred child after
// each branching. Depth first start-up matters on the flat bound plateaus
// that SOS2 branching creates. A node branches on the most
// fractional binary (lowest index on ties); when all binaries are integral
// it branches on the first SOS2 group whose nonzero weights are not
// adjacent, splitting the ordered set where the weighted mean of the group's
// reference values falls.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include "smartport/milp/problem.hpp"
#include "smartport/milp/simplex.hpp"

namespace smartport::milp {

struct MilpOptions {
  SimplexOptions lp;
  long node_limit = 1000000;
  double time_limit_seconds = 60.0;
  double absolute_gap = 1e-6;
  // Nodes within max(absolute_gap, relative_gap * |incumbent|) of the
  // incumbent are pruned.
  double relative_gap = 0.0;
  double integrality_tol = 1e-6;
  double sos2_zero = 1e-9;
  // Optional primal heuristic. It receives an LP point whose binaries are
  // integral but whose SOS2 groups are not, and may rewrite it in place into
  // a candidate. Candidates are audited with check_solution before use.
  std::function<bool(std::vector<double>&)> repair;
  // Optional starting point; used as the first incumbent when it passes
  // check_solution.
  std::vector<double> initial_solution;
  // Nodes allowed after the first incumbent; negative means unlimited.
  long nodes_after_incumbent = -1;
};

namespace detail {

struct BoundChange {
  int var;
  double lower;
  double upper;
};

struct Node {
  std::vector<BoundChange> changes;
  double bound;
  long seq;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.seq > b.seq;
  }
};

// Index of the most fractional binary, or -1.
inline int pick_binary(const MilpProblem& p, const std::vector<double>& x, double tol) {
  int best = -1;
  double best_frac = tol;
  for (int j = 0; j < p.num_variables(); ++j) {
    if (!p.variables[j].binary) continue;
    const double frac = std::min(x[j] - std::floor(x[j]), std::ceil(x[j]) - x[j]);
    if (frac > best_frac) {
      best_frac = frac;
      best = j;
    }
  }
  return best;
}

struct SosSplit {
  int group = -1;
  int split = -1;  // member position shared by both children
  bool prefer_left = true;
};

// First group whose nonzeros are not adjacent. The split point is the first
// member whose reference value reaches the weighted mean reference of the
// current weights, kept strictly inside the nonzero span.
inline SosSplit pick_sos2(const MilpProblem& p, const std::vector<double>& x,
                          double zero) {
  for (int g = 0; g < static_cast<int>(p.sos2.size()); ++g) {
    const Sos2Group& grp = p.sos2[g];
    const auto& m = grp.members;
    int first = -1;
    int last = -1;
    double mass = 0;
    double moment = 0;
    for (int k = 0; k < static_cast<int>(m.size()); ++k) {
      const double v = std::abs(x[m[k]]);
      if (v > zero) {
        if (first < 0) first = k;
        last = k;
        mass += v;
        moment += grp.reference_at(k) * v;
      }
    }
    if (first < 0 || last - first <= 1) continue;
    const double mean = moment / mass;
    int split = first + 1;
    while (split < last - 1 && grp.reference_at(split) < mean) ++split;
    return {g, split, mean <= grp.reference_at(split)};
  }
  return {};
}

}  // namespace detail

/// Maximizes `p` with binaries and SOS2 groups enforced.
inline Solution solve_milp(const MilpProblem& p, const MilpOptions& opt = {}) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };

  SimplexEngine engine(p, opt.lp);
  Solution best;
  best.status = SolveStatus::kInfeasible;

  std::priority_queue<detail::Node, std::vector<detail::Node>, detail::NodeOrder> open;
  long seq = 0;
  open.push({{}, kInfinity, seq++});
  bool lost_nodes = false;
  SolveStatus limit_status = SolveStatus::kOptimal;

  std::optional<detail::Node> plunge;
  CheckTolerances audit;
  audit.integrality = opt.integrality_tol;
  audit.sos2_zero = opt.sos2_zero;

  // Open nodes while no incumbent exists, newest last.
  std::vector<detail::Node> stack;
  long incumbent_node = -1;
  auto improve = [&](const std::vector<double>& x, double obj) {
    if (!best.has_values()) incumbent_node = best.stats.nodes;
    best.values = x;
    best.objective = obj;
    best.stats.incumbent_trace.push_back(obj);
    for (auto& n : stack) open.push(std::move(n));
    stack.clear();
  };
  auto gap = [&] {
    if (!best.has_values()) return opt.absolute_gap;
    return std::max(opt.absolute_gap, opt.relative_gap * std::abs(best.objective));
  };
  auto push_open = [&](detail::Node n) {
    if (best.has_values()) {
      open.push(std::move(n));
    } else {
      stack.push_back(std::move(n));
    }
  };

  if (static_cast<int>(opt.initial_solution.size()) == p.num_variables() &&
      check_solution(p, opt.initial_solution, audit).empty()) {
    improve(opt.initial_solution, p.objective_value(opt.initial_solution));
  }

  while (plunge || !open.empty() || !stack.empty()) {
    if (opt.nodes_after_incumbent >= 0 && incumbent_node >= 0 &&
        best.stats.nodes - incumbent_node >= opt.nodes_after_incumbent) {
      limit_status = SolveStatus::kNodeLimit;
      break;
    }
    if (best.stats.nodes >= opt.node_limit) {
      limit_status = SolveStatus::kNodeLimit;
      break;
    }
    if (elapsed() > opt.time_limit_seconds) {
      limit_status = SolveStatus::kTimeLimit;
      break;
    }
    detail::Node node;
    if (plunge) {
      node = std::move(*plunge);
      plunge.reset();
      if (node.bound <= best.objective + gap()) continue;
    } else if (!stack.empty()) {
      node = std::move(stack.back());
      stack.pop_back();
    } else {
      if (open.top().bound <= best.objective + gap()) break;
      node = open.top();
      open.pop();
    }

    engine.restore_root_bounds();
    for (const auto& c : node.changes) {
      engine.set_bounds(c.var, std::max(engine.lower(c.var), c.lower),
                        std::min(engine.upper(c.var), c.upper));
    }
    const LpStatus st = engine.solve();
    ++best.stats.nodes;
    if (st == LpStatus::kInfeasible) continue;
    if (st == LpStatus::kUnbounded) {
      best.status = SolveStatus::kUnbounded;
      best.objective = kInfinity;
      best.values.clear();
      best.stats.simplex_iterations = engine.iterations();
      best.stats.wall_seconds = elapsed();
      return best;
    }
    if (st == LpStatus::kIterationLimit) {
      lost_nodes = true;
      continue;
    }
    const double obj = engine.objective();
    if (obj <= best.objective + gap()) continue;
    const std::vector<double> x = engine.primal();

    // Pushes the non-preferred child and plunges into the preferred one.
    auto branch = [&](std::vector<detail::BoundChange> preferred,
                      std::vector<detail::BoundChange> other) {
      detail::Node a{node.changes, obj, seq++};
      detail::Node b{node.changes, obj, seq++};
      a.changes.insert(a.changes.end(), preferred.begin(), preferred.end());
      b.changes.insert(b.changes.end(), other.begin(), other.end());
      push_open(std::move(b));
      plunge = std::move(a);
    };

    const int j = detail::pick_binary(p, x, opt.integrality_tol);
    if (j >= 0) {
      std::vector<detail::BoundChange> down{{j, -kInfinity, 0.0}};
      std::vector<detail::BoundChange> up{{j, 1.0, kInfinity}};
      if (x[j] >= 0.5) {
        branch(std::move(up), std::move(down));
      } else {
        branch(std::move(down), std::move(up));
      }
      continue;
    }
    const detail::SosSplit s = detail::pick_sos2(p, x, opt.sos2_zero);
    if (s.group >= 0) {
      if (opt.repair) {
        std::vector<double> candidate = x;
        if (opt.repair(candidate) && check_solution(p, candidate, audit).empty()) {
          const double cobj = p.objective_value(candidate);
          if (cobj > best.objective) improve(candidate, cobj);
          if (cobj >= obj - gap()) continue;  // node closed
        }
      }
      const auto& m = p.sos2[s.group].members;
      std::vector<detail::BoundChange> left;
      std::vector<detail::BoundChange> right;
      for (int k = 0; k < static_cast<int>(m.size()); ++k) {
        if (k > s.split) left.push_back({m[k], 0.0, 0.0});
        if (k < s.split) right.push_back({m[k], 0.0, 0.0});
      }
      if (s.prefer_left) {
        branch(std::move(left), std::move(right));
      } else {
        branch(std::move(right), std::move(left));
      }
      continue;
    }
    improve(x, obj);
  }

  best.stats.simplex_iterations = engine.iterations();
  best.stats.wall_seconds = elapsed();
  double open_bound = -kInfinity;
  if (limit_status != SolveStatus::kOptimal) {
    // Remaining nodes carry their parent bound.
    if (plunge) open_bound = plunge->bound;
    for (const auto& n : stack) open_bound = std::max(open_bound, n.bound);
    while (!open.empty()) {
      open_bound = std::max(open_bound, open.top().bound);
      open.pop();
    }
  }
  const bool found = best.has_values();
  if (limit_status != SolveStatus::kOptimal) {
    best.status = limit_status;
    best.best_bound = std::max(open_bound, best.objective);
  } else if (lost_nodes) {
    best.status = SolveStatus::kIterationLimit;
    best.best_bound = kInfinity;
  } else {
    best.status = found ? SolveStatus::kOptimal : SolveStatus::kInfeasible;
    best.best_bound = found ? best.objective : -kInfinity;
  }
  return best;
}

}  // namespace smartport::milp
