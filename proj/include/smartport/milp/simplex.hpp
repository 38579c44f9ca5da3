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

// Bounded-variable revised simplex.
//
// Every row i gets a logical variable s_i with a_i x - s_i = 0, so the row
// relation becomes a bound on s_i and the full system reads [A -I] z = 0
// with l <= z <= u. The basis inverse is kept explicitly, updated by a
// rank-one pivot and rebuilt from a sparse LU factorization every
// `refactor_interval` pivots.
//
// The engine keeps its basis between calls to solve(), so changing bounds
// and solving again restarts from the previous basis. When that basis is
// dual feasible (always the case after bound tightening on boxed variables)
// the dual simplex is used, otherwise a composite primal simplex.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "smartport/milp/problem.hpp"

namespace smartport::milp {

struct SimplexOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-10;
  int refactor_interval = 200;
  // 0 selects 50 * (rows + columns) + 10000.
  long iteration_limit = 0;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_before_bland = 50;
  // Relative cost shift applied during dual simplex to break dual
  // degeneracy; removed again before the primal clean-up pass.
  double cost_perturbation = 1e-7;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

class SimplexEngine {
 public:
  explicit SimplexEngine(const MilpProblem& p, SimplexOptions opt = {})
      : opt_(opt), n_(p.num_variables()), m_(p.num_rows()) {
    p.validate();
    const int total = n_ + m_;
    cols_.resize(n_);
    for (int i = 0; i < m_; ++i) {
      for (const Term& t : p.rows[i].terms) {
        if (t.coef != 0.0) cols_[t.var].push_back({i, t.coef});
      }
    }
    // Merge duplicate entries of a variable within one row.
    for (auto& col : cols_) {
      std::sort(col.begin(), col.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<std::pair<int, double>> merged;
      for (const auto& e : col) {
        if (!merged.empty() && merged.back().first == e.first) {
          merged.back().second += e.second;
        } else {
          merged.push_back(e);
        }
      }
      col.swap(merged);
    }
    cost_.assign(total, 0.0);
    lo_.assign(total, 0.0);
    up_.assign(total, 0.0);
    for (int j = 0; j < n_; ++j) {
      cost_[j] = -p.variables[j].objective;  // internal form minimizes
      lo_[j] = p.variables[j].lower;
      up_[j] = p.variables[j].upper;
    }
    for (int i = 0; i < m_; ++i) {
      const Row& r = p.rows[i];
      lo_[n_ + i] = r.relation == Relation::kLessEqual ? -kInfinity : r.rhs;
      up_[n_ + i] = r.relation == Relation::kGreaterEqual ? kInfinity : r.rhs;
    }
    root_lo_ = lo_;
    root_up_ = up_;
    offset_ = p.objective_offset;
    if (opt_.iteration_limit <= 0) opt_.iteration_limit = 50L * total + 10000;
    reset_basis();
  }

  int num_structural() const { return n_; }
  int num_rows() const { return m_; }

  void set_bounds(int j, double lower, double upper) {
    lo_[j] = lower;
    up_[j] = upper;
  }
  void restore_root_bounds() {
    std::copy(root_lo_.begin(), root_lo_.begin() + n_, lo_.begin());
    std::copy(root_up_.begin(), root_up_.begin() + n_, up_.begin());
  }
  double lower(int j) const { return lo_[j]; }
  double upper(int j) const { return up_[j]; }

  /// All-logical basis with structural variables at a finite bound.
  void reset_basis() {
    const int total = n_ + m_;
    head_.resize(m_);
    state_.assign(total, State::kLower);
    for (int j = 0; j < total; ++j) state_[j] = resting_state(j);
    for (int i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      state_[n_ + i] = State::kBasic;
    }
    x_.assign(total, 0.0);
    needs_refactor_ = true;
  }

  LpStatus solve() {
    const long start = iterations_;
    LpStatus status = LpStatus::kIterationLimit;
    for (int attempt = 0; attempt < 4; ++attempt) {
      // A fresh inverse carried over from the previous solve is reused.
      if (attempt > 0 || needs_refactor_) refactor();
      compute_duals(cost_);
      const bool dual_feasible = place_nonbasics();
      compute_primal();
      if (dual_feasible) {
        status = dual_simplex(start);
        if (status != LpStatus::kOptimal) break;
      }
      status = primal_simplex(start);
      if (status != LpStatus::kOptimal) break;
      // Recompute from scratch with the current inverse; rebuild it and
      // retry when drift shows up.
      compute_primal();
      if (max_primal_infeasibility() <= 10 * opt_.primal_tol) {
        compute_duals(cost_);
        if (max_dual_infeasibility() <= 10 * opt_.dual_tol) break;
      }
      needs_refactor_ = true;
    }
    if (status == LpStatus::kIterationLimit) needs_refactor_ = true;
    return status;
  }

  long iterations() const { return iterations_; }

  double objective() const {
    double obj = offset_;
    for (int j = 0; j < n_; ++j) obj -= cost_[j] * x_[j];
    return obj;
  }

  std::vector<double> primal() const {
    return std::vector<double>(x_.begin(), x_.begin() + n_);
  }

  /// Row multipliers for the maximization problem.
  std::vector<double> row_duals() const {
    std::vector<double> y(m_);
    for (int i = 0; i < m_; ++i) y[i] = -y_[i];
    return y;
  }

 private:
  enum class State : unsigned char { kBasic, kLower, kUpper, kZero };

  // FTRAN of column j into `out`.
  void column(int j, Eigen::VectorXd& out) const {
    out.setZero(m_);
    if (j < n_) {
      for (const auto& [i, a] : cols_[j]) out.noalias() += a * binv_.col(i);
    } else {
      out = -binv_.col(j - n_);
    }
  }

  // Row vector times column j of [A -I].
  double dot_column(const Eigen::VectorXd& v, int j) const {
    if (j >= n_) return -v[j - n_];
    double s = 0;
    for (const auto& [i, a] : cols_[j]) s += a * v[i];
    return s;
  }

  void refactor() {
    if (m_ == 0) {
      needs_refactor_ = false;
      return;
    }
    std::vector<Eigen::Triplet<double>> entries;
    for (int p = 0; p < m_; ++p) {
      const int j = head_[p];
      if (j < n_) {
        for (const auto& [i, a] : cols_[j]) entries.emplace_back(i, p, a);
      } else {
        entries.emplace_back(j - n_, p, -1.0);
      }
    }
    Eigen::SparseMatrix<double> basis(m_, m_);
    basis.setFromTriplets(entries.begin(), entries.end());
    basis.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(basis);
    lu.factorize(basis);
    bool singular = lu.info() != Eigen::Success;
    if (!singular) {
      binv_ = lu.solve(Eigen::MatrixXd::Identity(m_, m_));
      singular = lu.info() != Eigen::Success || !binv_.allFinite();
    }
    if (!singular) {
      // Threshold pivoting can accept a nearly singular basis; the residual
      // of the explicit inverse exposes it.
      Eigen::MatrixXd residual = basis * binv_;
      residual.diagonal().array() -= 1.0;
      singular = !(residual.cwiseAbs().maxCoeff() <= 1e-7);
    }
    if (singular) {
      // Numerically singular basis: fall back to the logical basis.
      for (int j = 0; j < n_ + m_; ++j) {
        if (state_[j] == State::kBasic) state_[j] = resting_state(j);
      }
      for (int i = 0; i < m_; ++i) {
        head_[i] = n_ + i;
        state_[n_ + i] = State::kBasic;
      }
      binv_ = -Eigen::MatrixXd::Identity(m_, m_);
    }
    pivots_since_refactor_ = 0;
    needs_refactor_ = false;
  }

  // Puts each nonbasic variable at a bound matching its reduced cost sign
  // where possible. Returns whether the basis ends up dual feasible.
  bool place_nonbasics() {
    bool feasible = true;
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == State::kBasic) continue;
      const bool has_lo = std::isfinite(lo_[j]);
      const bool has_up = std::isfinite(up_[j]);
      const double d = d_[j];
      if (has_lo && has_up) {
        state_[j] = (lo_[j] == up_[j] || d >= 0) ? State::kLower : State::kUpper;
      } else if (has_lo) {
        state_[j] = State::kLower;
        if (d < -opt_.dual_tol) feasible = false;
      } else if (has_up) {
        state_[j] = State::kUpper;
        if (d > opt_.dual_tol) feasible = false;
      } else {
        state_[j] = State::kZero;
        if (std::abs(d) > opt_.dual_tol) feasible = false;
      }
      x_[j] = nonbasic_value(j);
    }
    return feasible;
  }

  // Nonbasic position at a finite bound, or at zero for a free variable.
  State resting_state(int j) const {
    if (std::isfinite(lo_[j])) return State::kLower;
    if (std::isfinite(up_[j])) return State::kUpper;
    return State::kZero;
  }

  double nonbasic_value(int j) const {
    switch (state_[j]) {
      case State::kLower: return lo_[j];
      case State::kUpper: return up_[j];
      default: return 0.0;
    }
  }

  void compute_primal() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == State::kBasic) continue;
      x_[j] = nonbasic_value(j);
      if (x_[j] == 0.0) continue;
      if (j < n_) {
        for (const auto& [i, a] : cols_[j]) rhs[i] -= a * x_[j];
      } else {
        rhs[j - n_] += x_[j];
      }
    }
    const Eigen::VectorXd xb = binv_ * rhs;
    for (int p = 0; p < m_; ++p) x_[head_[p]] = xb[p];
  }

  void compute_duals(const std::vector<double>& cost) {
    Eigen::VectorXd cb(m_);
    for (int p = 0; p < m_; ++p) cb[p] = cost[head_[p]];
    y_ = binv_.transpose() * cb;
    d_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] != State::kBasic) d_[j] = cost[j] - dot_column(y_, j);
    }
  }

  double infeasibility(int j) const {
    if (x_[j] < lo_[j] - opt_.primal_tol) return lo_[j] - x_[j];
    if (x_[j] > up_[j] + opt_.primal_tol) return x_[j] - up_[j];
    return 0.0;
  }

  double max_primal_infeasibility() const {
    double worst = 0;
    for (int p = 0; p < m_; ++p) worst = std::max(worst, infeasibility(head_[p]));
    return worst;
  }

  double max_dual_infeasibility() const {
    double worst = 0;
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == State::kBasic || lo_[j] == up_[j]) continue;
      const double d = d_[j];
      switch (state_[j]) {
        case State::kLower: worst = std::max(worst, -d); break;
        case State::kUpper: worst = std::max(worst, d); break;
        case State::kZero: worst = std::max(worst, std::abs(d)); break;
        default: break;
      }
    }
    return worst;
  }

  // Replaces basic position r by column q whose FTRAN is `alpha`.
  void pivot(int r, int q, const Eigen::VectorXd& alpha) {
    const Eigen::RowVectorXd pivot_row = binv_.row(r) / alpha[r];
    binv_.noalias() -= alpha * pivot_row;
    binv_.row(r) = pivot_row;
    head_[r] = q;
    state_[q] = State::kBasic;
    ++iterations_;
    if (++pivots_since_refactor_ >= opt_.refactor_interval) {
      refactor();
      compute_primal();
    }
  }

  // Costs shifted away from zero reduced cost in the direction that keeps
  // the current nonbasic placement dual feasible.
  void perturb_costs() {
    perturbed_ = cost_;
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == State::kBasic || lo_[j] == up_[j]) continue;
      // Deterministic spread in [0.5, 1.5) so ties do not reappear.
      const double u = 0.5 + static_cast<double>((j * 2654435761u) % 1000u) / 1000.0;
      const double eps = opt_.cost_perturbation * (1.0 + std::abs(cost_[j])) * u;
      if (state_[j] == State::kLower) perturbed_[j] += eps;
      if (state_[j] == State::kUpper) perturbed_[j] -= eps;
    }
  }

  LpStatus dual_simplex(long start) {
    int degenerate_run = 0;
    Eigen::VectorXd alpha(m_);
    std::vector<double> row_alpha(n_ + m_, 0.0);
    perturb_costs();
    for (;;) {
      if (iterations_ - start >= opt_.iteration_limit) return LpStatus::kIterationLimit;
      compute_duals(perturbed_);
      const bool bland = degenerate_run >= opt_.degenerate_before_bland;

      int r = -1;
      double worst = 0;
      for (int p = 0; p < m_; ++p) {
        const double inf = infeasibility(head_[p]);
        if (inf <= 0) continue;
        if (bland) {
          if (r < 0 || head_[p] < head_[r]) r = p;
        } else if (inf > worst) {
          worst = inf;
          r = p;
        }
      }
      if (r < 0) return LpStatus::kOptimal;

      const int leaving = head_[r];
      const bool to_lower = x_[leaving] < lo_[leaving];
      const Eigen::VectorXd rho = binv_.row(r).transpose();

      // Harris two-pass ratio test on the dual step.
      double bound = kInfinity;
      for (int j = 0; j < n_ + m_; ++j) {
        row_alpha[j] = 0.0;
        if (state_[j] == State::kBasic || lo_[j] == up_[j]) continue;
        const double a = dot_column(rho, j);
        row_alpha[j] = a;
        if (!eligible_dual(j, a, to_lower)) continue;
        bound = std::min(bound, (std::abs(d_[j]) + opt_.dual_tol) / std::abs(a));
      }
      if (!std::isfinite(bound)) return LpStatus::kInfeasible;
      int q = -1;
      double best = -1;
      double best_ratio = kInfinity;
      for (int j = 0; j < n_ + m_; ++j) {
        if (state_[j] == State::kBasic || lo_[j] == up_[j]) continue;
        const double a = row_alpha[j];
        if (!eligible_dual(j, a, to_lower)) continue;
        const double ratio = std::abs(d_[j]) / std::abs(a);
        if (bland) {
          if (ratio < best_ratio - 1e-15 || (ratio <= best_ratio + 1e-15 && q < 0)) {
            best_ratio = ratio;
            q = j;
          }
        } else if (ratio <= bound && std::abs(a) > best) {
          best = std::abs(a);
          q = j;
        }
      }
      if (q < 0) return LpStatus::kInfeasible;

      column(q, alpha);
      // The pivot seen through the row and through the column must agree;
      // a mismatch means the inverse has drifted.
      const bool drifted =
          std::abs(alpha[r] - row_alpha[q]) > 1e-7 * (1.0 + std::abs(alpha[r]));
      if (std::abs(alpha[r]) <= opt_.pivot_tol || (drifted && pivots_since_refactor_ > 0)) {
        refactor();
        compute_primal();
        ++degenerate_run;
        continue;
      }
      const double target = to_lower ? lo_[leaving] : up_[leaving];
      const double step = (x_[leaving] - target) / alpha[r];
      x_[q] += step;
      for (int p = 0; p < m_; ++p) x_[head_[p]] -= step * alpha[p];
      x_[leaving] = target;
      state_[leaving] = to_lower ? State::kLower : State::kUpper;
      degenerate_run = std::abs(d_[q]) <= opt_.dual_tol ? degenerate_run + 1 : 0;
      pivot(r, q, alpha);
    }
  }

  bool eligible_dual(int j, double a, bool to_lower) const {
    if (std::abs(a) <= 1e-9) return false;
    switch (state_[j]) {
      case State::kLower: return to_lower ? a < 0 : a > 0;
      case State::kUpper: return to_lower ? a > 0 : a < 0;
      case State::kZero: return true;
      default: return false;
    }
  }

  LpStatus primal_simplex(long start) {
    int degenerate_run = 0;
    Eigen::VectorXd alpha(m_);
    std::vector<double> phase_cost(n_ + m_, 0.0);
    for (;;) {
      if (iterations_ - start >= opt_.iteration_limit) return LpStatus::kIterationLimit;
      const bool phase_one = max_primal_infeasibility() > 0;
      if (phase_one) {
        std::fill(phase_cost.begin(), phase_cost.end(), 0.0);
        for (int p = 0; p < m_; ++p) {
          const int b = head_[p];
          if (x_[b] < lo_[b] - opt_.primal_tol) phase_cost[b] = -1.0;
          if (x_[b] > up_[b] + opt_.primal_tol) phase_cost[b] = 1.0;
        }
        compute_duals(phase_cost);
      } else {
        compute_duals(cost_);
      }
      const bool bland = degenerate_run >= opt_.degenerate_before_bland;

      int q = -1;
      double best = 0;
      for (int j = 0; j < n_ + m_; ++j) {
        if (state_[j] == State::kBasic || lo_[j] == up_[j]) continue;
        const double d = d_[j];
        bool improving = false;
        switch (state_[j]) {
          case State::kLower: improving = d < -opt_.dual_tol; break;
          case State::kUpper: improving = d > opt_.dual_tol; break;
          case State::kZero: improving = std::abs(d) > opt_.dual_tol; break;
          default: break;
        }
        if (!improving) continue;
        if (bland) {
          q = j;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
        }
      }
      if (q < 0) return phase_one ? LpStatus::kInfeasible : LpStatus::kOptimal;

      const double dir = d_[q] < 0 ? 1.0 : -1.0;
      column(q, alpha);

      // Harris two-pass ratio test; basic p moves at rate -dir * alpha[p].
      auto limit = [&](int p, double slack_tol, int* side) -> double {
        const double rate = -dir * alpha[p];
        if (std::abs(alpha[p]) <= 1e-9) return kInfinity;
        const int b = head_[p];
        const double xb = x_[b];
        if (rate < 0) {
          if (phase_one && xb > up_[b] + opt_.primal_tol) {
            *side = 1;
            return std::max(0.0, xb - up_[b] + slack_tol) / -rate;
          }
          if (std::isfinite(lo_[b]) && xb >= lo_[b] - opt_.primal_tol) {
            *side = -1;
            return std::max(0.0, xb - lo_[b] + slack_tol) / -rate;
          }
        } else {
          if (phase_one && xb < lo_[b] - opt_.primal_tol) {
            *side = -1;
            return std::max(0.0, lo_[b] - xb + slack_tol) / rate;
          }
          if (std::isfinite(up_[b]) && xb <= up_[b] + opt_.primal_tol) {
            *side = 1;
            return std::max(0.0, up_[b] - xb + slack_tol) / rate;
          }
        }
        return kInfinity;
      };
      double bound = kInfinity;
      for (int p = 0; p < m_; ++p) {
        int side = 0;
        bound = std::min(bound, limit(p, opt_.primal_tol, &side));
      }
      int r = -1;
      int r_side = 0;
      double r_step = kInfinity;
      double best_alpha = -1;
      for (int p = 0; p < m_; ++p) {
        int side = 0;
        const double exact = limit(p, 0.0, &side);
        if (!std::isfinite(exact)) continue;
        if (bland) {
          if (exact < r_step - 1e-15 ||
              (exact <= r_step + 1e-15 && (r < 0 || head_[p] < head_[r]))) {
            r = p;
            r_side = side;
            r_step = exact;
          }
        } else if (exact <= bound && std::abs(alpha[p]) > best_alpha) {
          best_alpha = std::abs(alpha[p]);
          r = p;
          r_side = side;
          r_step = exact;
        }
      }

      const double flip = up_[q] - lo_[q];
      if (std::isfinite(flip) && flip <= r_step) {
        for (int p = 0; p < m_; ++p) x_[head_[p]] -= dir * flip * alpha[p];
        state_[q] = dir > 0 ? State::kUpper : State::kLower;
        x_[q] = nonbasic_value(q);
        ++iterations_;
        degenerate_run = 0;
        continue;
      }
      if (r < 0) {
        if (phase_one) {
          // Cannot happen with exact arithmetic; rebuild and retry.
          refactor();
          compute_primal();
          ++degenerate_run;
          if (degenerate_run > 4 * opt_.degenerate_before_bland) {
            return LpStatus::kIterationLimit;
          }
          continue;
        }
        return LpStatus::kUnbounded;
      }
      const int leaving = head_[r];
      x_[q] += dir * r_step;
      for (int p = 0; p < m_; ++p) x_[head_[p]] -= dir * r_step * alpha[p];
      x_[leaving] = r_side < 0 ? lo_[leaving] : up_[leaving];
      state_[leaving] = r_side < 0 ? State::kLower : State::kUpper;
      degenerate_run = r_step <= 1e-12 ? degenerate_run + 1 : 0;
      pivot(r, q, alpha);
    }
  }

  SimplexOptions opt_;
  int n_;
  int m_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> cost_, lo_, up_, root_lo_, root_up_;
  std::vector<double> perturbed_;
  double offset_ = 0;
  std::vector<int> head_;
  std::vector<State> state_;
  std::vector<double> x_;
  std::vector<double> d_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd binv_;
  int pivots_since_refactor_ = 0;
  bool needs_refactor_ = true;
  long iterations_ = 0;
};

/// Upper bound on the LP optimum implied by row multipliers `y` (weak
/// duality). Computed from problem data only; +inf when `y` leaves some
/// unbounded direction open.
inline double dual_objective(const MilpProblem& p, const std::vector<double>& y,
                             double zero_tol = 1e-9) {
  std::vector<double> reduced(p.num_variables());
  for (int j = 0; j < p.num_variables(); ++j) reduced[j] = p.variables[j].objective;
  for (int i = 0; i < p.num_rows(); ++i) {
    for (const Term& t : p.rows[i].terms) reduced[t.var] -= y[i] * t.coef;
  }
  double g = p.objective_offset;
  auto sup = [&](double d, double lo, double hi) {
    if (std::abs(d) <= zero_tol) return 0.0;
    const double v = d > 0 ? hi : lo;
    if (!std::isfinite(v)) return kInfinity;
    return d * v;
  };
  for (int j = 0; j < p.num_variables(); ++j) {
    g += sup(reduced[j], p.variables[j].lower, p.variables[j].upper);
  }
  for (int i = 0; i < p.num_rows(); ++i) {
    const Row& r = p.rows[i];
    const double lo = r.relation == Relation::kLessEqual ? -kInfinity : r.rhs;
    const double hi = r.relation == Relation::kGreaterEqual ? kInfinity : r.rhs;
    g += sup(y[i], lo, hi);
  }
  return g;
}

inline SolveStatus to_solve_status(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return SolveStatus::kOptimal;
    case LpStatus::kInfeasible: return SolveStatus::kInfeasible;
    case LpStatus::kUnbounded: return SolveStatus::kUnbounded;
    case LpStatus::kIterationLimit: return SolveStatus::kIterationLimit;
  }
  return SolveStatus::kIterationLimit;
}

/// Solves the continuous relaxation (binaries and SOS2 groups ignored).
inline Solution solve_lp(const MilpProblem& p, const SimplexOptions& opt = {}) {
  SimplexEngine engine(p, opt);
  Solution s;
  const LpStatus st = engine.solve();
  s.status = to_solve_status(st);
  s.stats.simplex_iterations = engine.iterations();
  if (st == LpStatus::kOptimal) {
    s.values = engine.primal();
    s.objective = engine.objective();
    s.best_bound = s.objective;
    s.row_duals = engine.row_duals();
  } else if (st == LpStatus::kUnbounded) {
    s.objective = kInfinity;
  }
  return s;
}

}  // namespace smartport::milp
