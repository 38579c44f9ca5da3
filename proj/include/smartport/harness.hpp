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

// Closed-loop simulation, the perfect-information bound and Monte-Carlo
// replicas.
//
// The realized RES trace of a run is fixed before the first solve: the
// scenario's actual column when present, otherwise one truncated Gaussian
// draw per hour from the run seed, in hour order. Negative realizations are
// cut at zero. The controller never sees the trace ahead of time.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "smartport/mpc_controller.hpp"
#include "smartport/scenario_io.hpp"

namespace smartport {

/// One simulated hour.
struct HourRecord {
  int hour = 0;
  std::string timestamp;
  double epsilon = 0;  // realized minus forecast RES, MW
  PortState before, after;
  StagePlan plan;         // hour 0 of the window solution
  RealizedStep realized;  // what the plant did
  double stage_earning = 0;
  double balance_residual = 0;
  // Planned chance rows of the hour that sit on their bound while the
  // state actually carries forecast error (nonzero envelope variance).
  bool soc_chance_active = false;
  bool soh_chance_active = false;
  milp::SolveStatus solve_status = milp::SolveStatus::kInfeasible;
  bool soft_mode = false;
  bool fallback = false;
  long nodes = 0;
  long simplex_iterations = 0;
  double window_objective = 0;
  double solve_seconds = 0;  // not written to the hourly CSV
};

struct ClairvoyantResult {
  double bound = std::numeric_limits<double>::quiet_NaN();  // upper bound, EUR
  double incumbent = std::numeric_limits<double>::quiet_NaN();
  milp::SolveStatus status = milp::SolveStatus::kInfeasible;
  long nodes = 0;
  double wall_seconds = 0;
};

struct RunReport {
  std::vector<HourRecord> hours;
  std::uint64_t seed = 0;
  double total_earning = 0;
  std::map<std::string, int> pre_clamp_counts;
  std::map<std::string, int> post_clamp_counts;
  std::map<std::string, int> hard_event_counts;
  double curtailed_energy = 0;  // MWh
  double dg_energy = 0;         // MWh
  double unserved_load = 0;     // MWh the balance could not cover
  double hydrogen_shortfall = 0;  // MWh-eq of scheduled delivery not served
  int soft_solves = 0;
  int fallback_solves = 0;
  std::vector<double> solve_seconds;
  double wall_seconds = 0;
  ClairvoyantResult clairvoyant;

  double max_solve_seconds() const {
    double m = 0;
    for (double s : solve_seconds) m = std::max(m, s);
    return m;
  }
};

namespace harness_detail {

inline std::size_t simulated_hours(const Scenario& s, const RunConfig& c) {
  const std::size_t n = c.hours > 0 ? static_cast<std::size_t>(c.hours) : s.size();
  if (n > s.size()) {
    throw std::domain_error("config asks for " + std::to_string(n) + " hours, scenario has " +
                            std::to_string(s.size()));
  }
  if (s.size() < static_cast<std::size_t>(c.horizon)) {
    throw std::domain_error("scenario shorter than the horizon");
  }
  return n;
}

// Chance row of a state on its bound while the state is random.
inline bool chance_active(double mean, double root, double variance, double theta, double lo,
                          double hi) {
  constexpr double kTol = 1e-6;
  if (!(variance > 0)) return false;
  return mean + theta * root >= hi - kTol || mean - theta * root <= lo + kTol;
}

}  // namespace harness_detail

/// Realized RES for the simulated hours.
inline std::vector<double> realized_res(const Scenario& s, const RunConfig& c) {
  const std::size_t n = harness_detail::simulated_hours(s, c);
  std::vector<double> out(n);
  if (s.has_actual()) {
    for (std::size_t t = 0; t < n; ++t) out[t] = std::max(0.0, s.res_actual[t]);
    return out;
  }
  ErrorSampler sampler(c.seed, c.truncate_errors);
  for (std::size_t t = 0; t < n; ++t) {
    const double e = sampler.draw(s.res_confidence[t] / kErrorBandSigmas);
    out[t] = std::max(0.0, s.res_forecast[t] + e);
  }
  return out;
}

/// Upper bound on the earning of any causal controller over the simulated
/// hours: one deterministic MILP over the whole run with the realized RES
/// as forecast and no error band. The bound is the branch-and-bound proven
/// bound, valid also when the search stops at its limits.
inline ClairvoyantResult clairvoyant_bound(const Scenario& s, const RunConfig& c,
                                           const std::vector<double>& realized,
                                           milp::MilpOptions opt = {}) {
  const std::size_t n = harness_detail::simulated_hours(s, c);
  if (realized.size() != n) throw std::domain_error("realized trace length mismatch");
  ForecastWindow w = s.window(0, n);
  w.res_forecast = realized;
  std::fill(w.res_half_width.begin(), w.res_half_width.end(), 0.0);
  MpcConfig mc = c.mpc();
  mc.terminal_soc_value = 0;
  mc.terminal_soh_value = 0;
  const BuiltProblem b = build_problem(c.initial_state(), w, c.port, mc);
  const milp::Solution sol = milp::solve_milp(b.problem, opt);
  ClairvoyantResult r;
  r.status = sol.status;
  r.nodes = sol.stats.nodes;
  r.wall_seconds = sol.stats.wall_seconds;
  r.bound = sol.best_bound;
  if (sol.has_values()) r.incumbent = sol.objective;
  return r;
}

inline ClairvoyantResult clairvoyant_bound(const Scenario& s, const RunConfig& c,
                                           milp::MilpOptions opt = {}) {
  return clairvoyant_bound(s, c, realized_res(s, c), std::move(opt));
}

/// Receding-horizon run: solve the window, apply hour 0 under the realized
/// RES, move on. Earnings are accounted on the realized dispatch.
inline RunReport run_closed_loop(const Scenario& s, const RunConfig& c) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  c.validate();
  const std::size_t n = harness_detail::simulated_hours(s, c);
  const std::vector<double> res = realized_res(s, c);
  const MpcConfig mc = c.mpc();

  RunReport rep;
  rep.seed = c.seed;
  PortState state = c.initial_state();
  for (std::size_t t = 0; t < n; ++t) {
    const ForecastWindow w = s.window(t, static_cast<std::size_t>(c.horizon));
    const HorizonSolution sol = solve_horizon(state, w, c.port, mc);

    HourRecord h;
    h.hour = static_cast<int>(t);
    h.timestamp = s.timestamps[t];
    h.epsilon = res[t] - s.res_forecast[t];
    h.before = state;
    h.plan = sol.plans.front();
    h.realized = realize_step(h.plan, h.epsilon, state, c.port);
    h.after = h.realized.next;
    h.stage_earning = stage_earning(h.realized.dispatch, s.prices.row(t));
    h.balance_residual = power_balance_residual(h.realized.dispatch);
    const double theta = mc.quantile.theta;
    h.soc_chance_active =
        harness_detail::chance_active(h.plan.soc, h.plan.soc_root, sol.envelope.soc_var[1], theta,
                                      c.port.soc_min, c.port.soc_max);
    h.soh_chance_active = harness_detail::chance_active(h.plan.soh, h.plan.soh_root,
                                                        sol.envelope.soh_var[1], theta, 0.0, 1.0);
    h.solve_status = sol.status;
    h.soft_mode = sol.soft_mode;
    h.fallback = sol.fallback;
    h.nodes = sol.stats.nodes;
    h.simplex_iterations = sol.stats.simplex_iterations;
    h.window_objective = sol.objective;
    h.solve_seconds = sol.wall_seconds;

    const HourDispatch& d = h.realized.dispatch;
    rep.total_earning += h.stage_earning;
    rep.curtailed_energy += d.curtailment;
    rep.dg_energy += d.dg_power;
    rep.unserved_load += std::max(0.0, -h.balance_residual);
    rep.hydrogen_shortfall += std::max(0.0, h.plan.h2_demand - d.hydrogen_delivery);
    for (const auto& v : h.realized.pre_clamp) ++rep.pre_clamp_counts[v.constraint];
    for (const auto& v : h.realized.post_clamp) ++rep.post_clamp_counts[v.constraint];
    for (const auto& e : h.realized.hard_events) ++rep.hard_event_counts[e];
    rep.soft_solves += sol.soft_mode ? 1 : 0;
    rep.fallback_solves += sol.fallback ? 1 : 0;
    rep.solve_seconds.push_back(sol.wall_seconds);

    state = h.after;
    rep.hours.push_back(std::move(h));
  }
  rep.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

/// Binomial proportion with a 95% Wilson score interval.
struct Proportion {
  long events = 0;
  long trials = 0;

  double rate() const { return trials > 0 ? static_cast<double>(events) / trials : 0.0; }

  std::pair<double, double> wilson95() const {
    if (trials == 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double nt = static_cast<double>(trials);
    const double p = rate();
    const double denom = 1 + z * z / nt;
    const double centre = (p + z * z / (2 * nt)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / nt + z * z / (4 * nt * nt)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
  }
};

/// Per-hour statistics across replicas.
struct StepStatistics {
  Proportion soc_violation;  // pre-clamp SoC outside its box
  Proportion soh_violation;  // pre-clamp SoH outside [0, 1]
  // Same events restricted to replicas whose planned chance row was tight.
  Proportion soc_active;
  Proportion soh_active;
};

struct MonteCarloReport {
  int replicas_requested = 0;
  int replicas_completed = 0;
  bool budget_exhausted = false;
  std::vector<double> earnings;  // by replica index, completed ones only
  std::map<std::string, Proportion> pre_clamp;  // per constraint, over all hours
  std::vector<StepStatistics> steps;
  double wall_seconds = 0;

  double mean_earning() const {
    double s = 0;
    for (double e : earnings) s += e;
    return earnings.empty() ? 0.0 : s / static_cast<double>(earnings.size());
  }
  double stddev_earning() const {
    if (earnings.size() < 2) return 0.0;
    const double m = mean_earning();
    double s = 0;
    for (double e : earnings) s += (e - m) * (e - m);
    return std::sqrt(s / static_cast<double>(earnings.size() - 1));
  }
};

struct MonteCarloOptions {
  int replicas = 1;
  // Worker threads; each replica is independent.
  int workers = 1;
  // No replica starts once this much wall time has passed.
  double time_budget_seconds = std::numeric_limits<double>::infinity();
};

/// Runs replicas with seeds config.seed, config.seed + 1, ... Replica 0 is
/// exactly run_closed_loop(s, c).
inline MonteCarloReport run_montecarlo(const Scenario& s, const RunConfig& c,
                                       const MonteCarloOptions& opt) {
  using Clock = std::chrono::steady_clock;
  if (opt.replicas < 1) throw std::domain_error("replicas must be >= 1");
  if (opt.workers < 1) throw std::domain_error("workers must be >= 1");
  const auto t0 = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  std::vector<RunReport> runs(static_cast<std::size_t>(opt.replicas));
  std::vector<char> done(runs.size(), 0);
  std::atomic<int> next{0};
  std::atomic<bool> stopped{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= opt.replicas) return;
      if (elapsed() > opt.time_budget_seconds) {
        stopped = true;
        return;
      }
      try {
        RunConfig rc = c;
        rc.seed = c.seed + static_cast<std::uint64_t>(r);
        runs[r] = run_closed_loop(s, rc);
        done[r] = 1;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  if (opt.workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < opt.workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  MonteCarloReport rep;
  rep.replicas_requested = opt.replicas;
  rep.budget_exhausted = stopped;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (!done[r]) continue;
    const RunReport& run = runs[r];
    ++rep.replicas_completed;
    rep.earnings.push_back(run.total_earning);
    if (rep.steps.size() < run.hours.size()) rep.steps.resize(run.hours.size());
    for (std::size_t t = 0; t < run.hours.size(); ++t) {
      const HourRecord& h = run.hours[t];
      bool soc = false, soh = false;
      for (const auto& v : h.realized.pre_clamp) {
        soc = soc || v.constraint == "soc";
        soh = soh || v.constraint == "soh";
      }
      StepStatistics& st = rep.steps[t];
      ++st.soc_violation.trials;
      ++st.soh_violation.trials;
      st.soc_violation.events += soc ? 1 : 0;
      st.soh_violation.events += soh ? 1 : 0;
      if (h.soc_chance_active) {
        ++st.soc_active.trials;
        st.soc_active.events += soc ? 1 : 0;
      }
      if (h.soh_chance_active) {
        ++st.soh_active.trials;
        st.soh_active.events += soh ? 1 : 0;
      }
      for (const char* name : {"bess_power", "el_power", "fc_power", "soc", "soh"}) {
        Proportion& p = rep.pre_clamp[name];
        ++p.trials;
        for (const auto& v : h.realized.pre_clamp) p.events += v.constraint == name ? 1 : 0;
      }
    }
  }
  rep.wall_seconds = elapsed();
  return rep;
}

}  // namespace smartport
