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

// Run outputs: an hourly CSV, a summary JSON and the Monte-Carlo tables.
// Column layouts are documented in docs/formats.md. Nothing wall-clock
// dependent goes into the CSV files, so equal seeds give equal bytes.

#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "smartport/harness.hpp"

namespace smartport {

inline constexpr int kResultsSchemaVersion = 1;

namespace results_detail {

inline std::string join(const std::vector<Violation>& v) {
  std::string out;
  for (const auto& x : v) out += (out.empty() ? "" : ";") + x.constraint;
  return out;
}

inline std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& x : v) out += (out.empty() ? "" : ";") + x;
  return out;
}

inline std::ofstream open(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return os;
}

inline void finish(std::ofstream& os, const std::filesystem::path& p) {
  os.flush();
  if (!os) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace results_detail

inline void write_hourly_csv(const RunReport& r, std::ostream& os) {
  using io_detail::exact;
  os << "hour,timestamp,res_forecast_mw,res_realized_mw,epsilon_mw,load_mw,h2_demand_mwh,"
        "import_mw,export_mw,dg_mw,curtailment_mw,bess_mw,el_mw,fc_mw,h2_delivery_mwh,"
        "grid_mode,el_on,fc_on,alpha_bess,alpha_el,alpha_fc,"
        "planned_bess_mw,planned_el_mw,planned_fc_mw,"
        "soc_start,soc_end,soh_start,soh_end,soc_unclamped,soh_unclamped,"
        "stage_earning_eur,balance_residual_mw,clamp_events,pre_clamp,hard_events,"
        "soc_chance_active,soh_chance_active,solver_status,soft_mode,fallback,nodes,"
        "simplex_iterations,window_objective_eur\n";
  for (const HourRecord& h : r.hours) {
    const HourDispatch& d = h.realized.dispatch;
    const StagePlan& p = h.plan;
    os << h.hour << ',' << h.timestamp << ',' << exact(p.res_forecast) << ','
       << exact(d.res_power) << ',' << exact(h.epsilon) << ',' << exact(d.load) << ','
       << exact(p.h2_demand) << ',' << exact(d.import_power) << ',' << exact(d.export_power)
       << ',' << exact(d.dg_power) << ',' << exact(d.curtailment) << ',' << exact(d.bess_power)
       << ',' << exact(d.el_power) << ',' << exact(d.fc_power) << ','
       << exact(d.hydrogen_delivery) << ',' << int{d.grid_mode} << ',' << int{d.el_on} << ','
       << int{d.fc_on} << ',' << exact(p.alpha_bess) << ',' << exact(p.alpha_el) << ','
       << exact(p.alpha_fc) << ',' << exact(p.bess_power) << ',' << exact(p.el_power) << ','
       << exact(p.fc_power) << ',' << exact(h.before.soc) << ',' << exact(h.after.soc) << ','
       << exact(h.before.soh) << ',' << exact(h.after.soh) << ','
       << exact(h.realized.unclamped_soc) << ',' << exact(h.realized.unclamped_soh) << ','
       << exact(h.stage_earning) << ',' << exact(h.balance_residual) << ','
       << h.realized.clamp_events << ',' << results_detail::join(h.realized.pre_clamp) << ','
       << results_detail::join(h.realized.hard_events) << ',' << int{h.soc_chance_active}
       << ',' << int{h.soh_chance_active} << ',' << milp::to_string(h.solve_status) << ','
       << int{h.soft_mode} << ',' << int{h.fallback} << ',' << h.nodes << ','
       << h.simplex_iterations << ',' << exact(h.window_objective) << '\n';
  }
}

inline nlohmann::json summary_json(const RunReport& r, const RunConfig& c) {
  double mean_solve = 0;
  long nodes = 0;
  for (double s : r.solve_seconds) mean_solve += s;
  if (!r.solve_seconds.empty()) mean_solve /= static_cast<double>(r.solve_seconds.size());
  for (const auto& h : r.hours) nodes += h.nodes;
  nlohmann::json clair = nullptr;
  if (!std::isnan(r.clairvoyant.bound)) {
    clair = {{"bound_eur", r.clairvoyant.bound},
             {"status", milp::to_string(r.clairvoyant.status)},
             {"nodes", r.clairvoyant.nodes},
             {"wall_seconds", r.clairvoyant.wall_seconds}};
    if (!std::isnan(r.clairvoyant.incumbent)) clair["incumbent_eur"] = r.clairvoyant.incumbent;
  }
  return {{"schema_version", kResultsSchemaVersion},
          {"seed", r.seed},
          {"hours", r.hours.size()},
          {"total_earning_eur", r.total_earning},
          {"curtailed_energy_mwh", r.curtailed_energy},
          {"dg_energy_mwh", r.dg_energy},
          {"unserved_load_mwh", r.unserved_load},
          {"hydrogen_shortfall_mwh", r.hydrogen_shortfall},
          {"pre_clamp_violations", r.pre_clamp_counts},
          {"post_clamp_violations", r.post_clamp_counts},
          {"hard_events", r.hard_event_counts},
          {"solver",
           {{"soft_solves", r.soft_solves},
            {"fallback_solves", r.fallback_solves},
            {"total_nodes", nodes},
            {"max_solve_seconds", r.max_solve_seconds()},
            {"mean_solve_seconds", mean_solve},
            {"run_seconds", r.wall_seconds}}},
          {"clairvoyant", clair},
          {"config", config_to_json(c)}};
}

/// Writes hourly.csv and summary.json under `dir`, creating it if needed.
inline void write_results(const RunReport& r, const RunConfig& c,
                          const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto csv = dir / "hourly.csv";
  auto os = results_detail::open(csv);
  write_hourly_csv(r, os);
  results_detail::finish(os, csv);
  const auto js = dir / "summary.json";
  auto oj = results_detail::open(js);
  oj << summary_json(r, c).dump(2) << '\n';
  results_detail::finish(oj, js);
}

inline nlohmann::json montecarlo_json(const MonteCarloReport& m, const RunConfig& c) {
  nlohmann::json table = nlohmann::json::object();
  for (const auto& [name, p] : m.pre_clamp) {
    const auto [lo, hi] = p.wilson95();
    table[name] = {{"violations", p.events}, {"hours", p.trials}, {"rate", p.rate()},
                   {"ci95_low", lo}, {"ci95_high", hi}};
  }
  double worst_soc = 0, worst_soh = 0;
  for (const auto& s : m.steps) {
    worst_soc = std::max(worst_soc, s.soc_violation.rate());
    worst_soh = std::max(worst_soh, s.soh_violation.rate());
  }
  return {{"schema_version", kResultsSchemaVersion},
          {"replicas_requested", m.replicas_requested},
          {"replicas_completed", m.replicas_completed},
          {"budget_exhausted", m.budget_exhausted},
          {"earning_mean_eur", m.mean_earning()},
          {"earning_stddev_eur", m.stddev_earning()},
          {"earnings_eur", m.earnings},
          {"pre_clamp_by_constraint", table},
          {"max_step_soc_violation_rate", worst_soc},
          {"max_step_soh_violation_rate", worst_soh},
          {"wall_seconds", m.wall_seconds},
          {"config", config_to_json(c)}};
}

inline void write_montecarlo_steps_csv(const MonteCarloReport& m, std::ostream& os) {
  using io_detail::exact;
  os << "hour,replicas,soc_violations,soc_rate,soc_ci95_low,soc_ci95_high,soc_active,"
        "soc_active_violations,soh_violations,soh_rate,soh_ci95_low,soh_ci95_high,soh_active,"
        "soh_active_violations\n";
  for (std::size_t t = 0; t < m.steps.size(); ++t) {
    const StepStatistics& s = m.steps[t];
    const auto [sl, sh] = s.soc_violation.wilson95();
    const auto [hl, hh] = s.soh_violation.wilson95();
    os << t << ',' << s.soc_violation.trials << ',' << s.soc_violation.events << ','
       << exact(s.soc_violation.rate()) << ',' << exact(sl) << ',' << exact(sh) << ','
       << s.soc_active.trials << ',' << s.soc_active.events << ',' << s.soh_violation.events
       << ',' << exact(s.soh_violation.rate()) << ',' << exact(hl) << ',' << exact(hh) << ','
       << s.soh_active.trials << ',' << s.soh_active.events << '\n';
  }
}

/// Writes montecarlo.json and montecarlo_steps.csv under `dir`.
inline void write_montecarlo(const MonteCarloReport& m, const RunConfig& c,
                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto js = dir / "montecarlo.json";
  auto oj = results_detail::open(js);
  oj << montecarlo_json(m, c).dump(2) << '\n';
  results_detail::finish(oj, js);
  const auto csv = dir / "montecarlo_steps.csv";
  auto os = results_detail::open(csv);
  write_montecarlo_steps_csv(m, os);
  results_detail::finish(os, csv);
}

}  // namespace smartport
