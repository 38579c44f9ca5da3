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

// smartport command line: simulate, solve-once, montecarlo, validate.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "smartport/harness.hpp"
#include "smartport/milp/mps.hpp"
#include "smartport/results_io.hpp"
#include "smartport/scenario_io.hpp"

namespace {

using namespace smartport;

struct Common {
  std::string scenario;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
};

void add_common(CLI::App* cmd, Common& c, bool needs_out = true) {
  cmd->add_option("--scenario", c.scenario, "scenario CSV")->required()->check(
      CLI::ExistingFile);
  cmd->add_option("--config", c.config, "run configuration JSON")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "overrides the configured seed");
  if (needs_out) cmd->add_option("--out", c.out, "output directory");
}

RunConfig config_of(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  cfg.validate();
  return cfg;
}

int simulate(const Common& c, bool skip_bound, double bound_seconds) {
  const Scenario s = load_scenario(c.scenario);
  const RunConfig cfg = config_of(c);
  RunReport rep = run_closed_loop(s, cfg);
  if (!skip_bound) {
    milp::MilpOptions opt;
    opt.time_limit_seconds = bound_seconds;
    rep.clairvoyant = clairvoyant_bound(s, cfg, opt);
  }
  write_results(rep, cfg, c.out);
  std::cout << "hours " << rep.hours.size() << "  earning " << rep.total_earning << " EUR";
  if (!skip_bound) std::cout << "  bound " << rep.clairvoyant.bound << " EUR";
  std::cout << "\nwrote " << (std::filesystem::path(c.out) / "hourly.csv").string() << " and "
            << (std::filesystem::path(c.out) / "summary.json").string() << '\n';
  return 0;
}

int solve_once(const Common& c, std::size_t hour, const std::string& mps_path) {
  const Scenario s = load_scenario(c.scenario);
  const RunConfig cfg = config_of(c);
  if (hour >= s.size()) throw std::domain_error("--hour past the end of the scenario");
  const ForecastWindow w = s.window(hour, static_cast<std::size_t>(cfg.horizon));
  PortState state = cfg.initial_state();
  const MpcConfig mc = cfg.mpc();
  if (!mps_path.empty()) {
    const BuiltProblem b = build_problem(state, w, cfg.port, mc);
    milp::write_mps(b.problem, mps_path);
    std::cout << "wrote " << mps_path << '\n';
  }
  const HorizonSolution sol = solve_horizon(state, w, cfg.port, mc);
  nlohmann::json plans = nlohmann::json::array();
  for (const StagePlan& p : sol.plans) {
    plans.push_back({{"import_mw", p.import_power},   {"export_mw", p.export_power},
                     {"dg_mw", p.dg_power},           {"curtailment_mw", p.curtailment},
                     {"bess_mw", p.bess_power},       {"el_mw", p.el_power},
                     {"fc_mw", p.fc_power},           {"alpha_bess", p.alpha_bess},
                     {"alpha_el", p.alpha_el},        {"alpha_fc", p.alpha_fc},
                     {"grid_mode", p.grid_mode},      {"el_on", p.el_on},
                     {"fc_on", p.fc_on},              {"soc", p.soc},
                     {"soh", p.soh},                  {"soc_std", p.soc_root},
                     {"soh_std", p.soh_root}});
  }
  const nlohmann::json out = {{"hour", hour},
                              {"status", milp::to_string(sol.status)},
                              {"soft_mode", sol.soft_mode},
                              {"fallback", sol.fallback},
                              {"objective", sol.objective},
                              {"predicted_earning_eur", sol.predicted_earning},
                              {"nodes", sol.stats.nodes},
                              {"variables", sol.variables},
                              {"rows", sol.rows},
                              {"wall_seconds", sol.wall_seconds},
                              {"plans", plans}};
  std::filesystem::create_directories(c.out);
  const auto path = std::filesystem::path(c.out) / "solve_once.json";
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << out.dump(2) << '\n';
  std::cout << "status " << milp::to_string(sol.status) << "  objective " << sol.objective
            << "\nwrote " << path.string() << '\n';
  return 0;
}

int montecarlo(const Common& c, int replicas, int workers, double budget) {
  const Scenario s = load_scenario(c.scenario);
  const RunConfig cfg = config_of(c);
  MonteCarloOptions opt;
  opt.replicas = replicas;
  opt.workers = workers;
  if (budget > 0) opt.time_budget_seconds = budget;
  const MonteCarloReport m = run_montecarlo(s, cfg, opt);
  write_montecarlo(m, cfg, c.out);
  std::cout << "replicas " << m.replicas_completed << "/" << m.replicas_requested
            << (m.budget_exhausted ? " (time budget exhausted)" : "") << '\n';
  std::cout << "constraint      rate        ci95\n";
  for (const auto& [name, p] : m.pre_clamp) {
    const auto [lo, hi] = p.wilson95();
    std::printf("%-14s  %-10.6f  [%.6f, %.6f]\n", name.c_str(), p.rate(), lo, hi);
  }
  std::cout << "earning mean " << m.mean_earning() << " EUR  stddev " << m.stddev_earning()
            << " EUR\n";
  return 0;
}

int validate(const Common& c) {
  const Scenario s = load_scenario(c.scenario);
  if (!c.config.empty()) {
    const RunConfig cfg = config_of(c);
    if (s.size() < static_cast<std::size_t>(cfg.horizon)) {
      throw std::domain_error("scenario shorter than the horizon");
    }
    if (cfg.hours > 0 && static_cast<std::size_t>(cfg.hours) > s.size()) {
      throw std::domain_error("configured hours exceed the scenario length");
    }
  }
  std::cout << c.scenario << ": " << s.size() << " rows, "
            << (s.has_actual() ? "with" : "without") << " realized RES, ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smart-port energy management: stochastic MPC with chance constraints"};
  app.require_subcommand(1);

  Common common;
  bool skip_bound = false;
  double bound_seconds = 600;
  std::size_t hour = 0;
  std::string mps;
  int replicas = 1;
  int workers = 1;
  double budget = 0;

  auto* sim = app.add_subcommand("simulate", "closed-loop run over a scenario");
  add_common(sim, common);
  sim->add_flag("--skip-bound", skip_bound, "do not solve the perfect-information bound");
  sim->add_option("--bound-seconds", bound_seconds, "time limit of the bound solve")
      ->check(CLI::PositiveNumber);

  auto* once = app.add_subcommand("solve-once", "one horizon solve from the initial state");
  add_common(once, common);
  once->add_option("--hour", hour, "window start row");
  once->add_option("--dump-mps", mps, "write the MILP in MPS format");

  auto* mc = app.add_subcommand("montecarlo", "replicated closed-loop runs");
  add_common(mc, common);
  mc->add_option("--replicas", replicas, "number of replicas")->check(CLI::PositiveNumber);
  mc->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  mc->add_option("--budget-seconds", budget, "stop starting replicas after this long");

  auto* val = app.add_subcommand("validate", "check a scenario, and a config against it");
  add_common(val, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*sim) return simulate(common, skip_bound, bound_seconds);
    if (*once) return solve_once(common, hour, mps);
    if (*mc) return montecarlo(common, replicas, workers, budget);
    return validate(common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
