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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "smartport/harness.hpp"
#include "smartport/results_io.hpp"

namespace smartport {
namespace {

// First `n` rows of the shipped week.
Scenario head(std::size_t n, std::size_t from = 0) {
  static const Scenario week =
      load_scenario(std::string(SMARTPORT_DATA_DIR) + "/genova_week.csv");
  Scenario s;
  for (std::size_t t = from; t < from + n; ++t) {
    s.timestamps.push_back(week.timestamps[t]);
    s.res_forecast.push_back(week.res_forecast[t]);
    s.res_confidence.push_back(week.res_confidence[t]);
    s.load.push_back(week.load[t]);
    s.h2_demand.push_back(week.h2_demand[t]);
    s.prices.push_back(week.prices.row(t));
  }
  return s;
}

// No forecast error at all: zero band, realized equals forecast.
Scenario deterministic(Scenario s) {
  std::fill(s.res_confidence.begin(), s.res_confidence.end(), 0.0);
  s.res_actual = s.res_forecast;
  return s;
}

RunConfig short_config(int hours, int horizon) {
  RunConfig c;
  c.hours = hours;
  c.horizon = horizon;
  return c;
}

RunConfig exact_config(int hours, int horizon) {
  RunConfig c = short_config(hours, horizon);
  c.relative_gap = 0;
  c.nodes_after_incumbent = -1;
  return c;
}

milp::MilpOptions exact_options() {
  milp::MilpOptions o;
  o.time_limit_seconds = 300;
  return o;
}

std::string csv_of(const RunReport& r) {
  std::ostringstream os;
  write_hourly_csv(r, os);
  return os.str();
}

TEST(Harness, RealizedTraceFollowsTheSeed) {
  const Scenario s = head(24);
  RunConfig c = short_config(24, 12);
  const auto a = realized_res(s, c);
  const auto b = realized_res(s, c);
  EXPECT_EQ(a, b);
  ErrorSampler sampler(c.seed, true);
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_DOUBLE_EQ(a[t], s.res_forecast[t] + sampler.draw(0.273));
    EXPECT_LE(std::abs(a[t] - s.res_forecast[t]), s.res_confidence[t] + 1e-12);
  }
  c.seed = 2;
  EXPECT_NE(realized_res(s, c), a);
  const Scenario d = deterministic(s);
  EXPECT_EQ(realized_res(d, c), d.res_forecast);
}

TEST(Harness, RejectsShortScenarios) {
  EXPECT_THROW(run_closed_loop(head(6), short_config(6, 12)), std::domain_error);
  EXPECT_THROW(run_closed_loop(head(12), short_config(24, 12)), std::domain_error);
}

TEST(Harness, ZeroPricesEarnNothing) {
  Scenario s = deterministic(head(4));
  for (auto* v : {&s.prices.purchase, &s.prices.sell, &s.prices.curtail_penalty,
                  &s.prices.cold_ironing, &s.prices.hydrogen}) {
    std::fill(v->begin(), v->end(), 0.0);
  }
  const RunReport r = run_closed_loop(s, short_config(4, 4));
  EXPECT_EQ(r.total_earning, 0.0);
}

// With no forecast error the receding-horizon plan over a shrinking window
// is the full-length optimum, so the bound is attained.
TEST(Harness, DeterministicRunAttainsTheBound) {
  const Scenario s = deterministic(head(12, 6));
  const RunConfig c = exact_config(12, 12);
  const RunReport r = run_closed_loop(s, c);
  const ClairvoyantResult b = clairvoyant_bound(s, c, exact_options());
  ASSERT_EQ(b.status, milp::SolveStatus::kOptimal);
  EXPECT_LE(r.total_earning, b.bound + 1e-6);
  EXPECT_LE(std::abs(b.bound - r.total_earning), 1e-4 * std::abs(b.bound));
}

TEST(Harness, EarningNeverExceedsTheBound) {
  const Scenario s = head(8);
  for (std::uint64_t seed : {1u, 2u}) {
    RunConfig c = short_config(8, 6);
    c.seed = seed;
    const RunReport r = run_closed_loop(s, c);
    const ClairvoyantResult b = clairvoyant_bound(s, c, exact_options());
    EXPECT_LE(r.total_earning, b.bound + 1e-6) << "seed " << seed;
  }
}

TEST(Harness, BoundIgnoresTheSeedWhenRealizationIsGiven) {
  Scenario s = head(12);
  s.res_actual = s.res_forecast;
  s.res_actual[3] += 0.5;
  RunConfig c = short_config(12, 6);
  const double a = clairvoyant_bound(s, c, exact_options()).bound;
  c.seed = 12345;
  EXPECT_EQ(clairvoyant_bound(s, c, exact_options()).bound, a);
}

TEST(Harness, BoundIsMonotoneInSellAndColdIroningPrices) {
  Scenario s = deterministic(head(12, 20));
  const RunConfig c = short_config(12, 6);
  const double base = clairvoyant_bound(s, c, exact_options()).bound;
  for (double& v : s.prices.sell) v *= 1.2;
  const double sell_up = clairvoyant_bound(s, c, exact_options()).bound;
  EXPECT_GE(sell_up, base - 1e-9);
  for (double& v : s.prices.cold_ironing) v += 5;
  EXPECT_GE(clairvoyant_bound(s, c, exact_options()).bound, sell_up - 1e-9);
}

class WeekDay : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    s_ = new Scenario(head(12));
    c_ = new RunConfig(short_config(6, 6));
    r_ = new RunReport(run_closed_loop(*s_, *c_));
  }
  static void TearDownTestSuite() {
    delete r_;
    delete c_;
    delete s_;
  }
  static Scenario* s_;
  static RunConfig* c_;
  static RunReport* r_;
};
Scenario* WeekDay::s_ = nullptr;
RunConfig* WeekDay::c_ = nullptr;
RunReport* WeekDay::r_ = nullptr;

TEST_F(WeekDay, EnergyConservation) {
  const PortParameters& p = c_->port;
  double bess = 0, h2 = 0;
  for (const HourRecord& h : r_->hours) {
    const HourDispatch& d = h.realized.dispatch;
    bess += p.soc_gain() * d.bess_power;
    h2 += p.el_efficiency * d.el_power - d.fc_power / p.fc_efficiency - d.hydrogen_delivery;
  }
  const PortState& last = r_->hours.back().after;
  EXPECT_NEAR((last.soc - c_->initial_soc) * p.bess_capacity, bess, 1e-6);
  EXPECT_NEAR((last.soh - c_->initial_soh) * p.hss_capacity, h2, 1e-6);
}

TEST_F(WeekDay, EarningsAccounting) {
  double total = 0;
  for (std::size_t t = 0; t < r_->hours.size(); ++t) {
    total += stage_earning(r_->hours[t].realized.dispatch, s_->prices.row(t));
  }
  EXPECT_NEAR(r_->total_earning, total, 1e-6);
}

TEST_F(WeekDay, HoursChainAndBalance) {
  ASSERT_EQ(r_->hours.size(), 6u);
  for (std::size_t t = 0; t < r_->hours.size(); ++t) {
    const HourRecord& h = r_->hours[t];
    if (t > 0) EXPECT_EQ(h.before.soc, r_->hours[t - 1].after.soc);
    EXPECT_NEAR(h.balance_residual, 0.0, 1e-9);
    EXPECT_TRUE(h.realized.post_clamp.empty());
    EXPECT_FALSE(h.fallback);
  }
  EXPECT_GE(r_->curtailed_energy, 0.0);
  EXPECT_GE(r_->dg_energy, 0.0);
  EXPECT_EQ(r_->solve_seconds.size(), 6u);
}

TEST_F(WeekDay, SameSeedSameBytes) {
  EXPECT_EQ(csv_of(run_closed_loop(*s_, *c_)), csv_of(*r_));
}

TEST_F(WeekDay, SingleReplicaIsTheClosedLoop) {
  MonteCarloOptions o;
  o.replicas = 1;
  const MonteCarloReport m = run_montecarlo(*s_, *c_, o);
  ASSERT_EQ(m.replicas_completed, 1);
  EXPECT_EQ(m.earnings[0], r_->total_earning);
  EXPECT_FALSE(m.budget_exhausted);
  ASSERT_EQ(m.steps.size(), r_->hours.size());
  for (std::size_t t = 0; t < m.steps.size(); ++t) {
    bool soc = false;
    for (const auto& v : r_->hours[t].realized.pre_clamp) soc = soc || v.constraint == "soc";
    EXPECT_EQ(m.steps[t].soc_violation.events, soc ? 1 : 0);
    EXPECT_EQ(m.steps[t].soc_active.trials, r_->hours[t].soc_chance_active ? 1 : 0);
  }
}

TEST_F(WeekDay, WrittenResultsAgree) {
  const auto dir = std::filesystem::temp_directory_path() / "smartport_harness_test";
  std::filesystem::remove_all(dir);
  write_results(*r_, *c_, dir);
  std::ifstream csv(dir / "hourly.csv");
  std::string line;
  int rows = -1;
  double total = 0;
  while (std::getline(csv, line)) {
    if (++rows == 0) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    total += std::stod(cells.at(30));  // stage_earning_eur
  }
  EXPECT_EQ(rows, 6);
  std::ifstream js(dir / "summary.json");
  const auto j = nlohmann::json::parse(js);
  EXPECT_NEAR(j.at("total_earning_eur").get<double>(), total, 1e-9);
  EXPECT_EQ(j.at("seed").get<std::uint64_t>(), c_->seed);
  EXPECT_EQ(config_from_json(j.at("config")).horizon, 6);
  EXPECT_THROW(write_results(*r_, *c_, "/proc/smartport_no_such_dir"), std::exception);
}

TEST(Harness, MonteCarloBudgetStopsEarly) {
  MonteCarloOptions o;
  o.replicas = 50;
  o.time_budget_seconds = 0.0;
  const MonteCarloReport m = run_montecarlo(head(4), short_config(2, 4), o);
  EXPECT_TRUE(m.budget_exhausted);
  EXPECT_LT(m.replicas_completed, 50);
  o.replicas = 0;
  EXPECT_THROW(run_montecarlo(head(4), short_config(2, 4), o), std::domain_error);
}

TEST(Harness, WorkersDoNotChangeResults) {
  MonteCarloOptions o;
  o.replicas = 3;
  const RunConfig c = short_config(2, 3);
  const MonteCarloReport one = run_montecarlo(head(6), c, o);
  o.workers = 2;
  const MonteCarloReport two = run_montecarlo(head(6), c, o);
  EXPECT_EQ(one.earnings, two.earnings);
}

TEST(Harness, WilsonIntervalReferenceValues) {
  const Proportion p{5, 100};
  const auto [lo, hi] = p.wilson95();
  EXPECT_NEAR(lo, 0.021543, 1e-5);
  EXPECT_NEAR(hi, 0.111752, 1e-5);
  const auto [zlo, zhi] = Proportion{0, 50}.wilson95();
  EXPECT_NEAR(zlo, 0.0, 1e-12);
  EXPECT_NEAR(zhi, 0.071348, 1e-5);
}

// With beta = 0.5 the plan may sit on a state bound with no margin; the
// error then pushes it out about half the time.
TEST(Harness, HalfBetaViolatesHalfTheActiveSteps) {
  Scenario s = head(6);
  RunConfig c = short_config(3, 3);
  c.beta = 0.5;
  c.initial_soc = 0.9;  // starts on the upper bound
  MonteCarloOptions o;
  o.replicas = 60;
  const MonteCarloReport m = run_montecarlo(s, c, o);
  Proportion active;
  for (const auto& st : m.steps) {
    active.events += st.soc_active.events;
    active.trials += st.soc_active.trials;
  }
  ASSERT_GE(active.trials, 30) << "too few active steps to test";
  const auto [lo, hi] = active.wilson95();
  EXPECT_LE(lo, 0.5);
  EXPECT_GE(hi, 0.5);
  EXPECT_NEAR(active.rate(), 0.5, 0.2);
}

}  // namespace
}  // namespace smartport
