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

#include <random>
#include <sstream>

#include "smartport/scenario_io.hpp"

#ifndef SMARTPORT_DATA_DIR
#error "SMARTPORT_DATA_DIR must point at data/"
#endif

namespace smartport {
namespace {

const std::string kHeader =
    "timestamp,res_forecast_mw,res_confidence_mw,shore_load_mw,h2_demand_kg_per_h,"
    "price_purchase_eur_per_mwh,price_sell_eur_per_mwh,price_curtail_eur_per_mwh,"
    "price_cold_ironing_eur_per_mwh,price_hydrogen_eur_per_mwh";

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in, "test");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

TEST(ScenarioIo, ShippedWeekLoads) {
  const Scenario s = load_scenario(std::string(SMARTPORT_DATA_DIR) + "/genova_week.csv");
  EXPECT_EQ(s.size(), 192u);
  EXPECT_FALSE(s.has_actual());
  for (double b : s.res_confidence) EXPECT_NEAR(b, 0.819, 1e-12);
  EXPECT_NO_THROW(s.prices.validate(PortParameters{}.dg_cost));
}

TEST(ScenarioIo, HydrogenIsConvertedAtIngestion) {
  const Scenario s = parse(kHeader + "\n2019-08-03T00:00,2,0.8,1,19.95,50,40,30,120,120\n");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s.h2_demand[0], 0.665, 1e-12);
}

TEST(ScenarioIo, RejectsSchemaProblems) {
  EXPECT_NE(error_of("timestamp,res_forecast_mw\n").find("missing column"), std::string::npos);
  EXPECT_NE(error_of(kHeader + ",bogus\n").find("unknown column 'bogus'"), std::string::npos);
  EXPECT_NE(error_of(kHeader + "\n2019-08-03T00:00,2,0.8,1,0,50,40,30,120\n").find("row 2"),
            std::string::npos);
  EXPECT_NE(error_of(kHeader + "\n").find("no data rows"), std::string::npos);
  EXPECT_NE(error_of(kHeader + "\n2019-08-03T00:00,x,0.8,1,0,50,40,30,120,120\n").find("row 2"),
            std::string::npos);
}

TEST(ScenarioIo, RejectsTimestampGaps) {
  const std::string text = kHeader +
                           "\n2019-08-03T00:00,2,0.8,1,0,50,40,30,120,120"
                           "\n2019-08-03T01:00,2,0.8,1,0,50,40,30,120,120"
                           "\n2019-08-03T03:00,2,0.8,1,0,50,40,30,120,120\n";
  const std::string e = error_of(text);
  EXPECT_NE(e.find("row 4"), std::string::npos) << e;
  EXPECT_NE(e.find("gap"), std::string::npos) << e;
}

TEST(ScenarioIo, RejectsActualOutsideBand) {
  const std::string head = kHeader + ",res_actual_mw\n";
  EXPECT_NO_THROW(parse(head + "2019-08-03T00:00,2,0.819,1,0,50,40,30,120,120,2.819\n"));
  const std::string e =
      error_of(head + "2019-08-03T00:00,2,0.819,1,0,50,40,30,120,120,2.829\n");
  EXPECT_NE(e.find("row 2"), std::string::npos) << e;
  EXPECT_NE(e.find("confidence band"), std::string::npos) << e;
}

TEST(ScenarioIo, RoundTripIsExact) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  std::ostringstream text;
  text << kHeader << ",res_actual_mw\n";
  for (int t = 0; t < 48; ++t) {
    char stamp[32];
    std::snprintf(stamp, sizeof stamp, "2021-03-%02dT%02d:00", 1 + t / 24, t % 24);
    const double f = 5 * u(rng) + 1;
    const double b = 0.9 * u(rng);
    text.precision(17);
    text << stamp << ',' << f << ',' << b << ',' << 3 * u(rng) << ',' << 30 * u(rng) << ','
         << 100 * u(rng) << ',' << 80 * u(rng) << ',' << 30 * u(rng) << ',' << 150 * u(rng)
         << ',' << 150 * u(rng) << ',' << f + b * (2 * u(rng) - 1) << '\n';
  }
  const Scenario a = parse(text.str());
  std::ostringstream out;
  write_scenario(a, out);
  const Scenario b = parse(out.str());
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a.timestamps, b.timestamps);
  EXPECT_EQ(a.res_forecast, b.res_forecast);
  EXPECT_EQ(a.res_confidence, b.res_confidence);
  EXPECT_EQ(a.res_actual, b.res_actual);
  EXPECT_EQ(a.load, b.load);
  EXPECT_EQ(a.h2_demand, b.h2_demand);
  EXPECT_EQ(a.prices.purchase, b.prices.purchase);
  EXPECT_EQ(a.prices.sell, b.prices.sell);
  EXPECT_EQ(a.prices.curtail_penalty, b.prices.curtail_penalty);
  EXPECT_EQ(a.prices.cold_ironing, b.prices.cold_ironing);
  EXPECT_EQ(a.prices.hydrogen, b.prices.hydrogen);
}

TEST(ScenarioIo, WindowTruncatesAtTheEnd) {
  const Scenario s = load_scenario(std::string(SMARTPORT_DATA_DIR) + "/genova_week.csv");
  EXPECT_EQ(s.window(0, 12).length(), 12u);
  EXPECT_EQ(s.window(185, 12).length(), 7u);
  EXPECT_EQ(s.window(185, 12).res_forecast[0], s.res_forecast[185]);
  EXPECT_THROW(s.window(192, 12), std::out_of_range);
}

TEST(ScenarioIo, ConfigRoundTripAndValidation) {
  RunConfig c;
  c.beta = 0.2;
  c.seed = 99;
  c.port.soc_min = 0.2;
  c.port.hss_capacity = hydrogen_kg_to_mwh(1500);
  const RunConfig d = config_from_json(config_to_json(c));
  EXPECT_EQ(d.beta, 0.2);
  EXPECT_EQ(d.seed, 99u);
  EXPECT_EQ(d.port.soc_min, 0.2);
  EXPECT_NEAR(d.port.hss_capacity, 50.0, 1e-12);
  EXPECT_EQ(config_to_json(c), config_to_json(d));

  EXPECT_THROW(config_from_json({{"betta", 0.1}}), ParseError);
  EXPECT_THROW(config_from_json({{"beta", 0.7}}), ParseError);
  EXPECT_THROW(config_from_json({{"port", {{"bess_capacity", -1}}}}), ParseError);
  EXPECT_THROW(config_from_json({{"horizon", "twelve"}}), ParseError);
  EXPECT_THROW(config_from_json(nlohmann::json::array()), ParseError);
}

TEST(ScenarioIo, ShippedConfigIsTheDefault) {
  const RunConfig c = load_config(std::string(SMARTPORT_DATA_DIR) + "/default.json");
  EXPECT_EQ(config_to_json(c), config_to_json(RunConfig{}));
  EXPECT_THROW(load_config("/nonexistent/config.json"), std::runtime_error);
}

}  // namespace
}  // namespace smartport
