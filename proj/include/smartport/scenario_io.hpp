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

// Scenario CSV and run configuration JSON. Column and key layouts are
// documented in docs/formats.md. Hydrogen enters in kg/h and is converted to
// MWh-eq here; nothing downstream sees kg.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include "smartport/mpc_controller.hpp"

namespace smartport {

/// Malformed scenario or configuration input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::vector<std::string> timestamps;
  std::vector<double> res_forecast;    // MW
  std::vector<double> res_confidence;  // MW, band half-width
  std::vector<double> res_actual;      // MW, empty when not supplied
  std::vector<double> load;            // MW
  std::vector<double> h2_demand;       // MWh-eq per hour
  PriceSchedule prices;

  std::size_t size() const { return res_forecast.size(); }
  bool has_actual() const { return !res_actual.empty(); }

  /// Rows [t, t + T), truncated at the end of the scenario.
  ForecastWindow window(std::size_t t, std::size_t T) const {
    if (t >= size()) throw std::out_of_range("window start past scenario end");
    const std::size_t end = std::min(size(), t + T);
    ForecastWindow w;
    for (std::size_t k = t; k < end; ++k) {
      w.res_forecast.push_back(res_forecast[k]);
      w.res_half_width.push_back(res_confidence[k]);
      w.load.push_back(load[k]);
      w.h2_demand.push_back(h2_demand[k]);
      w.prices.push_back(prices.row(k));
    }
    return w;
  }
};

namespace io_detail {

inline const std::vector<std::string>& required_columns() {
  static const std::vector<std::string> cols = {
      "timestamp",
      "res_forecast_mw",
      "res_confidence_mw",
      "shore_load_mw",
      "h2_demand_kg_per_h",
      "price_purchase_eur_per_mwh",
      "price_sell_eur_per_mwh",
      "price_curtail_eur_per_mwh",
      "price_cold_ironing_eur_per_mwh",
      "price_hydrogen_eur_per_mwh",
  };
  return cols;
}

inline constexpr const char* kActualColumn = "res_actual_mw";

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Seconds since the epoch for "YYYY-MM-DDTHH:MM[:SS]", interpreted as UTC.
inline std::int64_t parse_timestamp(const std::string& s) {
  std::tm tm{};
  std::istringstream in(s);
  in >> std::get_time(&tm, "%Y-%m-%dT%H:%M");
  if (in.fail()) throw std::invalid_argument("bad timestamp");
  int sec = 0;
  if (in.peek() == ':') {
    in.get();
    in >> sec;
    if (in.fail()) throw std::invalid_argument("bad timestamp");
  }
  in >> std::ws;
  if (!in.eof()) throw std::invalid_argument("bad timestamp");
  return static_cast<std::int64_t>(timegm(&tm)) + sec;
}

inline double parse_number(const std::string& cell, const std::string& column, int line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size() || !std::isfinite(v)) {
    throw ParseError("row " + std::to_string(line) + ": column " + column +
                     " is not a finite number: '" + cell + "'");
  }
  return v;
}

// Shortest text that reads back as exactly `v`.
inline std::string exact(double v) {
  char buf[32];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::stod(buf) == v) break;
  }
  return buf;
}

}  // namespace io_detail

/// Parses scenario CSV text. `source` names the input in error messages.
/// Row numbers in errors are 1-based file lines (the header is line 1).
inline Scenario parse_scenario(std::istream& in, const std::string& source = "scenario") {
  using io_detail::trim;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source + ": empty file");
  std::vector<std::string> header = io_detail::split_csv(line);
  for (auto& h : header) h = trim(h);

  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& req = io_detail::required_columns();
    if (std::find(req.begin(), req.end(), header[i]) == req.end() &&
        header[i] != io_detail::kActualColumn) {
      throw ParseError(source + ": schema mismatch, unknown column '" + header[i] + "'");
    }
    if (!pos.emplace(header[i], i).second) {
      throw ParseError(source + ": schema mismatch, duplicate column '" + header[i] + "'");
    }
  }
  for (const auto& c : io_detail::required_columns()) {
    if (!pos.count(c)) throw ParseError(source + ": schema mismatch, missing column '" + c + "'");
  }
  const bool with_actual = pos.count(io_detail::kActualColumn) > 0;

  Scenario s;
  int line_no = 1;
  std::int64_t prev_time = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = io_detail::split_csv(line);
    if (cells.size() != header.size()) {
      throw ParseError(source + ": row " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(cells.size()));
    }
    for (auto& c : cells) c = trim(c);
    auto num = [&](const std::string& col) {
      try {
        return io_detail::parse_number(cells[pos.at(col)], col, line_no);
      } catch (const ParseError& e) {
        throw ParseError(source + ": " + e.what());
      }
    };
    auto row_error = [&](const std::string& msg) {
      return ParseError(source + ": row " + std::to_string(line_no) + ": " + msg);
    };

    const std::string stamp = cells[pos.at("timestamp")];
    std::int64_t when = 0;
    try {
      when = io_detail::parse_timestamp(stamp);
    } catch (const std::exception&) {
      throw row_error("timestamp '" + stamp + "' is not YYYY-MM-DDTHH:MM");
    }
    if (!s.timestamps.empty() && when != prev_time + 3600) {
      throw row_error("timestamp " + stamp + " is not one hour after " + s.timestamps.back() +
                      " (gap or disorder)");
    }
    prev_time = when;

    const double forecast = num("res_forecast_mw");
    const double band = num("res_confidence_mw");
    const double load = num("shore_load_mw");
    const double h2_kg = num("h2_demand_kg_per_h");
    for (auto [name, v] : {std::pair{"res_forecast_mw", forecast}, {"res_confidence_mw", band},
                           {"shore_load_mw", load}, {"h2_demand_kg_per_h", h2_kg}}) {
      if (v < 0) throw row_error(std::string(name) + " is negative");
    }
    if (with_actual) {
      const double actual = num(io_detail::kActualColumn);
      if (actual < 0) throw row_error("res_actual_mw is negative");
      const double dev = std::abs(actual - forecast);
      if (dev > band + 1e-9) {
        std::ostringstream msg;
        msg << "res_actual_mw deviates from res_forecast_mw by " << dev
            << " MW, outside the confidence band of " << band << " MW";
        throw row_error(msg.str());
      }
      s.res_actual.push_back(actual);
    }
    s.timestamps.push_back(stamp);
    s.res_forecast.push_back(forecast);
    s.res_confidence.push_back(band);
    s.load.push_back(load);
    s.h2_demand.push_back(hydrogen_kg_to_mwh(h2_kg));
    s.prices.push_back({num("price_purchase_eur_per_mwh"), num("price_sell_eur_per_mwh"),
                        num("price_curtail_eur_per_mwh"), num("price_cold_ironing_eur_per_mwh"),
                        num("price_hydrogen_eur_per_mwh")});
  }
  if (s.size() == 0) throw ParseError(source + ": no data rows");
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario " + path);
  return parse_scenario(in, path);
}

/// Writes at full precision; loading the result reproduces every value.
inline void write_scenario(const Scenario& s, std::ostream& os) {
  using io_detail::exact;
  const auto& cols = io_detail::required_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  if (s.has_actual()) os << ',' << io_detail::kActualColumn;
  os << '\n';
  for (std::size_t t = 0; t < s.size(); ++t) {
    // Pick the kg text whose conversion lands exactly on the stored value.
    double kg = hydrogen_mwh_to_kg(s.h2_demand[t]);
    for (double probe : {kg, std::nextafter(kg, 0.0), std::nextafter(kg, 1e300)}) {
      if (hydrogen_kg_to_mwh(std::max(probe, 0.0)) == s.h2_demand[t]) {
        kg = std::max(probe, 0.0);
        break;
      }
    }
    os << s.timestamps[t] << ',' << exact(s.res_forecast[t]) << ',' << exact(s.res_confidence[t])
       << ',' << exact(s.load[t]) << ',' << exact(kg) << ',' << exact(s.prices.purchase[t]) << ','
       << exact(s.prices.sell[t]) << ',' << exact(s.prices.curtail_penalty[t]) << ','
       << exact(s.prices.cold_ironing[t]) << ',' << exact(s.prices.hydrogen[t]);
    if (s.has_actual()) os << ',' << exact(s.res_actual[t]);
    os << '\n';
  }
}

inline void write_scenario(const Scenario& s, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_scenario(s, os);
  if (!os) throw std::runtime_error("write failed for " + path);
}

/// Everything a run needs besides the scenario.
struct RunConfig {
  int horizon = 12;
  double beta = 0.05;
  int sqrt_segments = 16;
  int square_segments = 16;
  std::uint64_t seed = 1;
  double initial_soc = 0.5;
  double initial_soh = 0.5;
  // Hours to simulate; 0 means as many as the scenario holds.
  int hours = 168;
  bool truncate_errors = true;
  double terminal_soc_value = 0.0;
  double terminal_soh_value = 0.0;
  double solve_time_limit = 60.0;
  long node_limit = 200000;
  long nodes_after_incumbent = 30;
  double relative_gap = 1e-4;
  PortParameters port;

  MpcConfig mpc() const {
    MpcConfig c;
    c.quantile = QuantileConfig::from_beta(beta);
    c.sqrt_segments = sqrt_segments;
    c.square_segments = square_segments;
    c.terminal_soc_value = terminal_soc_value;
    c.terminal_soh_value = terminal_soh_value;
    c.solver.time_limit_seconds = solve_time_limit;
    c.solver.node_limit = node_limit;
    c.solver.nodes_after_incumbent = nodes_after_incumbent;
    c.solver.relative_gap = relative_gap;
    return c;
  }

  PortState initial_state() const { return {initial_soc, initial_soh}; }

  void validate() const {
    if (horizon < 1) throw std::domain_error("horizon must be >= 1");
    if (!(beta > 0 && beta <= 0.5)) throw std::domain_error("beta must lie in (0, 0.5]");
    if (sqrt_segments < 2 || square_segments < 2) {
      throw std::domain_error("segment counts must be >= 2");
    }
    if (hours < 0) throw std::domain_error("hours must be >= 0");
    if (!(solve_time_limit > 0) || node_limit < 1 || !(relative_gap >= 0)) {
      throw std::domain_error("solver limits must be positive");
    }
    port.validate();
    if (!(initial_soc >= port.soc_min && initial_soc <= port.soc_max) ||
        !(initial_soh >= 0 && initial_soh <= 1)) {
      throw std::domain_error("initial state outside its bounds");
    }
  }
};

namespace io_detail {

template <typename T>
void take(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys,
                           const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ParseError(where + ": unknown key '" + it.key() + "'");
  }
}

}  // namespace io_detail

inline nlohmann::json port_to_json(const PortParameters& p) {
  return {{"grid_power_max", p.grid_power_max},
          {"bess_power_max", p.bess_power_max},
          {"bess_capacity", p.bess_capacity},
          {"bess_efficiency", p.bess_efficiency},
          {"hss_capacity_kg", hydrogen_mwh_to_kg(p.hss_capacity)},
          {"fc_power_max", p.fc_power_max},
          {"fc_power_min", p.fc_power_min},
          {"fc_efficiency", p.fc_efficiency},
          {"el_power_max", p.el_power_max},
          {"el_power_min", p.el_power_min},
          {"el_efficiency", p.el_efficiency},
          {"dg_cost", p.dg_cost},
          {"apply_bess_efficiency_to_mean", p.apply_bess_efficiency_to_mean}};
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  return {{"horizon", c.horizon},
          {"beta", c.beta},
          {"soc_min", c.port.soc_min},
          {"soc_max", c.port.soc_max},
          {"sqrt_segments", c.sqrt_segments},
          {"square_segments", c.square_segments},
          {"seed", c.seed},
          {"initial_soc", c.initial_soc},
          {"initial_soh", c.initial_soh},
          {"hours", c.hours},
          {"truncate_errors", c.truncate_errors},
          {"terminal_soc_value", c.terminal_soc_value},
          {"terminal_soh_value", c.terminal_soh_value},
          {"solve_time_limit", c.solve_time_limit},
          {"node_limit", c.node_limit},
          {"nodes_after_incumbent", c.nodes_after_incumbent},
          {"relative_gap", c.relative_gap},
          {"port", port_to_json(c.port)}};
}

/// Reads a configuration object; absent keys keep their defaults and
/// unknown keys are rejected.
inline RunConfig config_from_json(const nlohmann::json& j) {
  using io_detail::take;
  if (!j.is_object()) throw ParseError("config: top level must be an object");
  io_detail::reject_unknown(j,
                            {"horizon", "beta", "soc_min", "soc_max", "sqrt_segments",
                             "square_segments", "seed", "initial_soc", "initial_soh", "hours",
                             "truncate_errors", "terminal_soc_value", "terminal_soh_value",
                             "solve_time_limit", "node_limit", "nodes_after_incumbent",
                             "relative_gap", "port"},
                            "config");
  RunConfig c;
  try {
    take(j, "horizon", c.horizon);
    take(j, "beta", c.beta);
    take(j, "soc_min", c.port.soc_min);
    take(j, "soc_max", c.port.soc_max);
    take(j, "sqrt_segments", c.sqrt_segments);
    take(j, "square_segments", c.square_segments);
    take(j, "seed", c.seed);
    take(j, "initial_soc", c.initial_soc);
    take(j, "initial_soh", c.initial_soh);
    take(j, "hours", c.hours);
    take(j, "truncate_errors", c.truncate_errors);
    take(j, "terminal_soc_value", c.terminal_soc_value);
    take(j, "terminal_soh_value", c.terminal_soh_value);
    take(j, "solve_time_limit", c.solve_time_limit);
    take(j, "node_limit", c.node_limit);
    take(j, "nodes_after_incumbent", c.nodes_after_incumbent);
    take(j, "relative_gap", c.relative_gap);
    if (j.contains("port")) {
      const auto& p = j.at("port");
      if (!p.is_object()) throw ParseError("config: 'port' must be an object");
      io_detail::reject_unknown(
          p,
          {"grid_power_max", "bess_power_max", "bess_capacity", "bess_efficiency",
           "hss_capacity_kg", "fc_power_max", "fc_power_min", "fc_efficiency", "el_power_max",
           "el_power_min", "el_efficiency", "dg_cost", "apply_bess_efficiency_to_mean"},
          "config.port");
      PortParameters& q = c.port;
      take(p, "grid_power_max", q.grid_power_max);
      take(p, "bess_power_max", q.bess_power_max);
      take(p, "bess_capacity", q.bess_capacity);
      take(p, "bess_efficiency", q.bess_efficiency);
      if (p.contains("hss_capacity_kg")) {
        q.hss_capacity = hydrogen_kg_to_mwh(p.at("hss_capacity_kg").get<double>());
      }
      take(p, "fc_power_max", q.fc_power_max);
      take(p, "fc_power_min", q.fc_power_min);
      take(p, "fc_efficiency", q.fc_efficiency);
      take(p, "el_power_max", q.el_power_max);
      take(p, "el_power_min", q.el_power_min);
      take(p, "el_efficiency", q.el_efficiency);
      take(p, "dg_cost", q.dg_cost);
      take(p, "apply_bess_efficiency_to_mean", q.apply_bess_efficiency_to_mean);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  try {
    c.validate();
  } catch (const std::domain_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace smartport
