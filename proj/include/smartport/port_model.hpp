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

// Deterministic plant and tariff model of a port with cold ironing, a
// battery (BESS) and a hydrogen storage system (electrolyzer, tank, fuel
// cell). Time is discrete with a one-hour step, so MW and MWh are
// numerically interchangeable within a step. Hydrogen is carried as
// MWh-equivalent everywhere; kilograms only appear at I/O boundaries.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace smartport {

/// Kilograms of hydrogen per MWh of equivalent energy.
inline constexpr double kHydrogenKgPerMwh = 30.0;

/// Tolerance used by validate_dispatch for powers (MW) and states (p.u.).
inline constexpr double kDispatchTolerance = 1e-6;

inline double hydrogen_kg_to_mwh(double mass_kg) {
  if (!(mass_kg >= 0.0)) {
    throw std::domain_error("hydrogen mass must be non-negative");
  }
  return mass_kg / kHydrogenKgPerMwh;
}

inline double hydrogen_mwh_to_kg(double energy_mwh) {
  return energy_mwh * kHydrogenKgPerMwh;
}

/// Ratings, capacities, efficiencies and technical minima of the port.
/// Defaults describe the Genova case shipped in data/; `dg_cost` is a
/// synthetic level above every cold-ironing tariff of that scenario.
struct PortParameters {
  double grid_power_max = 16.0;  // MW
  double bess_power_max = 1.0;   // MW
  double bess_capacity = 2.5;    // MWh
  double bess_efficiency = 0.95;
  double soc_min = 0.1;  // p.u.
  double soc_max = 0.9;  // p.u.
  double hss_capacity = 2000.0 / kHydrogenKgPerMwh;  // MWh-eq
  double fc_power_max = 0.25;   // MW
  double fc_power_min = 0.025;  // MW
  double fc_efficiency = 0.6;
  double el_power_max = 1.5;   // MW
  double el_power_min = 0.15;  // MW
  double el_efficiency = 0.7;
  double dg_cost = 300.0;  // EUR/MWh

  // When set, the SoC update scales the battery power by bess_efficiency so
  // that the mean dynamics match the variance propagation. Off by default:
  // the plain update is lossless.
  bool apply_bess_efficiency_to_mean = false;

  /// Factor multiplying P^b/E^b in the SoC update.
  double soc_gain() const {
    return apply_bess_efficiency_to_mean ? bess_efficiency : 1.0;
  }

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw std::domain_error(std::string("PortParameters: ") + what);
    };
    require(grid_power_max > 0 && bess_power_max > 0, "power ratings must be > 0");
    require(bess_capacity > 0 && hss_capacity > 0, "capacities must be > 0");
    require(0 < fc_power_min && fc_power_min <= fc_power_max,
            "need 0 < fc_power_min <= fc_power_max");
    require(0 < el_power_min && el_power_min <= el_power_max,
            "need 0 < el_power_min <= el_power_max");
    require(0 <= soc_min && soc_min < soc_max && soc_max <= 1,
            "need 0 <= soc_min < soc_max <= 1");
    auto eff = [](double e) { return e > 0 && e <= 1; };
    require(eff(bess_efficiency) && eff(fc_efficiency) && eff(el_efficiency),
            "efficiencies must lie in (0, 1]");
    require(std::isfinite(dg_cost), "dg_cost must be finite");
  }
};

/// One hour of tariffs, all in EUR/MWh.
struct PriceRow {
  double purchase = 0;         // c^i
  double sell = 0;             // c^e
  double curtail_penalty = 0;  // c^c
  double cold_ironing = 0;     // c^ci
  double hydrogen = 0;         // c^h
};

struct PriceSchedule {
  std::vector<double> purchase;
  std::vector<double> sell;
  std::vector<double> curtail_penalty;
  std::vector<double> cold_ironing;
  std::vector<double> hydrogen;

  std::size_t size() const { return purchase.size(); }

  PriceRow row(std::size_t t) const {
    return {purchase.at(t), sell.at(t), curtail_penalty.at(t),
            cold_ironing.at(t), hydrogen.at(t)};
  }

  void push_back(const PriceRow& r) {
    purchase.push_back(r.purchase);
    sell.push_back(r.sell);
    curtail_penalty.push_back(r.curtail_penalty);
    cold_ironing.push_back(r.cold_ironing);
    hydrogen.push_back(r.hydrogen);
  }

  // Throws when series lengths differ, a price is not finite, or the
  // cold-ironing tariff is not strictly below the diesel cost.
  void validate(double dg_cost) const {
    const std::size_t n = purchase.size();
    if (sell.size() != n || curtail_penalty.size() != n ||
        cold_ironing.size() != n || hydrogen.size() != n) {
      throw std::domain_error("PriceSchedule: series lengths differ");
    }
    for (std::size_t t = 0; t < n; ++t) {
      const PriceRow r = row(t);
      for (double p : {r.purchase, r.sell, r.curtail_penalty, r.cold_ironing,
                       r.hydrogen}) {
        if (!std::isfinite(p)) {
          throw std::domain_error("PriceSchedule: non-finite price at hour " +
                                  std::to_string(t));
        }
      }
      if (!(r.cold_ironing < dg_cost)) {
        throw std::domain_error(
            "PriceSchedule: cold-ironing tariff must stay below dg_cost (hour " +
            std::to_string(t) + ")");
      }
    }
  }
};

struct PortState {
  double soc = 0.5;  // p.u.
  double soh = 0.5;  // p.u.
};

/// Hourly mean powers in MW. bess_power > 0 means the battery charges.
struct HourDispatch {
  double import_power = 0;
  double export_power = 0;
  double dg_power = 0;
  double curtailment = 0;
  double bess_power = 0;
  double el_power = 0;
  double fc_power = 0;
  double hydrogen_delivery = 0;  // MWh-eq per hour
  double res_power = 0;
  double load = 0;
  bool grid_mode = false;  // true: importing allowed, false: exporting
  bool el_on = false;
  bool fc_on = false;
};

/// SoC after one hour. Not clamped; callers check the SoC window.
inline double soc_step(const PortState& state, double bess_power,
                       const PortParameters& params) {
  return state.soc + params.soc_gain() * bess_power / params.bess_capacity;
}

/// SoH after one hour. Not clamped; callers check [0, 1].
inline double soh_step(const PortState& state, double el_power, double fc_power,
                       double hydrogen_delivery, const PortParameters& params) {
  return state.soh + (params.el_efficiency * el_power -
                      fc_power / params.fc_efficiency - hydrogen_delivery) /
                         params.hss_capacity;
}

/// Sources minus sinks; zero for a balanced hour.
inline double power_balance_residual(const HourDispatch& d) {
  return (d.res_power + d.import_power + d.dg_power + d.fc_power) -
         (d.load + d.export_power + d.bess_power + d.el_power + d.curtailment);
}

/// Port earning for one hour in EUR.
inline double stage_earning(const HourDispatch& d, const PriceRow& p) {
  return p.sell * d.export_power + p.cold_ironing * (d.load - d.dg_power) +
         p.hydrogen * d.hydrogen_delivery - p.purchase * d.import_power -
         p.curtail_penalty * d.curtailment;
}

struct Violation {
  std::string constraint;
  // Positive: amount above the upper limit. Negative: amount below the lower
  // limit. For the power balance: the residual itself.
  double magnitude = 0;
};

inline std::vector<Violation> validate_dispatch(const HourDispatch& d,
                                                const PortParameters& params,
                                                double tol = kDispatchTolerance) {
  std::vector<Violation> out;
  auto box = [&](const char* name, double v, double lo, double hi) {
    if (v > hi + tol) {
      out.push_back({name, v - hi});
    } else if (v < lo - tol) {
      out.push_back({name, v - lo});
    }
  };
  const double g = params.grid_power_max;
  box("grid_import", d.import_power, 0.0, d.grid_mode ? g : 0.0);
  box("grid_export", d.export_power, 0.0, d.grid_mode ? 0.0 : g);
  box("bess_power", d.bess_power, -params.bess_power_max, params.bess_power_max);
  if (d.el_on) {
    box("el_power", d.el_power, params.el_power_min, params.el_power_max);
  } else {
    box("el_power", d.el_power, 0.0, 0.0);
  }
  if (d.fc_on) {
    box("fc_power", d.fc_power, params.fc_power_min, params.fc_power_max);
  } else {
    box("fc_power", d.fc_power, 0.0, 0.0);
  }
  box("dg_power", d.dg_power, 0.0, d.load);
  box("curtailment", d.curtailment, 0.0, d.res_power);
  const double r = power_balance_residual(d);
  if (std::abs(r) > tol) out.push_back({"power_balance", r});
  return out;
}

}  // namespace smartport
