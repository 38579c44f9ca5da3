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

// Receding-horizon controller. Each hour it assembles a chance-constrained
// MILP over the lookahead window, solves it, and keeps only the first hour.
//
// Formulation notes:
//  * Device powers are planned means. The forecast error is split by the
//    participation factors, which must sum to one, so the balance row uses
//    the forecast RES only.
//  * Power boxes are tightened by theta * alpha * sigma.
//  * The variance of SoC/SoH is a sum of per-hour (alpha * sigma)^2 terms.
//    The squares are chord interpolants on a lambda grid. They enter the
//    constraints only through upper-side tightening, so the solver picks the
//    chord on its own and no SOS2 marker is needed.
//  * The square roots of the state variances are SOS2 interpolants, shifted
//    up by their worst-case gap so the tightening is never optimistic.
//  * Hours with zero error band add no groups and no tightening.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "smartport/chance.hpp"
#include "smartport/milp/branch_and_bound.hpp"
#include "smartport/port_model.hpp"
#include "smartport/uncertainty.hpp"

namespace smartport {

/// Lookahead data for one solve. Hydrogen demand is in MWh-eq per hour.
struct ForecastWindow {
  std::vector<double> res_forecast;
  std::vector<double> res_half_width;
  std::vector<double> load;
  std::vector<double> h2_demand;
  PriceSchedule prices;

  std::size_t length() const { return res_forecast.size(); }

  ResForecast forecast() const { return {res_forecast, res_half_width}; }

  void validate(double dg_cost) const {
    const std::size_t T = length();
    if (T == 0) throw std::domain_error("ForecastWindow: empty window");
    if (res_half_width.size() != T || load.size() != T || h2_demand.size() != T ||
        prices.size() != T) {
      throw std::domain_error("ForecastWindow: series lengths differ");
    }
    forecast().validate();
    for (std::size_t k = 0; k < T; ++k) {
      if (!(load[k] >= 0) || !(h2_demand[k] >= 0)) {
        throw std::domain_error("ForecastWindow: negative load or hydrogen demand at hour " +
                                std::to_string(k));
      }
    }
    prices.validate(dg_cost);
  }
};

struct MpcConfig {
  QuantileConfig quantile = QuantileConfig::from_beta(0.05);
  int sqrt_segments = 16;
  int square_segments = 16;
  // Value of energy left in storage at the end of the window, EUR/MWh.
  double terminal_soc_value = 0.0;
  double terminal_soh_value = 0.0;
  // Soft-mode slack price as a multiple of the largest price in the window.
  double slack_price_factor = 10.0;
  // Tangent-restriction passes that seed the search with a feasible plan,
  // and the nodes each pass may spend after its first incumbent.
  int tangent_passes = 2;
  long tangent_nodes = 30;
  // Its time limit bounds a whole solve_horizon call.
  milp::MilpOptions solver;
};

/// Decision vector of one hour, planned means.
struct StagePlan {
  double import_power = 0, export_power = 0, dg_power = 0, curtailment = 0;
  double bess_power = 0, el_power = 0, fc_power = 0;
  double alpha_bess = 1, alpha_el = 0, alpha_fc = 0;
  bool grid_mode = false, el_on = false, fc_on = false;
  // Inputs echoed for convenience.
  double res_forecast = 0, res_sigma = 0, load = 0, h2_demand = 0;
  // Predicted end-of-hour state and the modelled standard deviations.
  double soc = 0, soh = 0, soc_root = 0, soh_root = 0;

  Participation participation() const { return {alpha_bess, alpha_el, alpha_fc}; }

  /// Planned dispatch at the forecast RES.
  HourDispatch dispatch() const {
    HourDispatch d;
    d.import_power = import_power;
    d.export_power = export_power;
    d.dg_power = dg_power;
    d.curtailment = curtailment;
    d.bess_power = bess_power;
    d.el_power = el_power;
    d.fc_power = fc_power;
    d.hydrogen_delivery = h2_demand;
    d.res_power = res_forecast;
    d.load = load;
    d.grid_mode = grid_mode;
    d.el_on = el_on;
    d.fc_on = fc_on;
    return d;
  }
};

/// Variable indices of one hour; -1 when the variable was not created.
struct HourVars {
  int import_power = -1, export_power = -1, dg_power = -1, curtailment = -1;
  int bess_power = -1, el_power = -1, fc_power = -1;
  int alpha_bess = -1, alpha_el = -1, alpha_fc = -1;
  int grid_mode = -1, el_on = -1, fc_on = -1;
  int soc = -1, soh = -1;  // end-of-hour state
  std::vector<int> lambda_bess, lambda_h2;   // square interpolation weights
  std::vector<int> root_soc, root_soh;       // SOS2 weights of the roots
  std::vector<int> slacks;
};

struct ProblemLayout {
  std::vector<HourVars> hours;
  PiecewiseCurve square;               // unit curve a -> a^2 on [0, 1]
  std::vector<PiecewiseCurve> soc_root, soh_root;  // per hour, shifted
  double h2_spread = 1.0;              // max of eta_el and 1 / eta_fc
  bool soft = false;
  int sos2_groups = 0;
};

/// Per-hour variances at which the state-row roots are replaced by their
/// tangent lines. A tangent of a concave function lies above it, so the
/// resulting problem is a restriction of the SOS2 model without groups.
struct RootTangents {
  std::vector<double> soc_psi, soh_psi;
};

struct BuiltProblem {
  milp::MilpProblem problem;
  ProblemLayout layout;
};

namespace detail {

inline double window_max_price(const ForecastWindow& w) {
  double m = 1.0;
  for (std::size_t k = 0; k < w.length(); ++k) {
    for (double v : {w.prices.purchase[k], w.prices.sell[k], w.prices.curtail_penalty[k],
                     w.prices.cold_ironing[k], w.prices.hydrogen[k]}) {
      m = std::max(m, std::abs(v));
    }
  }
  return m;
}

}  // namespace detail

/// Assembles the window MILP. With `soft` set, every state-bound row gets a
/// nonnegative slack priced at slack_price_factor times the largest price.
/// With `tangents` set, the roots in the state rows are tangent lines and no
/// SOS2 group is emitted; the variable layout is unchanged.
inline BuiltProblem build_problem(const PortState& state, const ForecastWindow& w,
                                  const PortParameters& params, const MpcConfig& cfg,
                                  bool soft = false, const RootTangents* tangents = nullptr) {
  using milp::Relation;
  using milp::Term;
  params.validate();
  w.validate(params.dg_cost);
  if (cfg.sqrt_segments < 2 || cfg.square_segments < 2) {
    throw std::domain_error("curve segment counts must be >= 2");
  }
  const int T = static_cast<int>(w.length());
  const double theta = cfg.quantile.theta;
  const double g = params.grid_power_max;
  const double soc_coef = params.soc_gain() / params.bess_capacity;
  const double eh = params.hss_capacity;
  const double var_s = std::pow(params.bess_efficiency / params.bess_capacity, 2);
  const double var_h = 1.0 / (eh * eh);

  BuiltProblem out;
  milp::MilpProblem& p = out.problem;
  ProblemLayout& L = out.layout;
  L.soft = soft;
  L.h2_spread = std::max(params.el_efficiency, 1.0 / params.fc_efficiency);
  L.square = build_square_curve(1.0, 1.0, cfg.square_segments);
  L.hours.resize(T);
  const double slack_price =
      cfg.slack_price_factor * detail::window_max_price(w);

  auto name = [](const char* base, int k) { return std::string(base) + "_" + std::to_string(k); };

  // Squared-error scale of each hour, in the unit-curve coordinates.
  std::vector<double> sigma(T), s_term(T), h_term(T);
  for (int k = 0; k < T; ++k) {
    sigma[k] = w.res_half_width[k] / kErrorBandSigmas;
    s_term[k] = var_s * sigma[k] * sigma[k];
    h_term[k] = var_h * std::pow(L.h2_spread * sigma[k], 2);
  }
  const bool tighten = theta > 0;

  double psi_s_max = 0;
  double psi_h_max = 0;
  for (int k = 0; k < T; ++k) {
    HourVars& v = L.hours[k];
    const auto& pr = w.prices;
    v.import_power = p.add_variable(0, g, -pr.purchase[k], name("import", k));
    v.export_power = p.add_variable(0, g, pr.sell[k], name("export", k));
    v.dg_power = p.add_variable(0, w.load[k], -pr.cold_ironing[k], name("dg", k));
    v.curtailment = p.add_variable(0, w.res_forecast[k], -pr.curtail_penalty[k], name("curtail", k));
    v.bess_power = p.add_variable(-params.bess_power_max, params.bess_power_max, 0, name("bess", k));
    v.el_power = p.add_variable(0, params.el_power_max, 0, name("el", k));
    v.fc_power = p.add_variable(0, params.fc_power_max, 0, name("fc", k));
    v.alpha_bess = p.add_variable(0, 1, 0, name("alpha_bess", k));
    v.alpha_el = p.add_variable(0, 1, 0, name("alpha_el", k));
    v.alpha_fc = p.add_variable(0, 1, 0, name("alpha_fc", k));
    v.grid_mode = p.add_binary(0, name("grid_mode", k));
    v.el_on = p.add_binary(0, name("el_on", k));
    v.fc_on = p.add_binary(0, name("fc_on", k));
    v.soc = p.add_variable(-milp::kInfinity, milp::kInfinity, 0, name("soc", k + 1));
    v.soh = p.add_variable(-milp::kInfinity, milp::kInfinity, 0, name("soh", k + 1));
    p.objective_offset += pr.cold_ironing[k] * w.load[k] + pr.hydrogen[k] * w.h2_demand[k];

    p.add_row({{v.import_power, 1}, {v.dg_power, 1}, {v.fc_power, 1}, {v.export_power, -1},
               {v.bess_power, -1}, {v.el_power, -1}, {v.curtailment, -1}},
              Relation::kEqual, w.load[k] - w.res_forecast[k], name("balance", k));
    p.add_row({{v.import_power, 1}, {v.grid_mode, -g}}, Relation::kLessEqual, 0, name("import_gate", k));
    p.add_row({{v.export_power, 1}, {v.grid_mode, g}}, Relation::kLessEqual, g, name("export_gate", k));
    p.add_row({{v.alpha_bess, 1}, {v.alpha_el, 1}, {v.alpha_fc, 1}}, Relation::kEqual, 1,
              name("alpha_sum", k));
    p.add_row({{v.alpha_el, 1}, {v.el_on, -1}}, Relation::kLessEqual, 0, name("alpha_el_gate", k));
    p.add_row({{v.alpha_fc, 1}, {v.fc_on, -1}}, Relation::kLessEqual, 0, name("alpha_fc_gate", k));

    // Device boxes, tightened by theta * alpha * sigma where the band is open.
    const double m = tighten ? theta * sigma[k] : 0.0;
    auto with_margin = [&](std::vector<Term> t, int alpha, double sign) {
      if (m > 0) t.push_back({alpha, sign * m});
      return t;
    };
    p.add_row(with_margin({{v.bess_power, 1}}, v.alpha_bess, 1), Relation::kLessEqual,
              params.bess_power_max, name("bess_upper", k));
    p.add_row(with_margin({{v.bess_power, 1}}, v.alpha_bess, -1), Relation::kGreaterEqual,
              -params.bess_power_max, name("bess_lower", k));
    p.add_row(with_margin({{v.el_power, 1}, {v.el_on, -params.el_power_max}}, v.alpha_el, 1),
              Relation::kLessEqual, 0, name("el_upper", k));
    p.add_row(with_margin({{v.el_power, 1}, {v.el_on, -params.el_power_min}}, v.alpha_el, -1),
              Relation::kGreaterEqual, 0, name("el_lower", k));
    p.add_row(with_margin({{v.fc_power, 1}, {v.fc_on, -params.fc_power_max}}, v.alpha_fc, 1),
              Relation::kLessEqual, 0, name("fc_upper", k));
    p.add_row(with_margin({{v.fc_power, 1}, {v.fc_on, -params.fc_power_min}}, v.alpha_fc, -1),
              Relation::kGreaterEqual, 0, name("fc_lower", k));

    // Mean state recursions.
    std::vector<Term> soc_row{{v.soc, 1}, {v.bess_power, -soc_coef}};
    std::vector<Term> soh_row{{v.soh, 1},
                              {v.el_power, -params.el_efficiency / eh},
                              {v.fc_power, 1.0 / (params.fc_efficiency * eh)}};
    double soc_rhs = 0;
    double soh_rhs = -w.h2_demand[k] / eh;
    if (k == 0) {
      soc_rhs += state.soc;
      soh_rhs += state.soh;
    } else {
      soc_row.push_back({L.hours[k - 1].soc, -1});
      soh_row.push_back({L.hours[k - 1].soh, -1});
    }
    p.add_row(soc_row, Relation::kEqual, soc_rhs, name("soc_dyn", k));
    p.add_row(soh_row, Relation::kEqual, soh_rhs, name("soh_dyn", k));

    // Square interpolation for alpha_bess and the hydrogen-side mix.
    if (tighten && sigma[k] > 0) {
      std::vector<Term> sum_b, link_b, sum_h, link_h;
      for (std::size_t i = 0; i < L.square.x.size(); ++i) {
        const double a = L.square.x[i];
        v.lambda_bess.push_back(p.add_variable(0, 1, 0));
        v.lambda_h2.push_back(p.add_variable(0, 1, 0));
        sum_b.push_back({v.lambda_bess.back(), 1});
        link_b.push_back({v.lambda_bess.back(), a});
        sum_h.push_back({v.lambda_h2.back(), 1});
        link_h.push_back({v.lambda_h2.back(), a});
      }
      link_b.push_back({v.alpha_bess, -1});
      link_h.push_back({v.alpha_el, -params.el_efficiency / L.h2_spread});
      link_h.push_back({v.alpha_fc, -1.0 / (params.fc_efficiency * L.h2_spread)});
      p.add_row(sum_b, Relation::kEqual, 1, name("sq_bess_sum", k));
      p.add_row(link_b, Relation::kEqual, 0, name("sq_bess_link", k));
      p.add_row(sum_h, Relation::kEqual, 1, name("sq_h2_sum", k));
      p.add_row(link_h, Relation::kEqual, 0, name("sq_h2_link", k));
    }

    // State chance rows: mean +/- theta * root(psi) inside the box.
    psi_s_max += s_term[k];
    psi_h_max += h_term[k];
    std::vector<Term> soc_up{{v.soc, 1}}, soc_lo{{v.soc, 1}};
    std::vector<Term> soh_up{{v.soh, 1}}, soh_lo{{v.soh, 1}};
    if (tighten && psi_s_max > 0) {
      const PiecewiseCurve rs = build_sqrt_curve(psi_s_max, cfg.sqrt_segments);
      const PiecewiseCurve rh = build_sqrt_curve(psi_h_max, cfg.sqrt_segments);
      L.soc_root.push_back(rs.shifted(rs.max_error));
      L.soh_root.push_back(rh.shifted(rh.max_error));
      const PiecewiseCurve& cs = L.soc_root.back();
      const PiecewiseCurve& ch = L.soh_root.back();
      // Normalized variance link: sum_i mu_i x_i / psi_max equals the
      // accumulated squares scaled by the same psi_max.
      std::vector<Term> sum_s, link_s, sum_h, link_h;
      // Root value charged to breakpoint i in the state rows.
      auto charge = [&](const PiecewiseCurve& c, std::size_t i, const std::vector<double>* t) {
        if (!t) return c.y[i];
        const double r0 = std::sqrt(std::max((*t)[k], 1e-4 * c.x.back()));
        return 0.5 * (r0 + c.x[i] / r0) + c.max_error;
      };
      const std::vector<double>* ts = tangents ? &tangents->soc_psi : nullptr;
      const std::vector<double>* th = tangents ? &tangents->soh_psi : nullptr;
      for (std::size_t i = 0; i < cs.x.size(); ++i) {
        v.root_soc.push_back(p.add_variable(0, 1, 0));
        v.root_soh.push_back(p.add_variable(0, 1, 0));
        sum_s.push_back({v.root_soc.back(), 1});
        link_s.push_back({v.root_soc.back(), cs.x[i] / psi_s_max});
        sum_h.push_back({v.root_soh.back(), 1});
        link_h.push_back({v.root_soh.back(), ch.x[i] / psi_h_max});
        soc_up.push_back({v.root_soc.back(), theta * charge(cs, i, ts)});
        soc_lo.push_back({v.root_soc.back(), -theta * charge(cs, i, ts)});
        soh_up.push_back({v.root_soh.back(), theta * charge(ch, i, th)});
        soh_lo.push_back({v.root_soh.back(), -theta * charge(ch, i, th)});
      }
      for (int j = 0; j <= k; ++j) {
        if (L.hours[j].lambda_bess.empty()) continue;
        for (std::size_t i = 0; i < L.square.x.size(); ++i) {
          const double sq = L.square.y[i];
          link_s.push_back({L.hours[j].lambda_bess[i], -sq * s_term[j] / psi_s_max});
          link_h.push_back({L.hours[j].lambda_h2[i], -sq * h_term[j] / psi_h_max});
        }
      }
      // Valid cut: the interpolated root never falls below the Euclidean
      // norm of the per-hour standard deviations, hence not below its
      // projection on the sigma-weighted direction. Tightens the relaxation
      // without removing any feasible point.
      std::vector<Term> cut_s, cut_h;
      for (std::size_t i = 0; i < cs.y.size(); ++i) {
        cut_s.push_back({v.root_soc[i], cs.y[i]});
        cut_h.push_back({v.root_soh[i], ch.y[i]});
      }
      double sig_norm = 0;
      for (int j = 0; j <= k; ++j) sig_norm += sigma[j] * sigma[j];
      sig_norm = std::sqrt(sig_norm);
      for (int j = 0; j <= k; ++j) {
        if (sigma[j] <= 0) continue;
        const double u = sigma[j] / sig_norm;
        const HourVars& hj = L.hours[j];
        cut_s.push_back({hj.alpha_bess, -u * std::sqrt(var_s) * sigma[j]});
        cut_h.push_back({hj.alpha_el, -u * std::sqrt(var_h) * sigma[j] * params.el_efficiency});
        cut_h.push_back({hj.alpha_fc, -u * std::sqrt(var_h) * sigma[j] / params.fc_efficiency});
      }
      p.add_row(cut_s, Relation::kGreaterEqual, 0, name("root_soc_cut", k));
      p.add_row(cut_h, Relation::kGreaterEqual, 0, name("root_soh_cut", k));
      p.add_row(sum_s, Relation::kEqual, 1, name("root_soc_sum", k));
      p.add_row(link_s, Relation::kEqual, 0, name("root_soc_link", k));
      p.add_row(sum_h, Relation::kEqual, 1, name("root_soh_sum", k));
      p.add_row(link_h, Relation::kEqual, 0, name("root_soh_link", k));
      std::vector<double> ref_s, ref_h;
      for (std::size_t i = 0; i < cs.x.size(); ++i) {
        ref_s.push_back(cs.x[i] / psi_s_max);
        ref_h.push_back(ch.x[i] / psi_h_max);
      }
      if (!tangents) {
        p.add_sos2(v.root_soc, name("sos_soc", k), std::move(ref_s));
        p.add_sos2(v.root_soh, name("sos_soh", k), std::move(ref_h));
        L.sos2_groups += 2;
      }
    } else {
      L.soc_root.emplace_back();
      L.soh_root.emplace_back();
    }
    if (soft) {
      // Penalized per MWh of storage content outside the box.
      for (int s = 0; s < 4; ++s) {
        const double cap = s < 2 ? params.bess_capacity : eh;
        v.slacks.push_back(p.add_variable(0, milp::kInfinity, -slack_price * cap));
      }
      soc_up.push_back({v.slacks[0], -1});
      soc_lo.push_back({v.slacks[1], 1});
      soh_up.push_back({v.slacks[2], -1});
      soh_lo.push_back({v.slacks[3], 1});
    }
    p.add_row(soc_up, Relation::kLessEqual, params.soc_max, name("soc_upper", k));
    p.add_row(soc_lo, Relation::kGreaterEqual, params.soc_min, name("soc_lower", k));
    p.add_row(soh_up, Relation::kLessEqual, 1.0, name("soh_upper", k));
    p.add_row(soh_lo, Relation::kGreaterEqual, 0.0, name("soh_lower", k));
  }
  // Terminal value of stored energy, relative to the starting content.
  if (cfg.terminal_soc_value != 0.0) {
    p.variables[L.hours.back().soc].objective += cfg.terminal_soc_value * params.bess_capacity;
    p.objective_offset -= cfg.terminal_soc_value * params.bess_capacity * state.soc;
  }
  if (cfg.terminal_soh_value != 0.0) {
    p.variables[L.hours.back().soh].objective += cfg.terminal_soh_value * eh;
    p.objective_offset -= cfg.terminal_soh_value * eh * state.soh;
  }
  return out;
}

struct HorizonSolution {
  std::vector<StagePlan> plans;
  StochasticEnvelope envelope;
  // Sum of stage earnings of the planned dispatch at forecast RES.
  double predicted_earning = 0;
  double objective = 0;
  milp::SolveStatus status = milp::SolveStatus::kInfeasible;
  // Set when the hard problem was infeasible and state slacks were used.
  bool soft_mode = false;
  // Set when no solver plan was available and an idle plan was emitted.
  bool fallback = false;
  milp::SolveStats stats;
  double wall_seconds = 0;
  int variables = 0;
  int rows = 0;
  int binaries = 0;
  int sos2_groups = 0;
};

namespace detail {

inline std::vector<StagePlan> extract_plans(const BuiltProblem& b, const std::vector<double>& x,
                                            const ForecastWindow& w, const PortParameters& params) {
  std::vector<StagePlan> plans;
  const auto& L = b.layout;
  const auto& vars = b.problem.variables;
  auto val = [&](int j) {
    return std::clamp(x[j], vars[j].lower, vars[j].upper);
  };
  auto root = [&](const std::vector<int>& idx, const PiecewiseCurve& c) {
    double r = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) r += x[idx[i]] * c.y[i];
    return r;
  };
  for (std::size_t k = 0; k < L.hours.size(); ++k) {
    const HourVars& v = L.hours[k];
    StagePlan s;
    s.grid_mode = x[v.grid_mode] > 0.5;
    s.el_on = x[v.el_on] > 0.5;
    s.fc_on = x[v.fc_on] > 0.5;
    s.import_power = s.grid_mode ? val(v.import_power) : 0.0;
    s.export_power = s.grid_mode ? 0.0 : val(v.export_power);
    s.dg_power = val(v.dg_power);
    s.curtailment = val(v.curtailment);
    s.bess_power = val(v.bess_power);
    s.el_power = s.el_on ? std::clamp(x[v.el_power], params.el_power_min, params.el_power_max) : 0.0;
    s.fc_power = s.fc_on ? std::clamp(x[v.fc_power], params.fc_power_min, params.fc_power_max) : 0.0;
    // Renormalized so the factors sum to one exactly.
    const double ab = val(v.alpha_bess);
    const double ae = s.el_on ? val(v.alpha_el) : 0.0;
    const double af = s.fc_on ? val(v.alpha_fc) : 0.0;
    const double total = ab + ae + af;
    if (total > 0) {
      s.alpha_el = ae / total;
      s.alpha_fc = af / total;
      s.alpha_bess = std::max(0.0, 1.0 - s.alpha_el - s.alpha_fc);
    }
    s.res_forecast = w.res_forecast[k];
    s.res_sigma = w.res_half_width[k] / kErrorBandSigmas;
    s.load = w.load[k];
    s.h2_demand = w.h2_demand[k];
    s.soc = x[v.soc];
    s.soh = x[v.soh];
    s.soc_root = v.root_soc.empty() ? 0.0 : root(v.root_soc, L.soc_root[k]);
    s.soh_root = v.root_soh.empty() ? 0.0 : root(v.root_soh, L.soh_root[k]);
    plans.push_back(s);
  }
  return plans;
}

// Rewrites each root group onto the adjacent pair that interpolates the
// same variance. Only the state rows see the change, and the solver audits
// the result, so a candidate that breaks them is simply discarded.
inline void snap_root_weights(const std::vector<int>& idx, const PiecewiseCurve& c,
                              std::vector<double>& x) {
  if (idx.empty()) return;
  double psi = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) psi += x[idx[i]] * c.x[i];
  psi = std::clamp(psi, c.x.front(), c.x.back());
  std::size_t seg = static_cast<std::size_t>(
      std::upper_bound(c.x.begin(), c.x.end(), psi) - c.x.begin());
  seg = std::clamp<std::size_t>(seg, 1, c.x.size() - 1);
  const double w = (psi - c.x[seg - 1]) / (c.x[seg] - c.x[seg - 1]);
  for (int j : idx) x[j] = 0.0;
  x[idx[seg - 1]] = 1.0 - w;
  x[idx[seg]] = w;
}

// Variances carried by the root weights of `x`, hour by hour.
inline RootTangents root_variances(const ProblemLayout& L, const std::vector<double>& x) {
  RootTangents t;
  for (std::size_t k = 0; k < L.hours.size(); ++k) {
    double ps = 0, ph = 0;
    for (std::size_t i = 0; i < L.hours[k].root_soc.size(); ++i) {
      ps += x[L.hours[k].root_soc[i]] * L.soc_root[k].x[i];
      ph += x[L.hours[k].root_soh[i]] * L.soh_root[k].x[i];
    }
    t.soc_psi.push_back(ps);
    t.soh_psi.push_back(ph);
  }
  return t;
}

inline bool repair_roots(const ProblemLayout& L, std::vector<double>& x) {
  for (std::size_t k = 0; k < L.hours.size(); ++k) {
    snap_root_weights(L.hours[k].root_soc, L.soc_root[k], x);
    snap_root_weights(L.hours[k].root_soh, L.soh_root[k], x);
  }
  return true;
}

// Node-limited incumbents can carry diesel power that a cheaper source
// could replace. Within one hour, diesel first offsets export and then
// turns into import; each move keeps the balance row, touches no device or
// state, and is taken only when the objective gains.
inline void displace_diesel(const ProblemLayout& L, const milp::MilpProblem& p,
                            std::vector<double>& x) {
  for (const HourVars& v : L.hours) {
    const double c_dg = p.variables[v.dg_power].objective;
    double& dg = x[v.dg_power];
    if (dg <= 0) continue;
    double& ex = x[v.export_power];
    const double m = std::min(dg, ex);
    if (m > 0 && -c_dg - p.variables[v.export_power].objective > 0) {
      dg -= m;
      ex -= m;
    }
    double& im = x[v.import_power];
    const double room = p.variables[v.import_power].upper - im;
    if (dg > 0 && ex <= 1e-9 && room > 0 && p.variables[v.import_power].objective - c_dg > 0) {
      const double d = std::min(dg, room);
      ex = 0;
      x[v.grid_mode] = 1;
      im += d;
      dg -= d;
    }
  }
}

// Root snapping followed by diesel displacement.
inline bool repair_incumbent(const BuiltProblem& b, std::vector<double>& x) {
  repair_roots(b.layout, x);
  displace_diesel(b.layout, b.problem, x);
  return true;
}

// Applies repair_incumbent to a solved point and keeps it when it is still
// feasible and no worse.
inline void polish(const BuiltProblem& b, milp::Solution& s) {
  if (!s.has_values()) return;
  std::vector<double> x = s.values;
  repair_incumbent(b, x);
  if (!milp::check_solution(b.problem, x).empty()) return;
  const double obj = b.problem.objective_value(x);
  if (obj < s.objective) return;
  s.values = std::move(x);
  s.objective = obj;
}

// All devices idle, grid balances the forecast hour.
inline StagePlan idle_plan(const ForecastWindow& w, std::size_t k, const PortState& state) {
  StagePlan s;
  s.res_forecast = w.res_forecast[k];
  s.res_sigma = w.res_half_width[k] / kErrorBandSigmas;
  s.load = w.load[k];
  s.h2_demand = w.h2_demand[k];
  const double net = s.load - s.res_forecast;
  s.grid_mode = net >= 0;
  s.import_power = std::max(net, 0.0);
  s.export_power = std::max(-net, 0.0);
  s.soc = state.soc;
  s.soh = state.soh;
  return s;
}

}  // namespace detail

namespace detail {

// Best feasible point of `b` found through tangent restrictions, or empty.
// The first pass linearizes each root at a quarter of its variance range,
// later passes at the variances the previous pass chose.
inline std::vector<double> tangent_start(const PortState& state, const ForecastWindow& w,
                                         const PortParameters& params, const MpcConfig& cfg,
                                         const BuiltProblem& b,
                                         const std::function<double()>& remaining) {
  const ProblemLayout& L = b.layout;
  if (L.sos2_groups == 0) return {};
  RootTangents tg;
  for (std::size_t k = 0; k < L.hours.size(); ++k) {
    tg.soc_psi.push_back(L.soc_root[k].x.empty() ? 0.0 : 0.25 * L.soc_root[k].x.back());
    tg.soh_psi.push_back(L.soh_root[k].x.empty() ? 0.0 : 0.25 * L.soh_root[k].x.back());
  }
  std::vector<double> best;
  double best_obj = -milp::kInfinity;
  for (int pass = 0; pass < cfg.tangent_passes; ++pass) {
    const BuiltProblem r = build_problem(state, w, params, cfg, L.soft, &tg);
    milp::MilpOptions opt = cfg.solver;
    opt.nodes_after_incumbent = cfg.tangent_nodes;
    opt.time_limit_seconds = remaining() / 4;
    const milp::Solution m = milp::solve_milp(r.problem, opt);
    if (!m.has_values()) break;
    std::vector<double> x = m.values;
    repair_incumbent(b, x);
    if (milp::check_solution(b.problem, x).empty()) {
      const double obj = b.problem.objective_value(x);
      if (obj > best_obj) {
        best_obj = obj;
        best = x;
      }
    }
    tg = root_variances(L, m.values);
  }
  return best;
}

}  // namespace detail

/// Solves the window MILP; falls back to the soft rebuild when the hard
/// problem yields no feasible point, and to an idle plan when neither does.
/// The search starts from the best tangent-restriction plan when one exists.
inline HorizonSolution solve_horizon(const PortState& state, const ForecastWindow& w,
                                     const PortParameters& params, const MpcConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const std::function<double()> remaining = [&] {
    return std::max(0.0, cfg.solver.time_limit_seconds -
                             std::chrono::duration<double>(Clock::now() - t0).count());
  };
  HorizonSolution h;
  milp::SolveStats total;
  auto attempt = [&](bool soft) {
    BuiltProblem b = build_problem(state, w, params, cfg, soft);
    milp::MilpOptions opt = cfg.solver;
    opt.initial_solution = detail::tangent_start(state, w, params, cfg, b, remaining);
    opt.time_limit_seconds = remaining();
    opt.repair = [&b](std::vector<double>& x) { return detail::repair_incumbent(b, x); };
    milp::Solution s = milp::solve_milp(b.problem, opt);
    detail::polish(b, s);
    total.nodes += s.stats.nodes;
    total.simplex_iterations += s.stats.simplex_iterations;
    return std::make_pair(std::move(b), std::move(s));
  };
  auto [b, s] = attempt(false);
  if (!s.has_values()) {
    std::tie(b, s) = attempt(true);
    h.soft_mode = true;
  }
  h.status = s.status;
  h.stats = s.stats;
  h.stats.nodes = total.nodes;
  h.stats.simplex_iterations = total.simplex_iterations;
  h.variables = b.problem.num_variables();
  h.rows = b.problem.num_rows();
  h.binaries = b.problem.num_binaries();
  h.sos2_groups = static_cast<int>(b.problem.sos2.size());
  if (s.has_values()) {
    h.plans = detail::extract_plans(b, s.values, w, params);
    h.objective = s.objective;
  } else {
    h.fallback = true;
    for (std::size_t k = 0; k < w.length(); ++k) h.plans.push_back(detail::idle_plan(w, k, state));
    h.objective = -milp::kInfinity;
  }
  std::vector<DevicePlan> dev;
  ParticipationFactors factors;
  for (std::size_t k = 0; k < h.plans.size(); ++k) {
    const StagePlan& p = h.plans[k];
    dev.push_back({p.bess_power, p.el_power, p.fc_power});
    factors.push_back(p.participation());
    h.predicted_earning += stage_earning(p.dispatch(), w.prices.row(k));
  }
  h.envelope = propagate_envelope(state, dev, w.h2_demand, factors, w.forecast(), params);
  h.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return h;
}

/// Outcome of applying one hour of the plan to the plant.
struct RealizedStep {
  HourDispatch dispatch;
  PortState next;
  // Raw participation outputs and the states they would have produced.
  double raw_bess = 0, raw_el = 0, raw_fc = 0;
  double unclamped_soc = 0, unclamped_soh = 0;
  // Bounds the unclamped quantities broke. Magnitudes signed as in
  // validate_dispatch; names: bess_power, el_power, fc_power, soc, soh.
  std::vector<Violation> pre_clamp;
  // Violations left after clamping and routing; empty unless a hard event.
  std::vector<Violation> post_clamp;
  int clamp_events = 0;
  // Residual the grid could not absorb, or hydrogen the tank could not give.
  std::vector<std::string> hard_events;
};

/// Applies the participation split of `epsilon`, clamps to the physical and
/// state boxes, and routes whatever the balance lost to the grid. DG and
/// curtailment absorb only what exceeds the grid rating.
inline RealizedStep realize_step(const StagePlan& plan, double epsilon, const PortState& state,
                                 const PortParameters& params) {
  constexpr double kTol = kDispatchTolerance;
  RealizedStep r;
  HourDispatch& d = r.dispatch;
  d = plan.dispatch();
  d.res_power = plan.res_forecast + epsilon;

  r.raw_bess = apply_participation(plan.bess_power, plan.alpha_bess, epsilon, Device::kBess);
  r.raw_el = apply_participation(plan.el_power, plan.alpha_el, epsilon, Device::kElectrolyzer);
  r.raw_fc = apply_participation(plan.fc_power, plan.alpha_fc, epsilon, Device::kFuelCell);
  r.unclamped_soc = soc_step(state, r.raw_bess, params);
  r.unclamped_soh = soh_step(state, r.raw_el, r.raw_fc, plan.h2_demand, params);

  auto record = [&](const char* n, double v, double lo, double hi) {
    if (v > hi + kTol) {
      r.pre_clamp.push_back({n, v - hi});
    } else if (v < lo - kTol) {
      r.pre_clamp.push_back({n, v - lo});
    }
  };
  record("bess_power", r.raw_bess, -params.bess_power_max, params.bess_power_max);
  record("el_power", r.raw_el, plan.el_on ? params.el_power_min : 0.0,
         plan.el_on ? params.el_power_max : 0.0);
  record("fc_power", r.raw_fc, plan.fc_on ? params.fc_power_min : 0.0,
         plan.fc_on ? params.fc_power_max : 0.0);
  record("soc", r.unclamped_soc, params.soc_min, params.soc_max);
  record("soh", r.unclamped_soh, 0.0, 1.0);

  auto clamp_count = [&](double v, double lo, double hi) {
    const double c = std::clamp(v, lo, hi);
    if (std::abs(c - v) > 0) ++r.clamp_events;
    return c;
  };

  // Battery: power box, then whatever keeps SoC inside its box.
  const double gain = params.soc_gain() / params.bess_capacity;
  double lo = std::max(-params.bess_power_max, (params.soc_min - state.soc) / gain);
  double hi = std::min(params.bess_power_max, (params.soc_max - state.soc) / gain);
  if (lo > hi) lo = hi = std::clamp(0.0, lo, hi);  // start state already outside
  d.bess_power = clamp_count(r.raw_bess, std::min(lo, hi), std::max(lo, hi));

  // Hydrogen devices: gated boxes, then the tank box.
  d.el_power = plan.el_on ? clamp_count(r.raw_el, params.el_power_min, params.el_power_max) : 0.0;
  d.fc_power = plan.fc_on ? clamp_count(r.raw_fc, params.fc_power_min, params.fc_power_max) : 0.0;
  const double eh = params.hss_capacity;
  auto soh_of = [&] {
    return soh_step(state, d.el_power, d.fc_power, d.hydrogen_delivery, params);
  };
  if (soh_of() > 1.0) {
    // Too much hydrogen: run the electrolyzer down, off if needed.
    const double room = (1.0 - state.soh) * eh + d.fc_power / params.fc_efficiency +
                        d.hydrogen_delivery;
    double el = std::max(0.0, room / params.el_efficiency);
    if (d.el_on && el < params.el_power_min) {
      el = 0.0;
      d.el_on = false;
    }
    d.el_power = std::min(d.el_power, el);
    ++r.clamp_events;
  }
  if (soh_of() < 0.0) {
    // Tank would run dry: cut the fuel cell first, then the delivery.
    const double avail = state.soh * eh + params.el_efficiency * d.el_power - d.hydrogen_delivery;
    double fc = std::max(0.0, avail * params.fc_efficiency);
    if (d.fc_on && fc < params.fc_power_min) {
      fc = 0.0;
      d.fc_on = false;
    }
    d.fc_power = std::min(d.fc_power, fc);
    ++r.clamp_events;
    if (soh_of() < 0.0) {
      d.hydrogen_delivery = std::max(0.0, state.soh * eh + params.el_efficiency * d.el_power -
                                              d.fc_power / params.fc_efficiency);
      r.hard_events.push_back("hydrogen_shortfall");
    }
  }

  // Curtailment cannot exceed what actually arrived.
  d.curtailment = std::clamp(d.curtailment, 0.0, std::max(d.res_power, 0.0));

  // Route the balance through the grid, flipping its direction if needed.
  const double g = params.grid_power_max;
  const double surplus = power_balance_residual(d);
  double net = d.import_power - d.export_power - surplus;  // desired import
  if (net > g) {
    const double dg_room = d.load - d.dg_power;
    const double extra = std::min(net - g, dg_room);
    d.dg_power += extra;
    net -= extra;
    if (net > g + kTol) r.hard_events.push_back("grid_import_capacity");
  } else if (net < -g) {
    const double cur_room = std::max(d.res_power, 0.0) - d.curtailment;
    const double extra = std::min(-g - net, cur_room);
    d.curtailment += extra;
    net += extra;
    if (net < -g - kTol) r.hard_events.push_back("grid_export_capacity");
  }
  if (std::abs(surplus) > 0) {
    d.grid_mode = net >= 0;
    d.import_power = std::max(net, 0.0);
    d.export_power = std::max(-net, 0.0);
  }

  r.next = {soc_step(state, d.bess_power, params), soh_step(state, d.el_power, d.fc_power,
                                                            d.hydrogen_delivery, params)};
  r.post_clamp = validate_dispatch(d, params);
  if (r.next.soc > params.soc_max + kTol || r.next.soc < params.soc_min - kTol) {
    r.post_clamp.push_back({"soc", r.next.soc});
  }
  if (r.next.soh > 1.0 + kTol || r.next.soh < -kTol) r.post_clamp.push_back({"soh", r.next.soh});
  return r;
}

}  // namespace smartport
