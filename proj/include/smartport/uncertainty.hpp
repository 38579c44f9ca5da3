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

// Renewable forecast-error model and the closed-form moments it induces on
// storage powers and states when the error is split between the battery,
// the electrolyzer and the fuel cell by per-hour participation factors.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "smartport/port_model.hpp"

namespace smartport {

/// Errors are drawn inside +/- kErrorBandSigmas standard deviations.
inline constexpr double kErrorBandSigmas = 3.0;

struct ResForecast {
  std::vector<double> forecast;    // MW
  std::vector<double> half_width;  // MW, confidence band

  std::size_t horizon() const { return forecast.size(); }
  double sigma(std::size_t k) const { return half_width.at(k) / kErrorBandSigmas; }

  void validate() const {
    if (forecast.size() != half_width.size()) {
      throw std::domain_error("ResForecast: length mismatch");
    }
    for (std::size_t k = 0; k < forecast.size(); ++k) {
      if (!(forecast[k] >= 0) || !(half_width[k] >= 0)) {
        throw std::domain_error("ResForecast: negative value at hour " +
                                std::to_string(k));
      }
    }
  }
};

enum class Device { kBess, kElectrolyzer, kFuelCell };

struct Participation {
  double bess = 1.0;
  double el = 0.0;
  double fc = 0.0;
};

using ParticipationFactors = std::vector<Participation>;

inline void validate_participation(const ParticipationFactors& factors,
                                   double tol = 1e-9) {
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const auto& a = factors[k];
    const bool boxed = a.bess >= -tol && a.bess <= 1 + tol && a.el >= -tol &&
                       a.el <= 1 + tol && a.fc >= -tol && a.fc <= 1 + tol;
    if (!boxed || std::abs(a.bess + a.el + a.fc - 1.0) > tol) {
      throw std::domain_error("participation factors invalid at hour " +
                              std::to_string(k));
    }
  }
}

/// Planned (mean) device powers for one hour.
struct DevicePlan {
  double bess = 0;
  double el = 0;
  double fc = 0;
};

/// Per-hour device means/variances (index k = 0..T-1) and state
/// means/variances (index k = 0..T, entry 0 is the known initial state).
struct StochasticEnvelope {
  std::vector<double> bess_mean, el_mean, fc_mean;
  std::vector<double> bess_var, el_var, fc_var;
  std::vector<double> soc_mean, soh_mean;
  std::vector<double> soc_var, soh_var;
};

/// Seeded source of forecast errors. Owns its generator; copy it to fork.
class ErrorSampler {
 public:
  explicit ErrorSampler(std::uint64_t seed, bool truncate = true)
      : engine_(seed), truncate_(truncate) {}

  /// Draws from N(0, sigma^2), restricted to the +/- 3 sigma band unless
  /// truncation is disabled.
  double draw(double sigma) {
    if (!(sigma >= 0)) throw std::domain_error("sigma must be non-negative");
    if (sigma == 0) return 0.0;
    for (;;) {
      const double z = normal_(engine_);
      if (!truncate_ || std::abs(z) <= kErrorBandSigmas) return sigma * z;
    }
  }

  bool truncates() const { return truncate_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  bool truncate_;
};

/// Single draw from a freshly seeded sampler.
inline double realize_error(double sigma, std::uint64_t seed, bool truncate = true) {
  ErrorSampler sampler(seed, truncate);
  return sampler.draw(sigma);
}

/// Realized device power: the fuel cell moves against the error, the
/// battery and electrolyzer move with it.
inline double apply_participation(double plan_power, double alpha, double epsilon,
                                  Device device) {
  switch (device) {
    case Device::kBess:
    case Device::kElectrolyzer:
      return plan_power + alpha * epsilon;
    case Device::kFuelCell:
      return plan_power - alpha * epsilon;
  }
  throw std::domain_error("unknown device tag");
}

inline StochasticEnvelope propagate_envelope(const PortState& initial,
                                             const std::vector<DevicePlan>& plans,
                                             const std::vector<double>& h2_demand,
                                             const ParticipationFactors& factors,
                                             const ResForecast& forecast,
                                             const PortParameters& params) {
  const std::size_t T = plans.size();
  if (h2_demand.size() != T || factors.size() != T || forecast.horizon() != T ||
      forecast.half_width.size() != T) {
    throw std::domain_error("propagate_envelope: series length mismatch");
  }
  validate_participation(factors);

  StochasticEnvelope env;
  env.soc_mean.assign(T + 1, initial.soc);
  env.soh_mean.assign(T + 1, initial.soh);
  env.soc_var.assign(T + 1, 0.0);
  env.soh_var.assign(T + 1, 0.0);

  const double eb = params.bess_efficiency / params.bess_capacity;
  const double inv_eh = 1.0 / params.hss_capacity;
  for (std::size_t k = 0; k < T; ++k) {
    const double s = forecast.sigma(k);
    const auto& a = factors[k];
    const auto& p = plans[k];
    env.bess_mean.push_back(p.bess);
    env.el_mean.push_back(p.el);
    env.fc_mean.push_back(p.fc);
    env.bess_var.push_back(std::pow(a.bess * s, 2));
    env.el_var.push_back(std::pow(a.el * s, 2));
    env.fc_var.push_back(std::pow(a.fc * s, 2));

    env.soc_mean[k + 1] =
        env.soc_mean[k] + params.soc_gain() * p.bess / params.bess_capacity;
    env.soh_mean[k + 1] =
        env.soh_mean[k] + inv_eh * (params.el_efficiency * p.el -
                                    p.fc / params.fc_efficiency - h2_demand[k]);
    env.soc_var[k + 1] = env.soc_var[k] + eb * eb * std::pow(a.bess * s, 2);
    const double h = (params.el_efficiency * a.el + a.fc / params.fc_efficiency) * s;
    env.soh_var[k + 1] = env.soh_var[k] + inv_eh * inv_eh * h * h;
  }
  return env;
}

}  // namespace smartport
