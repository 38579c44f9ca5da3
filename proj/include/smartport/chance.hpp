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

// Deterministic tightening of Gaussian chance constraints, and the
// piecewise-linear curves used to embed the variance terms in a MILP.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace smartport {

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Standard-normal (1 - beta) quantile, i.e. sqrt(2) * erfinv(1 - 2 beta),
/// by bisection on the CDF. Requires 0 < beta < 0.5.
inline double theta_from_beta(double beta) {
  if (!(beta > 0.0 && beta < 0.5)) {
    throw std::domain_error("beta must lie in (0, 0.5)");
  }
  const double target = 1.0 - beta;
  double lo = 0.0;
  double hi = 40.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct QuantileConfig {
  double beta = 0.05;
  double theta = 0.0;

  /// beta = 0.5 is accepted as the degenerate no-margin setting (theta = 0).
  static QuantileConfig from_beta(double beta) {
    if (beta == 0.5) return {beta, 0.0};
    return {beta, theta_from_beta(beta)};
  }
};

/// Admissible range for a planned mean after tightening. An empty range
/// (mean_lower > mean_upper) marks an infeasible pair.
struct TightenedInterval {
  double mean_lower = 0;
  double mean_upper = 0;

  bool feasible() const { return mean_lower <= mean_upper; }
};

/// P_mean + theta*alpha*sigma <= upper and P_mean - theta*alpha*sigma >= lower.
inline TightenedInterval tighten_power_bounds(double lower, double upper,
                                              double alpha, double sigma,
                                              double theta) {
  if (!(sigma >= 0)) throw std::domain_error("sigma must be non-negative");
  const double margin = theta * alpha * sigma;
  return {lower + margin, upper - margin};
}

/// Signed margins of the state pair mean +/- theta*root within [lower, upper].
/// A negative margin is the amount by which that side is violated.
struct StateChanceCheck {
  double upper_margin = 0;
  double lower_margin = 0;

  bool feasible(double tol = 0.0) const {
    return upper_margin >= -tol && lower_margin >= -tol;
  }
};

/// `root` is the (interpolated) standard deviation of the state.
inline StateChanceCheck tighten_state_bounds(double mean, double root, double theta,
                                             double lower, double upper) {
  return {upper - (mean + theta * root), (mean - theta * root) - lower};
}

/// Breakpoint table evaluated by interpolating between two adjacent
/// breakpoints, which is what an SOS2 weight vector encodes.
struct PiecewiseCurve {
  std::vector<double> x;
  std::vector<double> y;
  // Largest |curve - exact function| over [x.front(), x.back()].
  double max_error = 0;

  double x_min() const { return x.front(); }
  double x_max() const { return x.back(); }
  std::size_t segments() const { return x.size() - 1; }

  double evaluate(double v) const {
    if (v <= x.front()) return y.front();
    if (v >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double w = (v - x[i - 1]) / (x[i] - x[i - 1]);
    return (1 - w) * y[i - 1] + w * y[i];
  }

  /// Same curve moved up by `delta`.
  PiecewiseCurve shifted(double delta) const {
    PiecewiseCurve c = *this;
    for (double& v : c.y) v += delta;
    return c;
  }
};

/// Interpolant of sqrt on [0, psi_max]. The square roots of the breakpoints
/// sit at squares of a uniform grid, which equalizes the chord gap of every
/// segment at about sqrt(psi_max) / (2 n^2).
inline PiecewiseCurve build_sqrt_curve(double psi_max, int segments) {
  if (!(psi_max > 0)) throw std::domain_error("psi_max must be > 0");
  if (segments < 2) throw std::domain_error("need at least 2 segments");
  PiecewiseCurve c;
  const double root_max = std::sqrt(psi_max);
  for (int i = 0; i <= segments; ++i) {
    const double u = static_cast<double>(i) / segments;
    const double r = root_max * u * u;
    c.x.push_back(r * r);
    c.y.push_back(r);
  }
  c.x.back() = psi_max;
  c.y.back() = root_max;
  // Chord gap of sqrt on [a^2, b^2] peaks at (b - a)^2 / (4 (a + b)).
  for (int i = 0; i < segments; ++i) {
    const double a = c.y[i];
    const double b = c.y[i + 1];
    c.max_error = std::max(c.max_error, (b - a) * (b - a) / (4.0 * (a + b)));
  }
  return c;
}

/// Interpolant of (alpha * sigma)^2 on [0, alpha_max] with uniform breakpoints.
inline PiecewiseCurve build_square_curve(double alpha_max, double sigma, int segments) {
  if (segments < 2) throw std::domain_error("need at least 2 segments");
  if (!(alpha_max > 0)) throw std::domain_error("alpha_max must be > 0");
  PiecewiseCurve c;
  for (int i = 0; i <= segments; ++i) {
    const double a = alpha_max * i / segments;
    c.x.push_back(a);
    c.y.push_back((a * sigma) * (a * sigma));
  }
  // Chord gap of a parabola q*x^2 over a segment of width h is q*h^2/4.
  const double h = alpha_max / segments;
  c.max_error = sigma * sigma * h * h / 4.0;
  return c;
}

}  // namespace smartport
