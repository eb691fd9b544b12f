// Copyright 2026 The regionopt Authors.
//
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


// Independent reference computations shared by the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "regionopt/ridership.hpp"
#include "regionopt/scenario.hpp"
#include "regionopt/sequences.hpp"

namespace regionopt::testing {

// Root of x = q exp(-gamma (price + a_iv vot tiv + a_w 0.8 cbrt(x) v^(-2/3)))
// for a single OD pair, by plain bisection on [0, q].
inline double bisect_single_od(double q, double price, double tiv, const Scenario& s) {
  const double fixed = price + s.value_of_time * s.alpha_iv * tiv;
  const double wait_coef = s.alpha_wait * 0.8 * std::pow(s.speed, -2.0 / 3.0);
  auto g = [&](double x) { return q * std::exp(-s.gamma * (fixed + wait_coef * std::cbrt(x))) - x; };
  double lo = 0.0, hi = q;
  if (q == 0.0) return 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// One-zone, one-sub-zone scenario with a single OD cell.
inline Scenario single_od_scenario(double q, double price, double tiv) {
  Scenario s;
  s.zones = {"A"};
  s.subzones = {"A-1"};
  s.subzone_zone = {0};
  s.base_demand = Eigen::MatrixXd::Constant(1, 1, q);
  s.trip_price = Eigen::MatrixXd::Constant(1, 1, price);
  s.in_vehicle_time = Eigen::MatrixXd::Constant(1, 1, tiv);
  s.zone_volatility = {0.2};
  s.within_zone_cost = 1.0;
  s.interzone_cost = 0.0;
  return s;
}

// Bermudan call on a driftless GBM, exercisable at integer years 0..t_end,
// payoff S - strike, discounted at (1 + rho)^-t. CRR tree with `steps` steps.
inline double lattice_option(double s0, double strike, double sigma, double rho, int t_end,
                             int steps) {
  const double dt = static_cast<double>(t_end) / steps;
  const double u = std::exp(sigma * std::sqrt(dt));
  const double d = 1.0 / u;
  const double p = (1.0 - d) / (u - d);
  const double disc = std::pow(1.0 + rho, -dt);
  const int per_year = steps / t_end;
  std::vector<double> v(steps + 1);
  for (int j = 0; j <= steps; ++j) {
    v[j] = std::max(0.0, s0 * std::pow(u, 2 * j - steps) - strike);
  }
  for (int n = steps - 1; n >= 0; --n) {
    const bool exercisable = n % per_year == 0;
    for (int j = 0; j <= n; ++j) {
      double cont = disc * (p * v[j + 1] + (1.0 - p) * v[j]);
      if (exercisable) cont = std::max(cont, s0 * std::pow(u, 2 * j - n) - strike);
      v[j] = cont;
    }
  }
  return v[0];
}

// Exhaustive deterministic schedule search for one sequence. Times are
// 0 (now) and 1..S (horizon steps); an exercise time of S + 1 means never.
// Demand at step n is base_demand * exp(drift * t_n), which is the zero
// volatility GBM path.
inline double deterministic_dp(const Scenario& s, const Sequence& seq) {
  const std::size_t steps = s.horizon_steps.size();
  const std::size_t H = seq.size();
  std::vector<Eigen::MatrixXd> demand(steps + 1);
  std::vector<double> discount(steps + 1, 1.0);
  demand[0] = s.base_demand;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t = s.horizon_steps[n - 1];
    demand[n] = s.base_demand * std::exp(s.drift * t);
    discount[n] = std::pow(1.0 + s.discount_rate, -t);
  }
  // payoff[h][n]: discounted payoff of the h-th zone served at time n.
  std::vector<std::vector<double>> payoff(H, std::vector<double>(steps + 1));
  for (std::size_t n = 0; n <= steps; ++n) {
    ZoneMask prefix = 0;
    double prev = 0.0;
    for (std::size_t h = 0; h < H; ++h) {
      prefix |= ZoneMask{1} << seq.order[h];
      const double r = cumulative_ridership(prefix, demand[n], s);
      payoff[h][n] = discount[n] * zone_payoff(h + 1, r - prev, s);
      prev = r;
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> tau(H, 0);
  std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t h, std::size_t lo,
                                                                   double acc) {
    if (h == H) {
      best = std::max(best, acc);
      return;
    }
    for (std::size_t n = lo; n <= steps + 1; ++n) {
      rec(h + 1, n, acc + (n <= steps ? payoff[h][n] : 0.0));
    }
  };
  rec(0, 0, 0.0);
  return best;
}

inline Scenario with_zero_volatility(Scenario s) {
  std::fill(s.zone_volatility.begin(), s.zone_volatility.end(), 0.0);
  return s;
}

}  // namespace regionopt::testing
