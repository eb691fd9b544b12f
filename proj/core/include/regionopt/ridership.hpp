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

#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "regionopt/scenario.hpp"
#include "regionopt/stochastic.hpp"

namespace regionopt {

struct RidershipOptions {
  enum class Start { kDemand, kZero };

  double tolerance = 1e-3;  // minutes
  int max_iterations = 1000;
  /// Relaxation on the wait-time update; 1.0 is the plain iteration.
  double damping = 1.0;
  Start start = Start::kDemand;
};

struct RidershipResult {
  Eigen::MatrixXd od_ridership;  // trips/hour over the selected sub-zones
  double total = 0.0;            // trips/hour
  double wait_time = 0.0;        // minutes
  int iterations = 0;
};

/// Expected wait time (minutes) for a regional ridership, optimal-fleet model.
double wait_time(double regional_ridership, double speed);

/// exp(-gamma (price + alpha_iv VoT TIV)) for sub-zone pair (i, j).
double impedance_factor(const Scenario& scenario, std::size_t i, std::size_t j);

/// Result of the wait-time fixed point, expressed on regional totals.
struct FixedPoint {
  double total = 0.0;
  double wait_time = 0.0;
  int iterations = 0;
  /// exp(-gamma alpha_wait TW) used for the returned ridership.
  double wait_factor = 1.0;
};

/// Ridership per pair is Q_ij b_ij exp(-gamma alpha_w TW) with b_ij the
/// impedance factor, so the fixed point only depends on the regional sums
/// sum(Q) (starting point) and sum(Q b) (the update). Throws ConvergenceError.
FixedPoint solve_fixed_point(double demand_total, double weighted_demand_total,
                             const Scenario& scenario, const RidershipOptions& options = {});

/// Equilibrium MoD ridership over the selected sub-zones. `demand` is the
/// square sub-matrix for `subzones` (in that order); prices and in-vehicle
/// times are taken from the scenario.
RidershipResult equilibrium_ridership(const Eigen::MatrixXd& demand, const Scenario& scenario,
                                      std::span<const std::size_t> subzones,
                                      const RidershipOptions& options = {});

/// Same, over every sub-zone of the scenario.
RidershipResult equilibrium_ridership(const Eigen::MatrixXd& demand, const Scenario& scenario,
                                      const RidershipOptions& options = {});

/// Aggregate ridership over every OD pair among the sub-zones of
/// (covered | zone_set), for a full sub-zone demand matrix.
double cumulative_ridership(ZoneMask zone_set, const Eigen::MatrixXd& demand_at_t,
                            const Scenario& scenario, ZoneMask covered = 0,
                            const RidershipOptions& options = {});
double cumulative_ridership(const std::vector<ZoneId>& zone_set,
                            const Eigen::MatrixXd& demand_at_t, const Scenario& scenario,
                            const std::vector<ZoneId>& covered = {},
                            const RidershipOptions& options = {});

/// Payoff of adding the zone at 1-based `position` of a sequence when
/// `n_covered` zones are already served: X - (C_wz + 2 (h - 1 + n_covered) C_iz).
double zone_payoff(std::size_t position, double zone_ridership, double within_cost,
                   double inter_cost, std::size_t n_covered = 0);
double zone_payoff(std::size_t position, double zone_ridership, const Scenario& scenario,
                   std::size_t n_covered = 0);

/// Cumulative ridership per zone set, at t0 and at every (step, path) of a
/// DemandPaths. Demand is pre-aggregated to zone pairs once, so a set costs
/// O(|set|^2) per (step, path). With memoization on, each set is computed at
/// most once and shared between sequences; concurrent lookups are safe.
class RidershipCache {
 public:
  struct Entry {
    double t0 = 0.0;
    std::vector<double> values;  // [step * paths + path]
  };

  RidershipCache(const Scenario& scenario, const DemandPaths& paths,
                 RidershipOptions options = {}, bool memoize = true);

  std::shared_ptr<const Entry> cumulative(ZoneMask set) const;

  std::size_t steps() const { return steps_; }
  std::size_t paths() const { return paths_; }
  std::size_t cached_sets() const;
  bool memoized() const { return memoize_; }

 private:
  std::shared_ptr<Entry> compute(ZoneMask set) const;

  const Scenario* scenario_;
  RidershipOptions options_;
  bool memoize_;
  std::size_t zones_;
  std::size_t steps_;
  std::size_t paths_;
  // Zone-pair sums, [(step * paths + path) * H * H + g * H + h]; t0 in *_t0_.
  std::vector<double> raw_;
  std::vector<double> weighted_;
  std::vector<double> raw_t0_;
  std::vector<double> weighted_t0_;

  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<ZoneMask, std::shared_ptr<const Entry>> memo_;
};

}  // namespace regionopt
