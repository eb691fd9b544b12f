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

#include "regionopt/ridership.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "regionopt/error.hpp"

namespace regionopt {

double wait_time(double regional_ridership, double speed) {
  return 0.8 * std::cbrt(regional_ridership) * std::pow(speed, -2.0 / 3.0);
}

double impedance_factor(const Scenario& scenario, std::size_t i, std::size_t j) {
  return std::exp(-scenario.gamma * (scenario.trip_price(i, j) + scenario.alpha_iv *
                                                                     scenario.value_of_time *
                                                                     scenario.in_vehicle_time(i, j)));
}

FixedPoint solve_fixed_point(double demand_total, double weighted_demand_total,
                             const Scenario& scenario, const RidershipOptions& options) {
  require(options.tolerance > 0.0, ErrorKind::kInvalidArgument, "tolerance must be > 0");
  require(options.damping > 0.0 && options.damping <= 1.0, ErrorKind::kInvalidArgument,
          "damping must lie in (0, 1]");
  const double speed_term = std::pow(scenario.speed, -2.0 / 3.0);
  const double wait_weight = scenario.gamma * scenario.alpha_wait;

  double total =
      options.start == RidershipOptions::Start::kDemand ? demand_total : 0.0;
  double tw = 0.8 * std::cbrt(total) * speed_term;
  double gap = std::numeric_limits<double>::infinity();
  FixedPoint out;
  for (int itr = 1;; ++itr) {
    if (itr > options.max_iterations) {
      throw ConvergenceError("wait-time fixed point did not converge in " +
                                 std::to_string(options.max_iterations) +
                                 " iterations (last gap " + std::to_string(gap) + " min)",
                             gap, options.max_iterations);
    }
    total = weighted_demand_total * std::exp(-wait_weight * tw);
    const double updated = 0.8 * std::cbrt(total) * speed_term;
    const double next = tw + options.damping * (updated - tw);
    gap = std::abs(next - tw);
    tw = next;
    if (gap < options.tolerance) {
      out.wait_factor = std::exp(-wait_weight * tw);
      out.total = weighted_demand_total * out.wait_factor;
      out.wait_time = tw;
      out.iterations = itr;
      return out;
    }
  }
}

RidershipResult equilibrium_ridership(const Eigen::MatrixXd& demand, const Scenario& scenario,
                                      std::span<const std::size_t> subzones,
                                      const RidershipOptions& options) {
  const auto n = static_cast<Eigen::Index>(subzones.size());
  require(n > 0, ErrorKind::kInvalidArgument, "no sub-zones selected");
  require(demand.rows() == n && demand.cols() == n, ErrorKind::kDimensionMismatch,
          "demand must be square over the selected sub-zones");
  require(demand.allFinite() && (demand.array() >= 0.0).all(), ErrorKind::kInvalidArgument,
          "demand entries must be finite and >= 0");
  Eigen::MatrixXd weighted(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    require(subzones[a] < scenario.subzone_count(), ErrorKind::kInvalidArgument,
            "sub-zone index out of range");
    for (Eigen::Index b = 0; b < n; ++b) {
      weighted(a, b) = demand(a, b) * impedance_factor(scenario, subzones[a], subzones[b]);
    }
  }
  const auto fp = solve_fixed_point(demand.sum(), weighted.sum(), scenario, options);
  RidershipResult out;
  out.od_ridership = weighted * fp.wait_factor;
  out.total = out.od_ridership.sum();
  out.wait_time = fp.wait_time;
  out.iterations = fp.iterations;
  return out;
}

RidershipResult equilibrium_ridership(const Eigen::MatrixXd& demand, const Scenario& scenario,
                                      const RidershipOptions& options) {
  std::vector<std::size_t> all(scenario.subzone_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return equilibrium_ridership(demand, scenario, all, options);
}

double cumulative_ridership(ZoneMask zone_set, const Eigen::MatrixXd& demand_at_t,
                            const Scenario& scenario, ZoneMask covered,
                            const RidershipOptions& options) {
  require((zone_set & covered) == 0, ErrorKind::kInvalidArgument,
          "zone_set and covered must be disjoint");
  const ZoneMask region = zone_set | covered;
  require((region & ~scenario.all_zones()) == 0, ErrorKind::kInvalidArgument,
          "unknown zone index in zone set");
  std::vector<std::size_t> subs;
  for (std::size_t i = 0; i < scenario.subzone_count(); ++i) {
    if (mask_contains(region, scenario.subzone_zone[i])) subs.push_back(i);
  }
  if (subs.empty()) return 0.0;
  const auto n = static_cast<Eigen::Index>(subs.size());
  Eigen::MatrixXd sub(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) sub(a, b) = demand_at_t(subs[a], subs[b]);
  return equilibrium_ridership(sub, scenario, subs, options).total;
}

double cumulative_ridership(const std::vector<ZoneId>& zone_set,
                            const Eigen::MatrixXd& demand_at_t, const Scenario& scenario,
                            const std::vector<ZoneId>& covered, const RidershipOptions& options) {
  ZoneMask set = 0, cov = 0;
  for (const auto& id : zone_set) set |= ZoneMask{1} << scenario.zone_index(id);
  for (const auto& id : covered) cov |= ZoneMask{1} << scenario.zone_index(id);
  return cumulative_ridership(set, demand_at_t, scenario, cov, options);
}

double zone_payoff(std::size_t position, double zone_ridership, double within_cost,
                   double inter_cost, std::size_t n_covered) {
  require(position >= 1, ErrorKind::kInvalidArgument, "sequence positions are 1-based");
  const double links = 2.0 * static_cast<double>(position - 1 + n_covered);
  return zone_ridership - (within_cost + links * inter_cost);
}

double zone_payoff(std::size_t position, double zone_ridership, const Scenario& scenario,
                   std::size_t n_covered) {
  return zone_payoff(position, zone_ridership, scenario.within_zone_cost,
                     scenario.interzone_cost, n_covered);
}

RidershipCache::RidershipCache(const Scenario& scenario, const DemandPaths& paths,
                               RidershipOptions options, bool memoize)
    : scenario_(&scenario),
      options_(options),
      memoize_(memoize),
      zones_(scenario.zone_count()),
      steps_(paths.steps()),
      paths_(paths.paths()) {
  const std::size_t n = scenario.subzone_count();
  require(paths.subzones() == n, ErrorKind::kDimensionMismatch,
          "demand paths and scenario disagree on the sub-zone count");
  const std::size_t hh = zones_ * zones_;
  std::vector<double> impedance(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) impedance[i * n + j] = impedance_factor(scenario, i, j);

  auto aggregate = [&](auto&& demand_at, double* raw, double* weighted) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t g = scenario.subzone_zone[i];
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t h = scenario.subzone_zone[j];
        const double q = demand_at(i, j);
        raw[g * zones_ + h] += q;
        weighted[g * zones_ + h] += q * impedance[i * n + j];
      }
    }
  };
  raw_t0_.assign(hh, 0.0);
  weighted_t0_.assign(hh, 0.0);
  aggregate([&](std::size_t i, std::size_t j) { return scenario.base_demand(i, j); },
            raw_t0_.data(), weighted_t0_.data());
  raw_.assign(steps_ * paths_ * hh, 0.0);
  weighted_.assign(steps_ * paths_ * hh, 0.0);
  for (std::size_t s = 0; s < steps_; ++s) {
    for (std::size_t p = 0; p < paths_; ++p) {
      const auto m = paths.matrix(p, s);
      const std::size_t off = (s * paths_ + p) * hh;
      aggregate([&](std::size_t i, std::size_t j) { return m[i * n + j]; }, raw_.data() + off,
                weighted_.data() + off);
    }
  }
}

std::shared_ptr<RidershipCache::Entry> RidershipCache::compute(ZoneMask set) const {
  require((set & ~scenario_->all_zones()) == 0, ErrorKind::kInvalidArgument,
          "unknown zone index in zone set");
  auto entry = std::make_shared<Entry>();
  entry->values.assign(steps_ * paths_, 0.0);
  if (set == 0) return entry;
  const auto members = indices_of(set);
  const std::size_t hh = zones_ * zones_;
  auto region_sums = [&](const double* raw, const double* weighted) {
    double r = 0.0, w = 0.0;
    for (ZoneIndex g : members) {
      for (ZoneIndex h : members) {
        r += raw[g * zones_ + h];
        w += weighted[g * zones_ + h];
      }
    }
    return std::pair{r, w};
  };
  {
    const auto [r, w] = region_sums(raw_t0_.data(), weighted_t0_.data());
    entry->t0 = solve_fixed_point(r, w, *scenario_, options_).total;
  }
  for (std::size_t k = 0; k < steps_ * paths_; ++k) {
    const auto [r, w] = region_sums(raw_.data() + k * hh, weighted_.data() + k * hh);
    entry->values[k] = solve_fixed_point(r, w, *scenario_, options_).total;
  }
  return entry;
}

std::shared_ptr<const RidershipCache::Entry> RidershipCache::cumulative(ZoneMask set) const {
  if (!memoize_) return compute(set);
  {
    std::shared_lock lock(mutex_);
    auto it = memo_.find(set);
    if (it != memo_.end()) return it->second;
  }
  std::shared_ptr<const Entry> fresh = compute(set);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = memo_.emplace(set, std::move(fresh));
  return it->second;
}

std::size_t RidershipCache::cached_sets() const {
  std::shared_lock lock(mutex_);
  return memo_.size();
}

}  // namespace regionopt
