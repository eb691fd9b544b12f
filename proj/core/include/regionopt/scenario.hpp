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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace regionopt {

using ZoneId = std::string;
using SubzoneId = std::string;
/// Position of a zone in Scenario::zones (which is kept sorted by id).
using ZoneIndex = std::uint16_t;
/// Bit set over zone indices. Scenarios are limited to 64 zones.
using ZoneMask = std::uint64_t;

inline constexpr std::size_t kMaxZones = 64;

/// A candidate service region: zones partitioned into sub-zones, the
/// sub-zone OD matrices, and the economic parameters of the payoff model.
///
/// Sub-zones are stored in matrix order; `subzone_zone[i]` is the zone index
/// owning sub-zone i. Scenario values are treated as immutable once built.
struct Scenario {
  std::vector<ZoneId> zones;
  std::vector<SubzoneId> subzones;
  std::vector<ZoneIndex> subzone_zone;

  Eigen::MatrixXd base_demand;      // trips/hour
  Eigen::MatrixXd trip_price;       // currency units
  Eigen::MatrixXd in_vehicle_time;  // minutes

  double value_of_time = 0.293;  // currency/min
  double alpha_wait = 2.1;
  double alpha_iv = 1.0;
  double gamma = 0.005;
  double speed = 19.31;  // km/h

  double within_zone_cost = 0.0;  // ridership units
  double interzone_cost = 0.0;    // ridership units

  std::vector<double> zone_volatility;  // annual, one per zone
  double drift = 0.0;
  double discount_rate = 0.02;
  std::vector<double> horizon_steps{1.0, 2.0, 3.0, 4.0, 5.0};  // years after t0

  std::size_t zone_count() const { return zones.size(); }
  std::size_t subzone_count() const { return subzones.size(); }

  /// Throws Error(kInvalidArgument) for unknown ids.
  ZoneIndex zone_index(const ZoneId& id) const;

  /// Sub-zone indices belonging to each zone, in matrix order.
  std::vector<std::vector<std::size_t>> zone_subzones() const;

  /// Mask with every zone set.
  ZoneMask all_zones() const;

  /// Throws Error(kInvariant / kDimensionMismatch) naming the first violation.
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

ZoneMask mask_of(const std::vector<ZoneIndex>& zones);
std::vector<ZoneIndex> indices_of(ZoneMask mask);
inline bool mask_contains(ZoneMask mask, ZoneIndex z) { return (mask >> z) & 1ULL; }

/// Loads scenario.json plus the CSV matrices it references (paths relative to
/// the JSON file). Missing optional fields take the library defaults; missing
/// cost thresholds are derived from the t0 demand.
Scenario load_scenario(const std::filesystem::path& path);

/// Writes scenario.json and its CSV matrices next to it. load_scenario on the
/// result reproduces the scenario exactly.
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Square sub-zone matrix CSV: header row of sub-zone ids, then one row of
/// values per origin sub-zone in header order.
struct LabeledMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
};
LabeledMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                      const Eigen::MatrixXd& values);

enum class CostMode { kWithin, kInter };

struct CostThresholds {
  double within = 0.0;
  double inter = 0.0;
};

/// Within-zone cost: 0.4 x mean within-zone ridership over zones. Interzone
/// cost: mean between-zone ridership over ordered zone pairs. Both come from
/// a single equilibrium ridership evaluation of the full region at t0.
CostThresholds derive_cost_thresholds(const Scenario& scenario);
double derive_cost_threshold(const Scenario& scenario, CostMode mode);

/// Mean sub-zone in-vehicle time between every pair of zones (minutes).
Eigen::MatrixXd zone_travel_time(const Scenario& scenario);

/// Deterministic synthetic region: zones scattered on a plane, gravity-style
/// OD demand, constant trip price, in-vehicle time from distance and speed,
/// and volatilities drawn from {0.05, 0.10, ..., 0.40}.
Scenario generate_synthetic_scenario(std::uint64_t seed, std::size_t n_zones,
                                     std::size_t subzones_per_zone, double demand_scale);

}  // namespace regionopt
