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

#include "regionopt/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "regionopt/error.hpp"
#include "regionopt/log.hpp"
#include "regionopt/ridership.hpp"
#include "regionopt/seeding.hpp"
#include "text.hpp"

namespace regionopt {
namespace {

using nlohmann::json;

using text::format_double;
using text::parse_double;
using text::split_csv_line;

// Reorders a matrix whose rows/cols follow `ids` into `order`.
Eigen::MatrixXd reorder(const LabeledMatrix& m, const std::vector<std::string>& order,
                        const std::string& field) {
  if (m.ids.size() != order.size()) {
    fail(ErrorKind::kDimensionMismatch,
         field + " has " + std::to_string(m.ids.size()) + " sub-zones, base_demand has " +
             std::to_string(order.size()));
  }
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < m.ids.size(); ++i) pos[m.ids[i]] = i;
  std::vector<std::size_t> idx(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto it = pos.find(order[i]);
    if (it == pos.end()) {
      fail(ErrorKind::kDimensionMismatch, field + " is missing sub-zone '" + order[i] + "'");
    }
    idx[i] = it->second;
  }
  Eigen::MatrixXd out(order.size(), order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = 0; j < order.size(); ++j) out(i, j) = m.values(idx[i], idx[j]);
  return out;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

ZoneIndex Scenario::zone_index(const ZoneId& id) const {
  auto it = std::lower_bound(zones.begin(), zones.end(), id);
  if (it == zones.end() || *it != id) {
    fail(ErrorKind::kInvalidArgument, "unknown zone id '" + id + "'");
  }
  return static_cast<ZoneIndex>(it - zones.begin());
}

std::vector<std::vector<std::size_t>> Scenario::zone_subzones() const {
  std::vector<std::vector<std::size_t>> out(zones.size());
  for (std::size_t i = 0; i < subzone_zone.size(); ++i) out[subzone_zone[i]].push_back(i);
  return out;
}

ZoneMask Scenario::all_zones() const {
  return zones.size() >= 64 ? ~ZoneMask{0} : ((ZoneMask{1} << zones.size()) - 1);
}

void Scenario::validate() const {
  const std::size_t n = subzones.size();
  require(!zones.empty(), ErrorKind::kInvariant, "scenario has no zones");
  require(zones.size() <= kMaxZones, ErrorKind::kCapacity,
          "scenario has more than 64 zones");
  require(std::is_sorted(zones.begin(), zones.end()) &&
              std::adjacent_find(zones.begin(), zones.end()) == zones.end(),
          ErrorKind::kInvariant, "zone ids must be unique (stored sorted)");
  require(subzone_zone.size() == n, ErrorKind::kDimensionMismatch,
          "subzone_to_zone does not cover every sub-zone");
  {
    std::set<std::string> seen(subzones.begin(), subzones.end());
    require(seen.size() == n, ErrorKind::kInvariant, "duplicate sub-zone id");
  }
  std::vector<int> count(zones.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    require(subzone_zone[i] < zones.size(), ErrorKind::kInvariant,
            "sub-zone '" + subzones[i] + "' maps to an unknown zone");
    ++count[subzone_zone[i]];
  }
  for (std::size_t z = 0; z < zones.size(); ++z) {
    require(count[z] > 0, ErrorKind::kInvariant, "zone '" + zones[z] + "' has no sub-zones");
  }
  auto check_matrix = [&](const Eigen::MatrixXd& m, const char* name) {
    require(static_cast<std::size_t>(m.rows()) == n && static_cast<std::size_t>(m.cols()) == n,
            ErrorKind::kDimensionMismatch,
            std::string(name) + " must be " + std::to_string(n) + "x" + std::to_string(n) +
                ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    require(m.allFinite() && (m.array() >= 0.0).all(), ErrorKind::kInvariant,
            std::string(name) + " entries must be finite and >= 0");
  };
  check_matrix(base_demand, "base_demand");
  check_matrix(trip_price, "trip_price");
  check_matrix(in_vehicle_time, "in_vehicle_time");
  require(zone_volatility.size() == zones.size(), ErrorKind::kInvariant,
          "zone_volatility must have one entry per zone");
  for (std::size_t z = 0; z < zones.size(); ++z) {
    require(std::isfinite(zone_volatility[z]) && zone_volatility[z] >= 0.0,
            ErrorKind::kInvariant, "zone_volatility of '" + zones[z] + "' must be >= 0");
  }
  require(gamma >= 0.0 && gamma <= 1.0, ErrorKind::kInvariant, "gamma must lie in [0, 1]");
  require(discount_rate > -1.0, ErrorKind::kInvariant, "discount_rate must be > -1");
  require(speed > 0.0, ErrorKind::kInvariant, "speed must be > 0");
  require(value_of_time >= 0.0 && alpha_wait >= 0.0 && alpha_iv >= 0.0, ErrorKind::kInvariant,
          "value_of_time and perception factors must be >= 0");
  require(!horizon_steps.empty(), ErrorKind::kInvariant, "horizon_steps is empty");
  require(horizon_steps.front() > 0.0, ErrorKind::kInvariant,
          "horizon_steps must start after t0 = 0");
  for (std::size_t i = 1; i < horizon_steps.size(); ++i) {
    require(horizon_steps[i] > horizon_steps[i - 1], ErrorKind::kInvariant,
            "horizon_steps must be strictly increasing");
  }
  require(std::isfinite(within_zone_cost) && std::isfinite(interzone_cost),
          ErrorKind::kInvariant, "cost thresholds must be finite");
}

ZoneMask mask_of(const std::vector<ZoneIndex>& zones) {
  ZoneMask m = 0;
  for (ZoneIndex z : zones) m |= ZoneMask{1} << z;
  return m;
}

std::vector<ZoneIndex> indices_of(ZoneMask mask) {
  std::vector<ZoneIndex> out;
  for (ZoneIndex z = 0; mask != 0; ++z, mask >>= 1) {
    if (mask & 1ULL) out.push_back(z);
  }
  return out;
}

LabeledMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::kParse, path.string() + " is empty");
  LabeledMatrix out;
  out.ids = split_csv_line(line);
  const std::size_t n = out.ids.size();
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != n) {
      fail(ErrorKind::kDimensionMismatch, path.string() + ": row " +
                                              std::to_string(rows.size() + 1) + " has " +
                                              std::to_string(cells.size()) + " values, expected " +
                                              std::to_string(n));
    }
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = parse_double(cells[j], path);
    rows.push_back(std::move(row));
  }
  if (rows.size() != n) {
    fail(ErrorKind::kDimensionMismatch, path.string() + ": " + std::to_string(rows.size()) +
                                            "x" + std::to_string(n) + " matrix is not square");
  }
  out.values.resize(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.values(i, j) = rows[i][j];
  return out;
}

void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                      const Eigen::MatrixXd& values) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  for (std::size_t j = 0; j < ids.size(); ++j) out << (j ? "," : "") << ids[j];
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      out << (j ? "," : "") << format_double(values(i, j));
    }
    out << '\n';
  }
  if (!out) fail(ErrorKind::kIo, "failed writing " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open scenario " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, "malformed scenario " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::kParse, "scenario root must be a JSON object");
  const auto dir = path.parent_path();

  auto required = [&](const char* key) -> const json& {
    auto it = doc.find(key);
    if (it == doc.end()) fail(ErrorKind::kParse, std::string("scenario is missing '") + key + "'");
    return *it;
  };

  Scenario s;
  try {
    s.zones = required("zones").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("field 'zones': ") + e.what());
  }
  std::sort(s.zones.begin(), s.zones.end());

  const auto demand = read_matrix_csv(dir / required("base_demand").get<std::string>());
  s.subzones = demand.ids;
  s.base_demand = demand.values;
  const std::size_t n = s.subzones.size();

  std::map<std::string, std::string> sub_to_zone;
  try {
    sub_to_zone = required("subzone_to_zone").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("field 'subzone_to_zone': ") + e.what());
  }
  if (sub_to_zone.size() != n) {
    fail(ErrorKind::kInvariant, "subzone_to_zone lists " + std::to_string(sub_to_zone.size()) +
                                    " sub-zones, base_demand has " + std::to_string(n));
  }
  s.subzone_zone.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = sub_to_zone.find(s.subzones[i]);
    if (it == sub_to_zone.end()) {
      fail(ErrorKind::kInvariant, "sub-zone '" + s.subzones[i] + "' has no zone mapping");
    }
    s.subzone_zone[i] = s.zone_index(it->second);
  }

  const json& price = required("trip_price");
  if (price.is_number()) {
    s.trip_price = Eigen::MatrixXd::Constant(n, n, price.get<double>());
  } else {
    s.trip_price = reorder(read_matrix_csv(dir / price.get<std::string>()), s.subzones,
                           "trip_price");
  }

  s.speed = get_or(doc, "speed", s.speed);
  if (auto it = doc.find("in_vehicle_time"); it != doc.end() && !it->is_null()) {
    s.in_vehicle_time =
        reorder(read_matrix_csv(dir / it->get<std::string>()), s.subzones, "in_vehicle_time");
  } else if (auto c = doc.find("subzone_coordinates"); c != doc.end()) {
    // Straight-line centroid distance (km) over speed (km/h), in minutes.
    std::ifstream cin(dir / c->get<std::string>());
    if (!cin) fail(ErrorKind::kIo, "cannot open subzone_coordinates");
    std::map<std::string, std::pair<double, double>> xy;
    std::string line;
    std::getline(cin, line);  // header: subzone,x_km,y_km
    while (std::getline(cin, line)) {
      if (line.empty()) continue;
      auto cells = split_csv_line(line);
      if (cells.size() != 3) fail(ErrorKind::kParse, "subzone_coordinates rows need 3 cells");
      xy[cells[0]] = {parse_double(cells[1], dir), parse_double(cells[2], dir)};
    }
    s.in_vehicle_time.resize(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        auto a = xy.find(s.subzones[i]);
        auto b = xy.find(s.subzones[j]);
        if (a == xy.end() || b == xy.end()) {
          fail(ErrorKind::kInvariant, "subzone_coordinates is missing a sub-zone");
        }
        const double d = std::hypot(a->second.first - b->second.first,
                                    a->second.second - b->second.second);
        s.in_vehicle_time(i, j) = d / s.speed * 60.0;
      }
    }
  } else {
    fail(ErrorKind::kParse, "scenario needs 'in_vehicle_time' or 'subzone_coordinates'");
  }

  s.value_of_time = get_or(doc, "value_of_time", s.value_of_time);
  s.alpha_wait = get_or(doc, "alpha_wait", s.alpha_wait);
  s.alpha_iv = get_or(doc, "alpha_iv", s.alpha_iv);
  s.gamma = get_or(doc, "gamma", s.gamma);
  s.drift = get_or(doc, "drift", s.drift);
  s.discount_rate = get_or(doc, "discount_rate", s.discount_rate);
  if (doc.contains("horizon_steps")) {
    s.horizon_steps = get_or(doc, "horizon_steps", s.horizon_steps);
  } else if (doc.contains("horizon")) {
    const int t_end = get_or(doc, "horizon", 5);
    require(t_end >= 1, ErrorKind::kInvariant, "horizon must be >= 1");
    s.horizon_steps.clear();
    for (int t = 1; t <= t_end; ++t) s.horizon_steps.push_back(t);
  }

  std::map<std::string, double> vol;
  try {
    vol = required("zone_volatility").get<std::map<std::string, double>>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("field 'zone_volatility': ") + e.what());
  }
  if (vol.size() != s.zones.size()) {
    fail(ErrorKind::kInvariant, "zone_volatility keys must equal the zone set");
  }
  s.zone_volatility.resize(s.zones.size());
  for (std::size_t z = 0; z < s.zones.size(); ++z) {
    auto it = vol.find(s.zones[z]);
    if (it == vol.end()) {
      fail(ErrorKind::kInvariant, "zone_volatility is missing zone '" + s.zones[z] + "'");
    }
    s.zone_volatility[z] = it->second;
  }

  const bool has_wz = doc.contains("within_zone_cost") && !doc["within_zone_cost"].is_null();
  const bool has_iz = doc.contains("interzone_cost") && !doc["interzone_cost"].is_null();
  if (has_wz) s.within_zone_cost = doc["within_zone_cost"].get<double>();
  if (has_iz) s.interzone_cost = doc["interzone_cost"].get<double>();
  s.validate();
  if (!has_wz || !has_iz) {
    const auto derived = derive_cost_thresholds(s);
    if (!has_wz) s.within_zone_cost = derived.within;
    if (!has_iz) s.interzone_cost = derived.inter;
  }
  return s;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  scenario.validate();
  const auto dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  const std::string stem = path.stem().string();
  const std::string demand_file = stem + "_base_demand.csv";
  const std::string price_file = stem + "_trip_price.csv";
  const std::string tiv_file = stem + "_in_vehicle_time.csv";
  write_matrix_csv(dir / demand_file, scenario.subzones, scenario.base_demand);
  write_matrix_csv(dir / price_file, scenario.subzones, scenario.trip_price);
  write_matrix_csv(dir / tiv_file, scenario.subzones, scenario.in_vehicle_time);

  json doc;
  doc["zones"] = scenario.zones;
  json mapping = json::object();
  for (std::size_t i = 0; i < scenario.subzones.size(); ++i) {
    mapping[scenario.subzones[i]] = scenario.zones[scenario.subzone_zone[i]];
  }
  doc["subzone_to_zone"] = mapping;
  doc["base_demand"] = demand_file;
  doc["trip_price"] = price_file;
  doc["in_vehicle_time"] = tiv_file;
  doc["value_of_time"] = scenario.value_of_time;
  doc["alpha_wait"] = scenario.alpha_wait;
  doc["alpha_iv"] = scenario.alpha_iv;
  doc["gamma"] = scenario.gamma;
  doc["speed"] = scenario.speed;
  doc["within_zone_cost"] = scenario.within_zone_cost;
  doc["interzone_cost"] = scenario.interzone_cost;
  json vol = json::object();
  for (std::size_t z = 0; z < scenario.zones.size(); ++z) {
    vol[scenario.zones[z]] = scenario.zone_volatility[z];
  }
  doc["zone_volatility"] = vol;
  doc["drift"] = scenario.drift;
  doc["discount_rate"] = scenario.discount_rate;
  doc["horizon_steps"] = scenario.horizon_steps;

  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

CostThresholds derive_cost_thresholds(const Scenario& scenario) {
  const std::size_t h = scenario.zone_count();
  const auto full = equilibrium_ridership(scenario.base_demand, scenario);
  Eigen::MatrixXd by_zone = Eigen::MatrixXd::Zero(h, h);
  for (std::size_t i = 0; i < scenario.subzone_count(); ++i) {
    for (std::size_t j = 0; j < scenario.subzone_count(); ++j) {
      by_zone(scenario.subzone_zone[i], scenario.subzone_zone[j]) += full.od_ridership(i, j);
    }
  }
  CostThresholds out;
  out.within = 0.4 * by_zone.diagonal().sum() / static_cast<double>(h);
  if (h > 1) {
    const double between = by_zone.sum() - by_zone.diagonal().sum();
    out.inter = between / static_cast<double>(h * (h - 1));
  }
  if (full.total == 0.0) {
    log::warning("base demand is zero everywhere; cost thresholds are 0");
  }
  return out;
}

double derive_cost_threshold(const Scenario& scenario, CostMode mode) {
  const auto t = derive_cost_thresholds(scenario);
  return mode == CostMode::kWithin ? t.within : t.inter;
}

Eigen::MatrixXd zone_travel_time(const Scenario& scenario) {
  const std::size_t h = scenario.zone_count();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(h, h);
  Eigen::MatrixXd count = Eigen::MatrixXd::Zero(h, h);
  for (std::size_t i = 0; i < scenario.subzone_count(); ++i) {
    for (std::size_t j = 0; j < scenario.subzone_count(); ++j) {
      const auto a = scenario.subzone_zone[i];
      const auto b = scenario.subzone_zone[j];
      sum(a, b) += scenario.in_vehicle_time(i, j);
      count(a, b) += 1.0;
    }
  }
  Eigen::MatrixXd tt = sum.cwiseQuotient(count.cwiseMax(1.0));
  // Symmetrize; OD times need not be.
  return 0.5 * (tt + tt.transpose());
}

Scenario generate_synthetic_scenario(std::uint64_t seed, std::size_t n_zones,
                                     std::size_t subzones_per_zone, double demand_scale) {
  require(n_zones >= 1 && subzones_per_zone >= 1, ErrorKind::kInvalidArgument,
          "synthetic scenario needs n_zones >= 1 and subzones_per_zone >= 1");
  require(n_zones <= kMaxZones, ErrorKind::kCapacity, "at most 64 zones are supported");
  require(demand_scale >= 0.0 && std::isfinite(demand_scale), ErrorKind::kInvalidArgument,
          "demand_scale must be finite and >= 0");
  static constexpr double kVolatilities[] = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40};
  static constexpr double kZoneSpacingKm = 4.0;
  static constexpr double kDecayKm = 4.0;

  SplitMix64 rng(stream_seed(seed, {n_zones, subzones_per_zone}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Scenario s;
  const int width = std::max<int>(2, static_cast<int>(std::to_string(n_zones).size()));
  for (std::size_t z = 0; z < n_zones; ++z) {
    std::string num = std::to_string(z + 1);
    s.zones.push_back("Z" + std::string(width - num.size(), '0') + num);
  }
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_zones))));
  std::vector<double> x, y, mass;
  for (std::size_t z = 0; z < n_zones; ++z) {
    const double cx = kZoneSpacingKm * static_cast<double>(z % cols) + (unit(rng) - 0.5) * 2.0;
    const double cy = kZoneSpacingKm * static_cast<double>(z / cols) + (unit(rng) - 0.5) * 2.0;
    const double zone_mass = 0.5 + unit(rng);
    for (std::size_t k = 0; k < subzones_per_zone; ++k) {
      s.subzones.push_back(s.zones[z] + "-" + std::to_string(k + 1));
      s.subzone_zone.push_back(static_cast<ZoneIndex>(z));
      x.push_back(cx + (unit(rng) - 0.5) * 2.4);
      y.push_back(cy + (unit(rng) - 0.5) * 2.4);
      mass.push_back(zone_mass * (0.3 + 1.4 * unit(rng)));
    }
  }
  const std::size_t n = s.subzones.size();
  s.base_demand.resize(n, n);
  s.in_vehicle_time.resize(n, n);
  s.trip_price = Eigen::MatrixXd::Constant(n, n, 2.42);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::max(0.5, std::hypot(x[i] - x[j], y[i] - y[j]));
      s.base_demand(i, j) = demand_scale * mass[i] * mass[j] * std::exp(-d / kDecayKm);
      s.in_vehicle_time(i, j) = d / s.speed * 60.0;
    }
  }
  for (std::size_t z = 0; z < n_zones; ++z) {
    s.zone_volatility.push_back(kVolatilities[rng() % 8]);
  }
  s.validate();
  const auto thresholds = derive_cost_thresholds(s);
  s.within_zone_cost = thresholds.within;
  s.interzone_cost = thresholds.inter;
  return s;
}

}  // namespace regionopt
