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
#include <span>
#include <vector>

#include "regionopt/scenario.hpp"

namespace regionopt {

/// Simulated OD demand, indexed by (path, step, origin, destination).
/// Step s corresponds to Scenario::horizon_steps[s]; t0 demand is the
/// scenario's base_demand and is not stored here.
class DemandPaths {
 public:
  DemandPaths() = default;
  DemandPaths(std::size_t n_paths, std::size_t n_steps, std::size_t n_subzones, std::uint64_t seed,
              std::vector<double> step_lengths);

  std::size_t paths() const { return paths_; }
  std::size_t steps() const { return steps_; }
  std::size_t subzones() const { return subzones_; }
  std::uint64_t seed() const { return seed_; }
  /// Years between consecutive steps; element 0 is the gap from t0.
  const std::vector<double>& step_lengths() const { return step_lengths_; }

  double at(std::size_t path, std::size_t step, std::size_t i, std::size_t j) const {
    return values_[offset(path, step) + i * subzones_ + j];
  }
  /// Row-major sub-zone matrix for one (path, step).
  std::span<const double> matrix(std::size_t path, std::size_t step) const {
    return {values_.data() + offset(path, step), subzones_ * subzones_};
  }
  std::span<double> matrix(std::size_t path, std::size_t step) {
    return {values_.data() + offset(path, step), subzones_ * subzones_};
  }
  Eigen::MatrixXd matrix_copy(std::size_t path, std::size_t step) const;

  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const DemandPaths&, const DemandPaths&) = default;

 private:
  std::size_t offset(std::size_t path, std::size_t step) const {
    return (path * steps_ + step) * subzones_ * subzones_;
  }

  std::size_t paths_ = 0;
  std::size_t steps_ = 0;
  std::size_t subzones_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> step_lengths_;
  std::vector<double> values_;
};

/// Geometric Brownian motion per OD pair with the origin zone's volatility,
/// advanced by the exact log scheme
///   Q(t+dt) = Q(t) exp((mu - sigma^2/2) dt + sigma sqrt(dt) Z).
/// Each (path, OD pair) stream is seeded from (seed, path, pair), so results
/// do not depend on `workers` and the first P paths are unchanged when more
/// paths are requested.
DemandPaths simulate_paths(const Scenario& scenario, std::size_t n_paths, std::uint64_t seed,
                           int workers = 1);

/// Audit dump: header line "paths,steps,subzones" then one row-major line of
/// values per (path, step).
void write_paths_csv(const DemandPaths& paths, const std::filesystem::path& file);
DemandPaths read_paths_csv(const std::filesystem::path& file);

/// Binary dump: three little-endian uint64 (paths, steps, subzones), the seed,
/// the step lengths, then row-major doubles.
void write_paths_binary(const DemandPaths& paths, const std::filesystem::path& file);
DemandPaths read_paths_binary(const std::filesystem::path& file);

}  // namespace regionopt
