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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "regionopt/policy.hpp"
#include "regionopt/scenario.hpp"

namespace regionopt {

enum class RolloutPolicy { kCr, kCrRnn, kInvestAll };

const char* to_string(RolloutPolicy policy);
RolloutPolicy rollout_policy_from_string(const std::string& name);

struct RolloutOptions {
  std::size_t outer_paths = 5;
  std::size_t epochs = 5;
  std::size_t inner_paths = 300;
  std::uint64_t seed = 0;
  RolloutPolicy policy = RolloutPolicy::kCrRnn;
  CrRnnHyper inner{};
  ValuationOptions valuation{};
  /// Zones served before the first epoch.
  std::vector<ZoneId> initial_covered;
  int workers = 1;
};

struct RolloutEpoch {
  std::size_t path = 0;
  std::size_t epoch = 0;  // 1-based
  std::vector<ZoneId> invested;  // this epoch, in investment order
  std::vector<ZoneId> covered;   // after this epoch's investments, in investment order
  double ridership = 0.0;        // realized sum X over newly served zones
  double payoff = 0.0;           // realized sum pi
  double best_value = 0.0;       // inner policy value (0 when nothing was decided)
  std::size_t evaluated = 0;

  friend bool operator==(const RolloutEpoch&, const RolloutEpoch&) = default;
};

struct RolloutResult {
  RolloutPolicy policy = RolloutPolicy::kCrRnn;
  std::vector<ZoneId> zones;
  std::size_t outer_paths = 0;
  std::size_t epochs = 0;
  std::vector<RolloutEpoch> records;  // path-major, epoch-minor
  std::vector<double> npv_per_path;
  std::vector<double> profit_per_path;
  double mean_npv = 0.0;
  double pv_profit = 0.0;
  double wall_time = 0.0;

  const RolloutEpoch& at(std::size_t path, std::size_t epoch) const {
    return records[path * epochs + epoch - 1];
  }

  friend bool operator==(const RolloutResult&, const RolloutResult&) = default;
};

RolloutResult run_rollout(const Scenario& scenario, const RolloutOptions& options);

struct PairedTTest {
  std::size_t n = 0;
  std::size_t df = 0;
  double mean_diff = 0.0;
  double sd_diff = 0.0;
  /// +-infinity when every difference is the same nonzero value.
  double t = 0.0;
  double alpha = 0.05;
  double critical = 0.0;  // two-sided, at alpha
  double ci_low = 0.0;    // 95% interval on the mean difference
  double ci_high = 0.0;
  bool significant = false;
};

/// Two-sided critical value of Student's t; alpha in {0.05, 0.01, 0.001}.
/// Degrees of freedom between table rows use the next lower row.
double t_critical(std::size_t df, double alpha);

PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b,
                          double alpha = 0.05);

nlohmann::json rollout_to_json(const RolloutResult& result);
RolloutResult rollout_from_json(const nlohmann::json& j);
nlohmann::json t_test_to_json(const PairedTTest& test);

/// JSON report with the policy rollout, the benchmark rollout and t-tests on
/// per-path profitability and NPV, plus a CSV decision table (same stem).
void write_rollout_report(const RolloutResult& policy, const RolloutResult* benchmark,
                          const std::filesystem::path& file,
                          const nlohmann::json& config = nlohmann::json::object());
void write_rollout_table(const RolloutResult& result, const std::filesystem::path& csv);

}  // namespace regionopt
