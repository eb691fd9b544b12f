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
#include <memory>
#include <span>
#include <vector>

#include "regionopt/ridership.hpp"
#include "regionopt/scenario.hpp"
#include "regionopt/sequences.hpp"
#include "regionopt/stochastic.hpp"

namespace regionopt {

enum class Decision { kInvest, kDefer };

const char* to_string(Decision decision);

/// Stopping-time sentinel for a path on which an option is never exercised.
inline constexpr int kNever = -1;

/// Least-squares fit on probabilists' Hermite polynomials He_0..He_{J-1} of
/// the standardized state.
struct RegressionBasis {
  int degree_count = 0;        // requested J
  int effective_degree = 0;    // columns actually used
  std::vector<double> coefficients;
  double mean = 0.0;
  double std = 0.0;
  bool rank_deficient = false;

  double evaluate(double state) const;
};

struct ContinuationFit {
  RegressionBasis basis;
  std::vector<double> fitted;
};

/// He_0..He_{n-1} at x.
void hermite_row(double x, int n, double* out);

ContinuationFit continuation_fit(std::span<const double> states, std::span<const double> targets,
                                 int basis_count = 3);

struct SequenceValuation {
  Sequence sequence;
  double policy_value = 0.0;
  /// [h * paths + p]: 0 means exercised at t0, n >= 1 means at horizon step
  /// n, kNever otherwise.
  std::vector<int> stopping_times;
  std::size_t paths = 0;
  std::vector<Decision> decisions_t0;
  std::vector<double> per_zone_value_t0;
  /// Deterministic t0 payoff of each zone in sequence order.
  std::vector<double> payoff_t0;
  bool regression_degraded = false;

  int stopping_time(std::size_t h, std::size_t p) const { return stopping_times[h * paths + p]; }
};

struct ValuationOptions {
  int basis_count = 3;
  /// Zones already served; they shift the payoff cost position.
  ZoneMask covered = 0;
  RidershipOptions ridership{};
  bool memoize = true;
};

/// Values many sequences against one scenario and one set of demand paths,
/// sharing a ridership cache across sequences. Thread-safe.
class SequenceValuator {
 public:
  SequenceValuator(const Scenario& scenario, const DemandPaths& paths,
                   ValuationOptions options = {});

  SequenceValuation valuate(const Sequence& sequence) const;

  const Scenario& scenario() const { return *scenario_; }
  const DemandPaths& paths() const { return *paths_; }
  const ValuationOptions& options() const { return options_; }
  const RidershipCache& cache() const { return cache_; }

 private:
  const Scenario* scenario_;
  const DemandPaths* paths_;
  ValuationOptions options_;
  RidershipCache cache_;
};

SequenceValuation valuate_sequence(const Sequence& sequence, const DemandPaths& paths,
                                   const Scenario& scenario,
                                   const std::vector<ZoneId>& covered = {},
                                   ValuationOptions options = {});

}  // namespace regionopt
