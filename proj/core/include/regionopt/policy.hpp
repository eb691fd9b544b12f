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
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "regionopt/labeling.hpp"
#include "regionopt/lsmc.hpp"
#include "regionopt/neural.hpp"
#include "regionopt/scenario.hpp"
#include "regionopt/sequences.hpp"
#include "regionopt/stochastic.hpp"

namespace regionopt {

enum class PolicyMode { kCr, kCrRnn };

const char* to_string(PolicyMode mode);

struct ZoneDecision {
  ZoneId zone;
  Decision decision = Decision::kDefer;
  double value_t0 = 0.0;

  friend bool operator==(const ZoneDecision&, const ZoneDecision&) = default;
};

/// One valued sequence in a policy run.
struct SequenceRow {
  enum class Role { kEnumerated, kSampled, kTopK };

  Sequence sequence;
  double eta = 0.0;
  Role role = Role::kEnumerated;
  int label = -1;  // training label for sampled rows
  double score = std::numeric_limits<double>::quiet_NaN();  // model score for top-k rows

  friend bool operator==(const SequenceRow& a, const SequenceRow& b);
};

const char* to_string(SequenceRow::Role role);

struct LabelSummary {
  double eta_ub = 0.0;
  double eta_thr = 0.0;
  double eta_bin = 0.0;
  std::size_t positives = 0;
  std::size_t size = 0;
  bool floor_rule_applied = false;
  bool weibull_fallback = false;

  friend bool operator==(const LabelSummary&, const LabelSummary&) = default;
};

struct TrainSummary {
  std::size_t psi = 0;
  int best_epoch = 0;
  int epochs_trained = 0;
  double best_validation_loss = 0.0;

  friend bool operator==(const TrainSummary&, const TrainSummary&) = default;
};

struct PolicyResult {
  PolicyMode mode = PolicyMode::kCr;
  /// CR-RNN was requested but the candidate set was small enough for CR.
  bool fell_back_to_cr = false;
  std::vector<ZoneId> zones;
  std::vector<ZoneId> covered;
  std::vector<ZoneId> candidates;
  Sequence best_sequence;
  double best_value = 0.0;
  /// In best-sequence order.
  std::vector<ZoneDecision> decisions;
  double npv_deterministic = 0.0;
  double option_premium = 0.0;
  std::size_t evaluated_count = 0;
  std::uint64_t population = 0;
  bool regression_degraded = false;
  std::optional<LabelSummary> labeling;
  std::optional<TrainSummary> training;
  std::vector<SequenceRow> rows;
  double wall_time = 0.0;

  /// Zones the best sequence invests in at t0, in investment order.
  std::vector<ZoneIndex> invested_now() const;

  friend bool operator==(const PolicyResult&, const PolicyResult&) = default;
};

struct PolicyOptions {
  ValuationOptions valuation{};
  int workers = 1;
};

struct CrRnnHyper {
  double frac_seq = 0.06;
  double pnr_max = 0.01;
  double thr_fact = 0.1;
  std::size_t k = 50;
  /// Candidate sets of at most this many zones are solved by plain CR.
  std::size_t small_h_threshold = 6;
  std::uint64_t seed = 0;
  TrainHyper rnn{};
};

/// Candidate zones: everything not in `covered`, ascending.
std::vector<ZoneIndex> candidate_zones(const Scenario& scenario, ZoneMask covered);

/// Values every order of `candidates` and returns the best (ties to the
/// lexicographically smallest sequence).
PolicyResult cr_policy(const SequenceValuator& valuator, std::span<const ZoneIndex> candidates,
                       int workers = 1);
PolicyResult cr_policy(const Scenario& scenario, const DemandPaths& paths,
                       const PolicyOptions& options = {});

PolicyResult cr_rnn_policy(const SequenceValuator& valuator, std::span<const ZoneIndex> candidates,
                           const CrRnnHyper& hyper, int workers = 1);
PolicyResult cr_rnn_policy(const Scenario& scenario, const DemandPaths& paths,
                           const CrRnnHyper& hyper, const PolicyOptions& options = {});

/// JSON report (config embedded verbatim) plus a CSV of sequence values next
/// to it (same stem, .csv).
nlohmann::json report_to_json(const PolicyResult& result);
PolicyResult report_from_json(const nlohmann::json& j);
void write_report(const PolicyResult& result, const std::filesystem::path& file,
                  const nlohmann::json& config = nlohmann::json::object());
PolicyResult read_report(const std::filesystem::path& file);
void write_sequence_table(const PolicyResult& result, const std::filesystem::path& csv);

}  // namespace regionopt
