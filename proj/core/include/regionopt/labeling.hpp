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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "regionopt/scenario.hpp"
#include "regionopt/sequences.hpp"

namespace regionopt {

struct WeibullFit {
  double shape = 0.0;  // k
  double scale = 0.0;  // lambda
  int iterations = 0;
  double residual = 0.0;  // shape-equation residual at the solution
};

/// Maximum-likelihood Weibull fit. Needs at least 10 strictly positive values
/// that are not all equal.
WeibullFit fit_weibull(std::span<const double> values);

/// Median of the maximum of `population` draws from the fitted Weibull.
double eta_upper_bound(const WeibullFit& fit, double population);
double estimate_eta_ub(std::span<const double> values, double population);

struct ValuedSequence {
  Sequence sequence;
  double eta = 0.0;
};

struct LabeledDataset {
  std::vector<ZoneId> vocabulary;  // sorted zone ids the sequences index into
  std::vector<Sequence> sequences;  // sorted by eta descending, ties lexicographic
  std::vector<double> etas;
  std::vector<int> labels;
  double population = 0.0;  // L
  double thr_fact = 0.0;
  double pnr_max = 0.0;
  double eta_ub = 0.0;
  double eta_thr = 0.0;
  double eta_bin = 0.0;
  double weibull_shape = 0.0;
  double weibull_scale = 0.0;
  /// No value cleared the threshold under the ratio cap; the top sequence
  /// was labeled positive anyway.
  bool floor_rule_applied = false;
  /// The Weibull fit was not possible; eta_ub fell back to the sample max.
  bool weibull_fallback = false;
  double target_mean = 0.0;
  double target_std = 1.0;

  std::size_t size() const { return sequences.size(); }
  std::size_t positives() const;
};

/// Sorted by eta descending; equal values in lexicographic sequence order.
void sort_by_value(std::vector<ValuedSequence>& valuations);

LabeledDataset label_dataset(std::vector<ValuedSequence> valuations, double population,
                             double thr_fact, double pnr_max);

/// Labels held-out sequences with an existing cutoff: 1 iff eta >= eta_bin.
std::vector<int> label_with_threshold(std::span<const double> etas, double eta_bin);

/// CSV "sequence,eta,label" plus a JSON sidecar (same stem, .json) holding
/// the thresholds, flags and vocabulary.
void write_labeled_dataset(const LabeledDataset& dataset, const std::filesystem::path& csv);
LabeledDataset read_labeled_dataset(const std::filesystem::path& csv);

std::filesystem::path sidecar_path(const std::filesystem::path& csv);

}  // namespace regionopt
