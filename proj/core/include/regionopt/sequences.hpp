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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "regionopt/scenario.hpp"

namespace regionopt {

/// An investment order over candidate zones (a permutation). Comparison is
/// lexicographic over zone indices, which matches lexicographic order of the
/// zone ids because Scenario keeps zones sorted.
struct Sequence {
  std::vector<ZoneIndex> order;

  std::size_t size() const { return order.size(); }
  bool empty() const { return order.empty(); }

  friend auto operator<=>(const Sequence&, const Sequence&) = default;
  friend bool operator==(const Sequence&, const Sequence&) = default;
};

inline constexpr std::size_t kDefaultEnumerationCap = 9;

std::uint64_t factorial(std::size_t n);

/// All |zones|! orders, lexicographic, no duplicates. Throws kCapacity above
/// `cap` zones (use sample_sequences or raise the cap).
std::vector<Sequence> enumerate_sequences(std::span<const ZoneIndex> zones,
                                          std::size_t cap = kDefaultEnumerationCap);

struct SequenceSplit {
  std::vector<Sequence> sampled;    // lexicographic
  std::vector<Sequence> remaining;  // lexicographic
};

/// Number of sequences drawn for a fraction of `population`: round(f * L).
std::size_t sample_size(double fraction, std::uint64_t population);

/// Uniform sample without replacement of round(fraction * H!) sequences.
SequenceSplit sample_sequences(std::span<const ZoneIndex> zones, double fraction,
                               std::uint64_t seed, std::size_t cap = kDefaultEnumerationCap);

/// Decides whether an ordered prefix (length >= 2) is operationally feasible.
using PrefixPredicate = std::function<bool(std::span<const ZoneIndex>)>;

/// Keeps a sequence iff every prefix of length >= 2 satisfies the predicate.
std::vector<Sequence> prune_sequences(const std::vector<Sequence>& sequences,
                                      const PrefixPredicate& feasible);

/// Mean pairwise zone travel time within the prefix is at most tt_max.
PrefixPredicate mean_travel_time_within(Eigen::MatrixXd travel_time, double tt_max);

std::vector<Sequence> prune_by_travel_time(
    const std::vector<Sequence>& sequences, const Eigen::MatrixXd& travel_time,
    double tt_max = std::numeric_limits<double>::infinity());

/// "Z01,Z03,Z02" style serialization.
std::string format_sequence(const Sequence& sequence, const Scenario& scenario);
Sequence parse_sequence(const std::string& text, const Scenario& scenario);
/// Same, against a bare id vocabulary (sorted zone ids).
std::string format_sequence(const Sequence& sequence, const std::vector<ZoneId>& vocabulary);
Sequence parse_sequence(const std::string& text, const std::vector<ZoneId>& vocabulary);

}  // namespace regionopt
