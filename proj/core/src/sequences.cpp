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

#include "regionopt/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "regionopt/error.hpp"
#include "regionopt/seeding.hpp"

namespace regionopt {

std::uint64_t factorial(std::size_t n) {
  require(n <= 20, ErrorKind::kCapacity, "factorial overflows above 20");
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

std::vector<Sequence> enumerate_sequences(std::span<const ZoneIndex> zones, std::size_t cap) {
  require(!zones.empty(), ErrorKind::kInvalidArgument, "need at least one zone to enumerate");
  require(zones.size() <= cap, ErrorKind::kCapacity,
          std::to_string(zones.size()) + " zones exceed the enumeration cap of " +
              std::to_string(cap) + "; use sample_sequences instead");
  std::vector<ZoneIndex> order(zones.begin(), zones.end());
  std::sort(order.begin(), order.end());
  require(std::adjacent_find(order.begin(), order.end()) == order.end(),
          ErrorKind::kInvalidArgument, "duplicate zone in enumeration input");
  std::vector<Sequence> out;
  out.reserve(factorial(order.size()));
  do {
    out.push_back(Sequence{order});
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

std::size_t sample_size(double fraction, std::uint64_t population) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(population)));
}

SequenceSplit sample_sequences(std::span<const ZoneIndex> zones, double fraction,
                               std::uint64_t seed, std::size_t cap) {
  require(fraction > 0.0 && fraction <= 1.0, ErrorKind::kInvalidArgument,
          "fraction must lie in (0, 1]");
  auto all = enumerate_sequences(zones, cap);
  const std::size_t m = sample_size(fraction, all.size());
  require(m >= 1, ErrorKind::kInvalidArgument, "fraction selects an empty sample");

  std::vector<std::size_t> idx(all.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  SplitMix64 rng(seed);
  // Partial Fisher-Yates; first m slots are the sample.
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<char> chosen(all.size(), 0);
  for (std::size_t i = 0; i < m; ++i) chosen[idx[i]] = 1;

  SequenceSplit split;
  split.sampled.reserve(m);
  split.remaining.reserve(all.size() - m);
  for (std::size_t i = 0; i < all.size(); ++i) {
    (chosen[i] ? split.sampled : split.remaining).push_back(std::move(all[i]));
  }
  return split;
}

std::vector<Sequence> prune_sequences(const std::vector<Sequence>& sequences,
                                      const PrefixPredicate& feasible) {
  std::vector<Sequence> out;
  for (const auto& s : sequences) {
    bool keep = true;
    for (std::size_t k = 2; k <= s.size() && keep; ++k) {
      keep = feasible(std::span<const ZoneIndex>(s.order.data(), k));
    }
    if (keep) out.push_back(s);
  }
  return out;
}

PrefixPredicate mean_travel_time_within(Eigen::MatrixXd travel_time, double tt_max) {
  return [tt = std::move(travel_time), tt_max](std::span<const ZoneIndex> prefix) {
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < prefix.size(); ++a) {
      for (std::size_t b = a + 1; b < prefix.size(); ++b) {
        sum += tt(prefix[a], prefix[b]);
        ++pairs;
      }
    }
    return pairs == 0 || sum / static_cast<double>(pairs) <= tt_max;
  };
}

std::vector<Sequence> prune_by_travel_time(const std::vector<Sequence>& sequences,
                                           const Eigen::MatrixXd& travel_time, double tt_max) {
  require(travel_time.rows() == travel_time.cols(), ErrorKind::kDimensionMismatch,
          "travel time matrix must be square");
  require((travel_time.array() >= 0.0).all(), ErrorKind::kInvalidArgument,
          "travel times must be >= 0");
  if (std::isinf(tt_max) && tt_max > 0) return sequences;
  return prune_sequences(sequences, mean_travel_time_within(travel_time, tt_max));
}

std::string format_sequence(const Sequence& sequence, const std::vector<ZoneId>& vocabulary) {
  std::string out;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    require(sequence.order[i] < vocabulary.size(), ErrorKind::kInvalidArgument,
            "zone index out of range");
    if (i) out += ',';
    out += vocabulary[sequence.order[i]];
  }
  return out;
}

Sequence parse_sequence(const std::string& text, const std::vector<ZoneId>& vocabulary) {
  Sequence s;
  std::istringstream in(text);
  std::string id;
  while (std::getline(in, id, ',')) {
    while (!id.empty() && (id.back() == ' ' || id.back() == '\r')) id.pop_back();
    while (!id.empty() && id.front() == ' ') id.erase(id.begin());
    if (id.empty()) continue;
    auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), id);
    require(it != vocabulary.end() && *it == id, ErrorKind::kInvalidArgument,
            "unknown zone id '" + id + "'");
    s.order.push_back(static_cast<ZoneIndex>(it - vocabulary.begin()));
  }
  auto sorted = s.order;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          ErrorKind::kInvalidArgument, "sequence repeats a zone: " + text);
  return s;
}

std::string format_sequence(const Sequence& sequence, const Scenario& scenario) {
  return format_sequence(sequence, scenario.zones);
}

Sequence parse_sequence(const std::string& text, const Scenario& scenario) {
  return parse_sequence(text, scenario.zones);
}

}  // namespace regionopt
