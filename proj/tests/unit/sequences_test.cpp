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


#include <algorithm>
#include <chrono>
#include <limits>
#include <set>

#include <gtest/gtest.h>

#include "regionopt/error.hpp"
#include "regionopt/scenario.hpp"
#include "regionopt/sequences.hpp"

namespace ro = regionopt;

namespace {
std::vector<ro::ZoneIndex> iota_zones(std::size_t n) {
  std::vector<ro::ZoneIndex> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = static_cast<ro::ZoneIndex>(i);
  return z;
}
}  // namespace

TEST(Enumerate, Counts) {
  EXPECT_EQ(ro::enumerate_sequences(iota_zones(1)).size(), 1u);
  EXPECT_EQ(ro::enumerate_sequences(iota_zones(3)).size(), 6u);
  EXPECT_EQ(ro::enumerate_sequences(iota_zones(7)).size(), 5040u);
  EXPECT_EQ(ro::enumerate_sequences(iota_zones(8)).size(), 40320u);
  EXPECT_EQ(ro::factorial(7), 5040u);
  EXPECT_EQ(ro::factorial(0), 1u);
}

TEST(Enumerate, DistinctLexicographicPermutations) {
  const std::vector<ro::ZoneIndex> zones{4, 1, 6, 2};
  const auto all = ro::enumerate_sequences(zones);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  EXPECT_EQ(std::set<ro::Sequence>(all.begin(), all.end()).size(), 24u);
  for (const auto& s : all) {
    auto sorted = s.order;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (std::vector<ro::ZoneIndex>{1, 2, 4, 6}));
  }
}

TEST(Enumerate, CapDirectsToSampling) {
  try {
    ro::enumerate_sequences(iota_zones(10));
    FAIL();
  } catch (const ro::Error& e) {
    EXPECT_EQ(e.kind(), ro::ErrorKind::kCapacity);
  }
  EXPECT_EQ(ro::enumerate_sequences(iota_zones(4), 4).size(), 24u);
}

TEST(Sample, SizesAndPartition) {
  EXPECT_EQ(ro::sample_size(0.06, 5040), 302u);
  const auto zones = iota_zones(7);
  const auto split = ro::sample_sequences(zones, 0.06, 5);
  EXPECT_EQ(split.sampled.size(), 302u);
  EXPECT_EQ(split.remaining.size(), 5040u - 302u);
  EXPECT_TRUE(std::is_sorted(split.sampled.begin(), split.sampled.end()));
  EXPECT_TRUE(std::is_sorted(split.remaining.begin(), split.remaining.end()));
  std::vector<ro::Sequence> merged;
  std::merge(split.sampled.begin(), split.sampled.end(), split.remaining.begin(),
             split.remaining.end(), std::back_inserter(merged));
  EXPECT_EQ(merged, ro::enumerate_sequences(zones));
}

TEST(Sample, FullFractionLeavesNothing) {
  const auto split = ro::sample_sequences(iota_zones(4), 1.0, 1);
  EXPECT_EQ(split.sampled.size(), 24u);
  EXPECT_TRUE(split.remaining.empty());
}

TEST(Sample, SeedDeterminesSplit) {
  const auto a = ro::sample_sequences(iota_zones(6), 0.1, 9);
  const auto b = ro::sample_sequences(iota_zones(6), 0.1, 9);
  const auto c = ro::sample_sequences(iota_zones(6), 0.1, 10);
  EXPECT_EQ(a.sampled, b.sampled);
  EXPECT_NE(a.sampled, c.sampled);
}

TEST(Sample, RejectsBadFraction) {
  EXPECT_THROW(ro::sample_sequences(iota_zones(4), 0.0, 1), ro::Error);
  EXPECT_THROW(ro::sample_sequences(iota_zones(4), 1.5, 1), ro::Error);
}

TEST(Prune, InfiniteThresholdIsIdentity) {
  const auto all = ro::enumerate_sequences(iota_zones(4));
  EXPECT_EQ(ro::prune_by_travel_time(all, Eigen::MatrixXd::Constant(4, 4, 1e6)), all);
}

TEST(Prune, MatchesBruteForcePrefixCheck) {
  Eigen::MatrixXd tt(3, 3);
  tt << 0, 30, 5, 30, 0, 5, 5, 5, 0;
  const double tt_max = 14.0;
  const auto all = ro::enumerate_sequences(iota_zones(3));
  const auto kept = ro::prune_by_travel_time(all, tt, tt_max);
  std::vector<ro::Sequence> expected;
  for (const auto& s : all) {
    bool ok = true;
    for (std::size_t len = 2; len <= 3; ++len) {
      double sum = 0;
      int pairs = 0;
      for (std::size_t a = 0; a < len; ++a)
        for (std::size_t b = a + 1; b < len; ++b) {
          sum += tt(s.order[a], s.order[b]);
          ++pairs;
        }
      ok = ok && sum / pairs <= tt_max;
    }
    if (ok) expected.push_back(s);
  }
  EXPECT_EQ(kept, expected);
  EXPECT_EQ(kept.size(), 4u);
  for (const auto& s : kept) {
    const bool bad_pair = (s.order[0] == 0 && s.order[1] == 1) ||
                          (s.order[0] == 1 && s.order[1] == 0);
    EXPECT_FALSE(bad_pair);
  }
}

TEST(Prune, ZeroThresholdRemovesEverything) {
  const auto all = ro::enumerate_sequences(iota_zones(3));
  EXPECT_TRUE(ro::prune_by_travel_time(all, Eigen::MatrixXd::Constant(3, 3, 2.0), 0.0).empty());
}

TEST(Prune, MonotoneInThreshold) {
  Eigen::MatrixXd tt(4, 4);
  tt << 0, 3, 9, 4, 3, 0, 7, 8, 9, 7, 0, 2, 4, 8, 2, 0;
  const auto all = ro::enumerate_sequences(iota_zones(4));
  std::size_t prev = 0;
  for (double m : {2.0, 4.0, 5.0, 6.0, 8.0, 10.0}) {
    const auto kept = ro::prune_by_travel_time(all, tt, m);
    EXPECT_GE(kept.size(), prev);
    prev = kept.size();
  }
}

TEST(Prune, CustomPredicate) {
  const auto all = ro::enumerate_sequences(iota_zones(4));
  const auto kept = ro::prune_sequences(
      all, [](std::span<const ro::ZoneIndex> prefix) { return prefix.front() == 2; });
  EXPECT_EQ(kept.size(), 6u);
}

TEST(Format, RoundTripsThroughIds) {
  const auto s = ro::generate_synthetic_scenario(1, 4, 1, 10);
  const ro::Sequence seq{{2, 0, 3, 1}};
  const auto text = ro::format_sequence(seq, s);
  EXPECT_EQ(text, "Z03,Z01,Z04,Z02");
  EXPECT_EQ(ro::parse_sequence(text, s), seq);
  EXPECT_EQ(ro::parse_sequence(" Z03 , Z01,Z04 ,Z02", s), seq);
  EXPECT_THROW(ro::parse_sequence("Z03,Z03", s), ro::Error);
  EXPECT_THROW(ro::parse_sequence("Z03,Q1", s), ro::Error);
}
