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


#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "regionopt/error.hpp"
#include "regionopt/scenario.hpp"
#include "regionopt/stochastic.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace ro = regionopt;
using ro::testing::TempDir;

TEST(Simulate, GbmMomentsMatchClosedForm) {
  auto s = ro::testing::single_od_scenario(50.0, 2.42, 10.0);
  s.zone_volatility = {0.3};
  const std::size_t P = 100000;
  const auto paths = ro::simulate_paths(s, P, 99);
  double mean = 0, lmean = 0, lsq = 0;
  for (std::size_t p = 0; p < P; ++p) {
    const double q = paths.at(p, 4, 0, 0);
    const double l = std::log(q / 50.0);
    mean += q;
    lmean += l;
    lsq += l * l;
  }
  mean /= P;
  lmean /= P;
  const double lvar = lsq / P - lmean * lmean;
  EXPECT_NEAR(mean, 50.0, 0.01 * 50.0);
  EXPECT_NEAR(lvar, 0.09 * 5.0, 0.02 * 0.45);
  EXPECT_NEAR(lmean, -0.5 * 0.45, 0.01);
}

TEST(Simulate, LogIncrementsAreUncorrelated) {
  auto s = ro::testing::single_od_scenario(20.0, 2.42, 10.0);
  s.zone_volatility = {0.25};
  const std::size_t P = 20000;
  const auto paths = ro::simulate_paths(s, P, 5);
  std::vector<double> a(P), b(P);
  for (std::size_t p = 0; p < P; ++p) {
    a[p] = std::log(paths.at(p, 0, 0, 0) / 20.0);
    b[p] = std::log(paths.at(p, 1, 0, 0) / paths.at(p, 0, 0, 0));
  }
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / P;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / P;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t p = 0; p < P; ++p) {
    sab += (a[p] - ma) * (b[p] - mb);
    saa += (a[p] - ma) * (a[p] - ma);
    sbb += (b[p] - mb) * (b[p] - mb);
  }
  EXPECT_LT(std::abs(sab / std::sqrt(saa * sbb)), 4.0 / std::sqrt(double(P)));
}

TEST(Simulate, ZeroVolatilityIsConstant) {
  auto s = ro::testing::with_zero_volatility(ro::generate_synthetic_scenario(3, 3, 2, 40));
  const auto paths = ro::simulate_paths(s, 8, 1);
  for (std::size_t p = 0; p < 8; ++p)
    for (std::size_t t = 0; t < paths.steps(); ++t)
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(paths.at(p, t, i, j), s.base_demand(i, j));
}

TEST(Simulate, ZeroDemandIsAbsorbing) {
  auto s = ro::generate_synthetic_scenario(3, 2, 2, 40);
  s.base_demand(1, 2) = 0.0;
  const auto paths = ro::simulate_paths(s, 50, 1);
  for (std::size_t p = 0; p < 50; ++p)
    for (std::size_t t = 0; t < paths.steps(); ++t) EXPECT_EQ(paths.at(p, t, 1, 2), 0.0);
}

TEST(Simulate, DeterministicAndPrefixStable) {
  const auto s = ro::generate_synthetic_scenario(8, 3, 2, 40);
  const auto a = ro::simulate_paths(s, 30, 77);
  EXPECT_EQ(a, ro::simulate_paths(s, 30, 77));
  const auto longer = ro::simulate_paths(s, 60, 77);
  for (std::size_t p = 0; p < 30; ++p)
    for (std::size_t t = 0; t < a.steps(); ++t)
      for (std::size_t k = 0; k < 36; ++k)
        EXPECT_EQ(a.matrix(p, t)[k], longer.matrix(p, t)[k]);
  EXPECT_NE(a, ro::simulate_paths(s, 30, 78));
}

TEST(Simulate, WorkerCountDoesNotChangePaths) {
  const auto s = ro::generate_synthetic_scenario(8, 4, 2, 40);
  EXPECT_EQ(ro::simulate_paths(s, 40, 3, 1), ro::simulate_paths(s, 40, 3, 4));
}

TEST(Simulate, OriginZoneVolatilityDrivesSpread) {
  auto s = ro::generate_synthetic_scenario(8, 2, 1, 40);
  s.zone_volatility = {0.0, 0.3};
  const auto paths = ro::simulate_paths(s, 10, 3);
  for (std::size_t p = 0; p < 10; ++p) {
    EXPECT_EQ(paths.at(p, 2, 0, 1), s.base_demand(0, 1));
    EXPECT_NE(paths.at(p, 2, 1, 0), s.base_demand(1, 0));
  }
}

TEST(Simulate, MartingaleErrorShrinksWithPaths) {
  auto s = ro::testing::single_od_scenario(10.0, 2.42, 10.0);
  s.zone_volatility = {0.2};
  auto err = [&](std::size_t P) {
    double total = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const auto paths = ro::simulate_paths(s, P, seed);
      double m = 0;
      for (std::size_t p = 0; p < P; ++p) m += paths.at(p, 4, 0, 0);
      total += std::abs(m / P - 10.0);
    }
    return total / 8;
  };
  EXPECT_LT(err(20000), err(200));
}

TEST(Simulate, RejectsBadArguments) {
  auto s = ro::generate_synthetic_scenario(8, 2, 1, 40);
  EXPECT_THROW(ro::simulate_paths(s, 0, 1), ro::Error);
  s.zone_volatility[0] = -0.1;
  EXPECT_THROW(ro::simulate_paths(s, 5, 1), ro::Error);
}

TEST(PathsIo, CsvAndBinaryRoundTrip) {
  TempDir dir;
  auto s = ro::generate_synthetic_scenario(8, 2, 2, 40);
  s.horizon_steps = {0.5, 1.0, 2.5};
  const auto paths = ro::simulate_paths(s, 6, 12);
  EXPECT_EQ(paths.step_lengths(), (std::vector<double>{0.5, 0.5, 1.5}));
  ro::write_paths_csv(paths, dir / "p.csv");
  ro::write_paths_binary(paths, dir / "p.bin");
  // The CSV dump keeps shape and values only.
  const auto csv = ro::read_paths_csv(dir / "p.csv");
  EXPECT_EQ(csv.paths(), paths.paths());
  EXPECT_EQ(csv.steps(), paths.steps());
  EXPECT_EQ(csv.subzones(), paths.subzones());
  EXPECT_EQ(csv.values(), paths.values());
  EXPECT_EQ(ro::read_paths_binary(dir / "p.bin"), paths);
}
