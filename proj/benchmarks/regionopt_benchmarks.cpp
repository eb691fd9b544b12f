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


#include <benchmark/benchmark.h>

#include "regionopt/lsmc.hpp"
#include "regionopt/neural.hpp"
#include "regionopt/ridership.hpp"
#include "regionopt/scenario.hpp"
#include "regionopt/sequences.hpp"
#include "regionopt/stochastic.hpp"

namespace ro = regionopt;

namespace {

const ro::Scenario& scenario7() {
  static const ro::Scenario s = ro::generate_synthetic_scenario(42, 7, 3, 50.0);
  return s;
}

void BM_EquilibriumRidership(benchmark::State& state) {
  const auto& s = scenario7();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ro::equilibrium_ridership(s.base_demand, s).total);
  }
}
BENCHMARK(BM_EquilibriumRidership);

void BM_ValuateSequence(benchmark::State& state) {
  const auto& s = scenario7();
  const auto paths = ro::simulate_paths(s, static_cast<std::size_t>(state.range(0)), 1);
  ro::ValuationOptions no_cache;
  no_cache.memoize = false;
  const ro::Sequence seq{{3, 1, 6, 0, 2, 5, 4}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(ro::valuate_sequence(seq, paths, s, {}, no_cache).policy_value);
  }
}
BENCHMARK(BM_ValuateSequence)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_LstmForward(benchmark::State& state) {
  const auto psi = static_cast<std::size_t>(state.range(0));
  const auto m = ro::make_model({"A", "B", "C", "D", "E", "F", "G"}, psi,
                                ro::HeadKind::kClassifier, 3);
  const ro::Sequence seq{{3, 1, 6, 0, 2, 5, 4}};
  for (auto _ : state) benchmark::DoNotOptimize(ro::forward(m, seq));
}
BENCHMARK(BM_LstmForward)->Arg(10)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
