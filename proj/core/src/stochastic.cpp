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

#include "regionopt/stochastic.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "regionopt/error.hpp"
#include "regionopt/parallel.hpp"
#include "regionopt/seeding.hpp"

namespace regionopt {

DemandPaths::DemandPaths(std::size_t n_paths, std::size_t n_steps, std::size_t n_subzones,
                         std::uint64_t seed, std::vector<double> step_lengths)
    : paths_(n_paths),
      steps_(n_steps),
      subzones_(n_subzones),
      seed_(seed),
      step_lengths_(std::move(step_lengths)),
      values_(n_paths * n_steps * n_subzones * n_subzones, 0.0) {
  require(step_lengths_.size() == n_steps, ErrorKind::kDimensionMismatch,
          "one step length per step is required");
}

Eigen::MatrixXd DemandPaths::matrix_copy(std::size_t path, std::size_t step) const {
  const auto m = matrix(path, step);
  Eigen::MatrixXd out(subzones_, subzones_);
  for (std::size_t i = 0; i < subzones_; ++i)
    for (std::size_t j = 0; j < subzones_; ++j) out(i, j) = m[i * subzones_ + j];
  return out;
}

DemandPaths simulate_paths(const Scenario& scenario, std::size_t n_paths, std::uint64_t seed,
                           int workers) {
  require(n_paths >= 1, ErrorKind::kInvalidArgument, "n_paths must be >= 1");
  for (double v : scenario.zone_volatility) {
    require(v >= 0.0, ErrorKind::kInvalidArgument, "volatility must be >= 0");
  }
  const std::size_t n = scenario.subzone_count();
  const std::size_t steps = scenario.horizon_steps.size();
  std::vector<double> dt(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    dt[s] = scenario.horizon_steps[s] - (s == 0 ? 0.0 : scenario.horizon_steps[s - 1]);
  }
  DemandPaths out(n_paths, steps, n, seed, dt);

  // Per-step drift and diffusion for each origin zone.
  const std::size_t zones = scenario.zone_count();
  std::vector<double> drift(zones * steps), diffusion(zones * steps);
  for (std::size_t z = 0; z < zones; ++z) {
    const double sigma = scenario.zone_volatility[z];
    for (std::size_t s = 0; s < steps; ++s) {
      drift[z * steps + s] = (scenario.drift - 0.5 * sigma * sigma) * dt[s];
      diffusion[z * steps + s] = sigma * std::sqrt(dt[s]);
    }
  }

  parallel_for(n_paths, workers, [&](std::size_t p) {
    std::vector<double> level(n * n);
    for (std::size_t k = 0; k < n * n; ++k) level[k] = scenario.base_demand(k / n, k % n);
    for (std::size_t k = 0; k < n * n; ++k) {
      const std::size_t origin_zone = scenario.subzone_zone[k / n];
      SplitMix64 rng(stream_seed(seed, {p, k}));
      std::normal_distribution<double> normal(0.0, 1.0);
      double q = level[k];
      for (std::size_t s = 0; s < steps; ++s) {
        const double z = normal(rng);
        q *= std::exp(drift[origin_zone * steps + s] + diffusion[origin_zone * steps + s] * z);
        out.matrix(p, s)[k] = q;
      }
    }
  });
  return out;
}

void write_paths_csv(const DemandPaths& paths, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) fail(ErrorKind::kIo, "cannot write " + file.string());
  out << paths.paths() << ',' << paths.steps() << ',' << paths.subzones() << '\n';
  out.precision(17);
  for (std::size_t p = 0; p < paths.paths(); ++p) {
    for (std::size_t s = 0; s < paths.steps(); ++s) {
      const auto m = paths.matrix(p, s);
      for (std::size_t k = 0; k < m.size(); ++k) out << (k ? "," : "") << m[k];
      out << '\n';
    }
  }
  if (!out) fail(ErrorKind::kIo, "failed writing " + file.string());
}

DemandPaths read_paths_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorKind::kIo, "cannot open " + file.string());
  std::size_t p = 0, s = 0, n = 0;
  char c1 = 0, c2 = 0;
  in >> p >> c1 >> s >> c2 >> n;
  if (!in || c1 != ',' || c2 != ',') fail(ErrorKind::kParse, "bad paths header in " + file.string());
  // The CSV form carries no step lengths; unit steps are assumed.
  DemandPaths out(p, s, n, 0, std::vector<double>(s, 1.0));
  for (std::size_t pi = 0; pi < p; ++pi) {
    for (std::size_t si = 0; si < s; ++si) {
      auto m = out.matrix(pi, si);
      for (std::size_t k = 0; k < m.size(); ++k) {
        if (k) {
          char comma = 0;
          in >> comma;
        }
        in >> m[k];
      }
    }
  }
  if (!in) fail(ErrorKind::kParse, "truncated paths file " + file.string());
  return out;
}

void write_paths_binary(const DemandPaths& paths, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + file.string());
  const std::uint64_t header[4] = {paths.paths(), paths.steps(), paths.subzones(), paths.seed()};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(paths.step_lengths().data()),
            static_cast<std::streamsize>(paths.steps() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(paths.values().data()),
            static_cast<std::streamsize>(paths.values().size() * sizeof(double)));
  if (!out) fail(ErrorKind::kIo, "failed writing " + file.string());
}

DemandPaths read_paths_binary(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + file.string());
  std::uint64_t header[4];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in) fail(ErrorKind::kParse, "bad binary paths header");
  std::vector<double> dt(header[1]);
  in.read(reinterpret_cast<char*>(dt.data()), static_cast<std::streamsize>(dt.size() * sizeof(double)));
  DemandPaths out(header[0], header[1], header[2], header[3], dt);
  for (std::size_t p = 0; p < out.paths(); ++p) {
    for (std::size_t s = 0; s < out.steps(); ++s) {
      auto m = out.matrix(p, s);
      in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    }
  }
  if (!in) fail(ErrorKind::kParse, "truncated binary paths file " + file.string());
  return out;
}

}  // namespace regionopt
