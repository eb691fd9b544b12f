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

#include "regionopt/lsmc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <Eigen/QR>

#include "regionopt/error.hpp"

namespace regionopt {

const char* to_string(Decision decision) {
  return decision == Decision::kInvest ? "invest" : "defer";
}

void hermite_row(double x, int n, double* out) {
  if (n <= 0) return;
  out[0] = 1.0;
  if (n == 1) return;
  out[1] = x;
  for (int k = 1; k + 1 < n; ++k) out[k + 1] = x * out[k] - k * out[k - 1];
}

double RegressionBasis::evaluate(double state) const {
  const double z = std > 0.0 ? (state - mean) / std : 0.0;
  double row[16];
  hermite_row(z, effective_degree, row);
  double v = 0.0;
  for (int k = 0; k < effective_degree; ++k) v += coefficients[k] * row[k];
  return v;
}

ContinuationFit continuation_fit(std::span<const double> states, std::span<const double> targets,
                                 int basis_count) {
  require(basis_count >= 1 && basis_count <= 16, ErrorKind::kInvalidArgument,
          "basis count must lie in [1, 16]");
  require(states.size() == targets.size(), ErrorKind::kDimensionMismatch,
          "states and targets differ in length");
  const std::size_t n = states.size();
  require(n >= static_cast<std::size_t>(basis_count), ErrorKind::kInvalidArgument,
          "fewer paths than basis functions");

  ContinuationFit out;
  auto& b = out.basis;
  b.degree_count = basis_count;

  double mean = 0.0;
  for (double x : states) mean += x;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double x : states) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n);
  b.mean = mean;
  b.std = std::sqrt(var);
  if (!(b.std > 1e-12 * std::max(1.0, std::abs(mean)))) b.std = 0.0;

  if (b.std == 0.0 || basis_count == 1) {
    double t = 0.0;
    for (double y : targets) t += y;
    t /= static_cast<double>(n);
    b.effective_degree = 1;
    b.coefficients = {t};
    out.fitted.assign(n, t);
    return out;
  }

  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), basis_count);
  for (std::size_t p = 0; p < n; ++p) {
    double row[16];
    hermite_row((states[p] - mean) / b.std, basis_count, row);
    for (int k = 0; k < basis_count; ++k) design(static_cast<Eigen::Index>(p), k) = row[k];
  }
  const Eigen::Map<const Eigen::VectorXd> y(targets.data(), static_cast<Eigen::Index>(n));

  int cols = basis_count;
  Eigen::VectorXd beta;
  for (;;) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.leftCols(cols));
    if (qr.rank() == cols) {
      beta = qr.solve(y);
      break;
    }
    b.rank_deficient = true;
    cols = std::max<int>(1, static_cast<int>(qr.rank()));
    if (cols == 1) {
      beta = Eigen::VectorXd::Constant(1, y.mean());
      break;
    }
  }
  b.effective_degree = cols;
  b.coefficients.assign(beta.data(), beta.data() + cols);
  const Eigen::VectorXd fitted = design.leftCols(cols) * beta;
  out.fitted.assign(fitted.data(), fitted.data() + n);
  return out;
}

SequenceValuator::SequenceValuator(const Scenario& scenario, const DemandPaths& paths,
                                   ValuationOptions options)
    : scenario_(&scenario),
      paths_(&paths),
      options_(options),
      cache_(scenario, paths, options.ridership, options.memoize) {
  require(options_.basis_count >= 1, ErrorKind::kInvalidArgument, "basis count must be >= 1");
  require((options_.covered & ~scenario.all_zones()) == 0, ErrorKind::kInvalidArgument,
          "covered set names an unknown zone");
}

SequenceValuation SequenceValuator::valuate(const Sequence& sequence) const {
  const Scenario& sc = *scenario_;
  const std::size_t H = sequence.size();
  const std::size_t S = cache_.steps();
  const std::size_t P = cache_.paths();

  SequenceValuation v;
  v.sequence = sequence;
  v.paths = P;
  if (H == 0) return v;

  ZoneMask seen = 0;
  for (ZoneIndex z : sequence.order) {
    require(z < sc.zones.size(), ErrorKind::kInvalidArgument, "sequence zone out of range");
    require(!mask_contains(seen, z), ErrorKind::kInvalidArgument, "sequence repeats a zone");
    require(!mask_contains(options_.covered, z), ErrorKind::kInvalidArgument,
            "sequence zone " + sc.zones[z] + " is already covered");
    seen |= ZoneMask{1} << z;
  }

  const auto n_cov = static_cast<std::size_t>(std::popcount(options_.covered));
  std::vector<std::shared_ptr<const RidershipCache::Entry>> cum(H + 1);
  ZoneMask mask = options_.covered;
  cum[0] = cache_.cumulative(mask);
  for (std::size_t h = 0; h < H; ++h) {
    mask |= ZoneMask{1} << sequence.order[h];
    cum[h + 1] = cache_.cumulative(mask);
  }

  // Zone ridership X and payoff pi, [h][step * P + p].
  std::vector<std::vector<double>> X(H), pi(H);
  v.payoff_t0.resize(H);
  for (std::size_t h = 0; h < H; ++h) {
    X[h].resize(S * P);
    pi[h].resize(S * P);
    for (std::size_t k = 0; k < S * P; ++k) {
      X[h][k] = cum[h + 1]->values[k] - cum[h]->values[k];
      pi[h][k] = zone_payoff(h + 1, X[h][k], sc, n_cov);
    }
    v.payoff_t0[h] = zone_payoff(h + 1, cum[h + 1]->t0 - cum[h]->t0, sc, n_cov);
  }

  const auto& dt = paths_->step_lengths();
  auto discount = [&](double years) { return std::pow(1.0 + sc.discount_rate, -years); };

  // F[h][p] at the current step; F[H] stays zero.
  std::vector<std::vector<double>> F(H + 1, std::vector<double>(P, 0.0));
  std::vector<std::vector<double>> F_next(H + 1, std::vector<double>(P, 0.0));
  std::vector<char> exercise(H * S * P, 0);
  std::vector<double> target(P), phi(P), state(P);

  for (std::size_t s = S; s-- > 0;) {
    const bool last = (s + 1 == S);
    const double d = last ? 0.0 : discount(dt[s + 1]);
    for (std::size_t h = H; h-- > 0;) {
      if (last) {
        std::fill(target.begin(), target.end(), 0.0);
        std::fill(phi.begin(), phi.end(), 0.0);
      } else {
        for (std::size_t p = 0; p < P; ++p) {
          target[p] = d * F_next[h][p];
          state[p] = X[h][s * P + p];
        }
        auto fit = continuation_fit(state, target, options_.basis_count);
        v.regression_degraded = v.regression_degraded || fit.basis.rank_deficient;
        phi = std::move(fit.fitted);
      }
      for (std::size_t p = 0; p < P; ++p) {
        const double ex = pi[h][s * P + p] + F[h + 1][p];
        if (ex >= std::max(phi[p], 0.0)) {
          exercise[(h * S + s) * P + p] = 1;
          F[h][p] = ex;
        } else {
          F[h][p] = target[p];
        }
      }
    }
    std::swap(F, F_next);
  }
  // F_next now holds values at the first horizon step.

  std::vector<double> continuation(H, 0.0);
  if (S > 0 && P > 0) {
    const double d0 = discount(dt[0]);
    for (std::size_t h = 0; h < H; ++h) {
      double sum = 0.0;
      for (std::size_t p = 0; p < P; ++p) sum += F_next[h][p];
      continuation[h] = d0 * sum / static_cast<double>(P);
    }
  }

  v.decisions_t0.assign(H, Decision::kInvest);
  v.per_zone_value_t0.assign(H, 0.0);
  std::vector<double> F0(H + 1, 0.0);
  for (std::size_t h = H; h-- > 0;) {
    const double ex = v.payoff_t0[h] + F0[h + 1];
    if (ex >= continuation[h]) {
      F0[h] = ex;
      v.per_zone_value_t0[h] = ex;
    } else {
      F0[h] = continuation[h];
      for (std::size_t m = h; m < H; ++m) {
        v.decisions_t0[m] = Decision::kDefer;
        v.per_zone_value_t0[m] = continuation[m];
      }
    }
  }
  v.policy_value = F0[0];

  v.stopping_times.assign(H * P, kNever);
  for (std::size_t p = 0; p < P; ++p) {
    int prev = 0;
    for (std::size_t h = 0; h < H; ++h) {
      if (prev == kNever) break;
      int tau = kNever;
      if (v.decisions_t0[h] == Decision::kInvest) {
        tau = 0;
      } else {
        for (std::size_t n = std::max(prev, 1); n <= S; ++n) {
          if (exercise[(h * S + n - 1) * P + p]) {
            tau = static_cast<int>(n);
            break;
          }
        }
      }
      v.stopping_times[h * P + p] = tau;
      prev = tau;
    }
  }
  return v;
}

SequenceValuation valuate_sequence(const Sequence& sequence, const DemandPaths& paths,
                                   const Scenario& scenario, const std::vector<ZoneId>& covered,
                                   ValuationOptions options) {
  for (const auto& id : covered) options.covered |= ZoneMask{1} << scenario.zone_index(id);
  return SequenceValuator(scenario, paths, options).valuate(sequence);
}

}  // namespace regionopt
