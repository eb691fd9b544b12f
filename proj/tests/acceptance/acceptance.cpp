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


// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 125).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "regionopt/labeling.hpp"
#include "regionopt/log.hpp"
#include "regionopt/lsmc.hpp"
#include "regionopt/neural.hpp"
#include "regionopt/policy.hpp"
#include "regionopt/ridership.hpp"
#include "regionopt/rollout.hpp"
#include "regionopt/scenario.hpp"
#include "regionopt/seeding.hpp"
#include "regionopt/sequences.hpp"
#include "regionopt/stochastic.hpp"

namespace ro = regionopt;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<ro::ZoneIndex> iota_zones(std::size_t n) {
  std::vector<ro::ZoneIndex> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = static_cast<ro::ZoneIndex>(i);
  return z;
}

std::string strip_timing(const ro::PolicyResult& r) {
  auto j = ro::report_to_json(r);
  j.erase("timing");
  return j.dump();
}

std::string strip_timing(const ro::RolloutResult& r) {
  auto j = ro::rollout_to_json(r);
  j.erase("timing");
  return j.dump();
}

// ---------------------------------------------------------------------------

void enumeration_counts() {
  const auto t = Clock::now();
  const auto h7 = ro::enumerate_sequences(iota_zones(7)).size();
  const auto h8 = ro::enumerate_sequences(iota_zones(8)).size();
  const double secs = seconds_since(t);
  report(1, "enumeration counts", h7 == 5040 && h8 == 40320 && secs < 1.0,
         "H=7 -> " + std::to_string(h7) + ", H=8 -> " + std::to_string(h8) +
             fmt(", %.3f s", secs));
}

void single_option_lattice() {
  const auto t = Clock::now();
  bool ok = true;
  std::string detail;
  for (double sigma : {0.1, 0.3}) {
    auto s = ro::testing::single_od_scenario(100.0, 0.0, 0.0);
    s.gamma = 0.0;  // ridership equals demand, so the payoff is X - c
    s.zone_volatility = {sigma};
    s.within_zone_cost = 100.0;
    s.drift = 0.0;
    s.discount_rate = 0.02;
    const double oracle = ro::testing::lattice_option(100.0, 100.0, sigma, 0.02, 5, 1000);
    double mean = 0, worst = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto paths = ro::simulate_paths(s, 10000, seed);
      const double v = ro::valuate_sequence(ro::Sequence{{0}}, paths, s).policy_value;
      mean += v / 3.0;
      worst = std::max(worst, std::abs(v - oracle) / oracle);
    }
    const double rel = std::abs(mean - oracle) / oracle;
    ok = ok && rel < 0.02;
    detail += fmt("sigma=%.1f ", sigma) + fmt("lattice %.4f ", oracle) +
              fmt("LSMC mean %.4f ", mean) + fmt("rel err %.4f ", rel) +
              fmt("(worst seed %.4f); ", worst);
  }
  const double secs = seconds_since(t);
  report(2, "LSMC single-option lattice oracle", ok && secs < 30.0,
         detail + fmt("%.2f s", secs));
}

void deterministic_dp() {
  const auto t = Clock::now();
  double worst = 0;
  int cases = 0;
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    auto s = ro::testing::with_zero_volatility(ro::generate_synthetic_scenario(seed, 3, 3, 60.0));
    s.drift = 0.05;
    s.within_zone_cost *= 0.5 + 0.4 * static_cast<double>(seed);
    const auto paths = ro::simulate_paths(s, 50, seed);
    for (const auto& seq : ro::enumerate_sequences(iota_zones(3))) {
      const double expected = ro::testing::deterministic_dp(s, seq);
      const double got = ro::valuate_sequence(seq, paths, s).policy_value;
      worst = std::max(worst, std::abs(got - expected) / std::max(1.0, std::abs(expected)));
      ++cases;
    }
  }
  const double secs = seconds_since(t);
  report(3, "deterministic DP equivalence", worst <= 1e-9 && secs < 5.0,
         std::to_string(cases) + " sequences, max scaled diff " + fmt("%.2e", worst) +
             fmt(", %.2f s", secs));
}

void worthless_option() {
  const auto t = Clock::now();
  auto s = ro::generate_synthetic_scenario(5, 4, 3, 60.0);
  s.within_zone_cost = 1e9;
  const auto paths = ro::simulate_paths(s, 300, 3);
  ro::SequenceValuator valuator(s, paths);
  bool ok = true;
  std::size_t n = 0;
  for (const auto& seq : ro::enumerate_sequences(iota_zones(4))) {
    const auto v = valuator.valuate(seq);
    ok = ok && v.policy_value == 0.0;
    for (auto d : v.decisions_t0) ok = ok && d == ro::Decision::kDefer;
    for (int tau : v.stopping_times) ok = ok && tau == ro::kNever;
    ++n;
  }
  const double secs = seconds_since(t);
  report(4, "worthless-option zero", ok && secs < 5.0,
         std::to_string(n) + " sequences all exactly 0 with all-defer" + fmt(", %.2f s", secs));
}

void fixed_point_bisection() {
  const auto t = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> q(1.0, 1000.0), c(1.0, 10.0), tiv(1.0, 60.0);
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const auto s = ro::testing::single_od_scenario(q(rng), c(rng), tiv(rng));
    const double got = ro::equilibrium_ridership(s.base_demand, s).total;
    const double want = ro::testing::bisect_single_od(s.base_demand(0, 0), s.trip_price(0, 0),
                                                      s.in_vehicle_time(0, 0), s);
    worst = std::max(worst, std::abs(got - want));
  }
  const double secs = seconds_since(t);
  report(5, "fixed-point ridership oracle", worst <= 1e-3 && secs < 1.0,
         "20 draws, max abs diff " + fmt("%.2e", worst) + fmt(", %.3f s", secs));
}

void gradient_check() {
  const auto t = Clock::now();
  const std::vector<ro::ZoneId> vocab{"A", "B", "C"};
  auto m = ro::make_model(vocab, 4, ro::HeadKind::kClassifier, 17);
  const auto all = ro::enumerate_sequences(iota_zones(3));
  std::vector<ro::Example> batch;
  for (int i = 0; i < 5; ++i) batch.push_back({all[i], static_cast<double>(i % 2)});
  Eigen::VectorXd g;
  ro::loss_and_gradient(m, batch, &g);
  const auto L = m.layout();
  const std::size_t bounds[] = {L.embeddings, L.w_input,     L.w_recurrent, L.gate_bias,
                                L.head_weight, L.head_bias, L.total};
  const char* names[] = {"embeddings", "w_input", "w_recurrent", "gate_bias", "head_weight",
                         "head_bias"};
  const double eps = 1e-6;
  std::string detail;
  double worst_all = 0;
  for (int group = 0; group < 6; ++group) {
    double worst = 0;
    for (std::size_t k = bounds[group]; k < bounds[group + 1]; ++k) {
      auto& p = m.parameters()(static_cast<Eigen::Index>(k));
      const double keep = p;
      p = keep + eps;
      const double up = ro::mean_loss(m, batch);
      p = keep - eps;
      const double down = ro::mean_loss(m, batch);
      p = keep;
      const double numeric = (up - down) / (2 * eps);
      const double analytic = g(static_cast<Eigen::Index>(k));
      worst = std::max(worst, std::abs(numeric - analytic) /
                                  std::max(1e-6, std::abs(numeric) + std::abs(analytic)));
    }
    worst_all = std::max(worst_all, worst);
    detail += std::string(names[group]) + fmt(" %.1e ", worst);
  }
  const double secs = seconds_since(t);
  report(6, "BPTT gradient check", worst_all < 1e-4 && secs < 10.0,
         detail + fmt("(%.2f s)", secs));
}

void overfit() {
  const auto t = Clock::now();
  const std::vector<ro::ZoneId> vocab{"A", "B", "C", "D"};
  const auto all = ro::enumerate_sequences(iota_zones(4));
  std::vector<ro::Example> ex;
  for (std::size_t i = 0; i < 20; ++i) {
    ex.push_back({all[i], all[i].order[1] == 2 || all[i].order[0] == 3 ? 1.0 : 0.0});
  }
  ro::TrainHyper hyper;
  hyper.learning_rate = 0.02;
  hyper.batch_size = 20;
  hyper.max_epochs = 300;
  hyper.patience = 300;
  hyper.validation_fraction = 0.0;
  hyper.model_seed = 1;
  const auto r = ro::train(ex, vocab, hyper);
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& e : ex) {
    scores.push_back(ro::forward(r.model, e.sequence));
    labels.push_back(static_cast<int>(e.target));
  }
  const double a = ro::auc(scores, labels);
  const double bce = ro::mean_loss(r.model, ex);
  const double secs = seconds_since(t);
  report(7, "overfit sanity", a == 1.0 && bce < 0.05 && secs < 30.0,
         fmt("AUC %.3f", a) + fmt(", BCE %.4f", bce) + ", " +
             std::to_string(r.history.epochs.size()) + " epochs" + fmt(", %.2f s", secs));
}

// ---------------------------------------------------------------------------
// Desk-scale H=7 experiments shared by criteria 8-11 and 13.

struct DeskScale {
  ro::Scenario scenario = ro::generate_synthetic_scenario(42, 7, 3, 50.0);
  ro::DemandPaths paths = ro::simulate_paths(scenario, 300, ro::derive_seed(42, "paths"));
  ro::PolicyResult cr;
  std::vector<double> cr_times;
  std::map<ro::Sequence, double> truth;
};

ro::CrRnnHyper rnn_hyper(double frac, std::uint64_t seed) {
  ro::CrRnnHyper h;
  h.frac_seq = frac;
  h.pnr_max = 0.01;
  h.thr_fact = 0.1;
  h.k = 50;
  h.seed = seed;
  return h;
}

// Gap between the best unseen sequence and the best of the K ranked ones.
double pool_gap(const DeskScale& d, const ro::PolicyResult& r) {
  std::map<ro::Sequence, bool> sampled;
  double best_pred = 0;
  for (const auto& row : r.rows) {
    if (row.role == ro::SequenceRow::Role::kSampled) sampled[row.sequence] = true;
    if (row.role == ro::SequenceRow::Role::kTopK) best_pred = std::max(best_pred, row.eta);
  }
  double best_true = 0;
  for (const auto& [seq, eta] : d.truth) {
    if (!sampled.count(seq)) best_true = std::max(best_true, eta);
  }
  return ro::gap_at_k(best_true, best_pred);
}

void desk_scale(DeskScale& d) {
  const auto t = Clock::now();
  for (int rep = 0; rep < 3; ++rep) {
    auto cr = ro::cr_policy(d.scenario, d.paths);
    d.cr_times.push_back(cr.wall_time);
    d.cr = std::move(cr);
  }
  for (const auto& row : d.cr.rows) d.truth[row.sequence] = row.eta;

  std::vector<double> gaps, times;
  std::vector<ro::PolicyResult> runs;
  bool counts_ok = true;
  std::string counts;
  for (std::uint64_t seed : {1, 2, 3}) {
    auto r = ro::cr_rnn_policy(d.scenario, d.paths, rnn_hyper(0.06, seed));
    gaps.push_back(ro::gap_at_k(d.cr.best_value, r.best_value));
    times.push_back(r.wall_time);
    counts_ok = counts_ok && r.evaluated_count == 352 && r.population == 5040;
    counts += std::to_string(r.evaluated_count) + " ";
    runs.push_back(std::move(r));
  }
  double mean_gap = 0;
  for (double g : gaps) mean_gap += g / 3.0;
  const double secs = seconds_since(t);
  report(8, "CR-RNN quality at desk scale", mean_gap <= 2.0 && secs < 1800.0,
         fmt("CR best %.3f", d.cr.best_value) + fmt(", gaps %.3f", gaps[0]) +
             fmt("/%.3f", gaps[1]) + fmt("/%.3f %%", gaps[2]) + fmt(", mean %.3f %%", mean_gap));

  const double skipped = 1.0 - 352.0 / 5040.0;
  report(9, "skip fraction", counts_ok && skipped >= 0.93,
         "evaluated " + counts + "of 5040" + fmt(" (%.1f %% skipped)", 100.0 * skipped));

  const double ratio = median(times) / median(d.cr_times);
  report(10, "speedup direction", ratio < 0.5,
         fmt("CR-RNN %.3f s", median(times)) + fmt(" vs CR %.3f s", median(d.cr_times)) +
             fmt(" (ratio %.3f, medians of 3 runs, workers=1)", ratio));

  // Determinism of the same runs, recorded for criterion 13.
  ro::PolicyOptions four;
  four.workers = 4;
  const auto again = ro::cr_rnn_policy(d.scenario, d.paths, rnn_hyper(0.06, 1));
  const auto threaded = ro::cr_rnn_policy(d.scenario, d.paths, rnn_hyper(0.06, 1), four);
  const auto cr_threaded = ro::cr_policy(d.scenario, d.paths, four);
  const bool same = strip_timing(again) == strip_timing(runs[0]) &&
                    strip_timing(threaded) == strip_timing(runs[0]) &&
                    strip_timing(cr_threaded) == strip_timing(d.cr);
  d.cr_times.clear();
  d.cr_times.push_back(same ? 1.0 : 0.0);
}

void learning_trend(const DeskScale& d) {
  const auto t = Clock::now();
  const double fracs[] = {0.01, 0.03, 0.06, 0.10};
  std::vector<double> means, ses;
  std::string detail;
  for (double f : fracs) {
    std::vector<double> g;
    for (std::uint64_t seed : {1, 2, 3}) {
      g.push_back(pool_gap(d, ro::cr_rnn_policy(d.scenario, d.paths, rnn_hyper(f, seed))));
    }
    const double m = (g[0] + g[1] + g[2]) / 3.0;
    double ss = 0;
    for (double x : g) ss += (x - m) * (x - m);
    const double se = std::sqrt(ss / 2.0) / std::sqrt(3.0);
    means.push_back(m);
    ses.push_back(se);
    detail += fmt("frac %.2f: ", f) + fmt("%.3f", m) + fmt(" +/- %.3f %%; ", se);
  }
  bool ok = true;
  for (std::size_t i = 1; i < means.size(); ++i) {
    const double se = std::sqrt(ses[i] * ses[i] + ses[i - 1] * ses[i - 1]);
    ok = ok && means[i] <= means[i - 1] + se;
  }
  report(11, "monotone learning trend", ok, detail + fmt("%.1f s", seconds_since(t)));
}

// ---------------------------------------------------------------------------

struct RolloutRuns {
  ro::RolloutResult cr, rnn, all;
};

ro::RolloutOptions rollout_options(ro::RolloutPolicy policy, int workers) {
  ro::RolloutOptions o;
  o.policy = policy;
  o.outer_paths = 5;
  o.epochs = 5;
  o.inner_paths = 300;
  o.seed = 2024;
  o.inner = rnn_hyper(0.06, 0);
  // Let the ranker run on the five-zone first epoch instead of falling back.
  o.inner.small_h_threshold = 4;
  o.workers = workers;
  return o;
}

bool rollout_consistency(const ro::Scenario& s) {
  const auto t = Clock::now();
  RolloutRuns r;
  r.cr = ro::run_rollout(s, rollout_options(ro::RolloutPolicy::kCr, 1));
  r.rnn = ro::run_rollout(s, rollout_options(ro::RolloutPolicy::kCrRnn, 1));
  r.all = ro::run_rollout(s, rollout_options(ro::RolloutPolicy::kInvestAll, 1));
  const double rel = std::abs(r.rnn.mean_npv - r.cr.mean_npv) / std::abs(r.cr.mean_npv);

  const auto tt = ro::paired_t_test(r.rnn.profit_per_path, r.all.profit_per_path);
  const std::size_t n = r.rnn.profit_per_path.size();
  double mean = 0;
  for (std::size_t i = 0; i < n; ++i) mean += r.rnn.profit_per_path[i] - r.all.profit_per_path[i];
  mean /= static_cast<double>(n);
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dd = r.rnn.profit_per_path[i] - r.all.profit_per_path[i] - mean;
    ss += dd * dd;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double t_hand = sd > 0 ? mean / (sd / std::sqrt(static_cast<double>(n))) : 0.0;
  const bool t_ok = sd > 0 ? std::abs(tt.t - t_hand) <= 1e-9 * std::max(1.0, std::abs(t_hand))
                           : !std::isfinite(tt.t) || tt.t == 0.0;

  const double secs = seconds_since(t);
  const bool ok = rel <= 0.02 && r.rnn.pv_profit >= r.all.pv_profit && t_ok && secs < 1200.0;
  report(12, "rollout consistency", ok,
         fmt("NPV CR %.3f", r.cr.mean_npv) + fmt(" vs CR-RNN %.3f", r.rnn.mean_npv) +
             fmt(" (%.3f %%)", 100 * rel) + fmt("; PV_profit CR-RNN %.4f", r.rnn.pv_profit) +
             fmt(" vs invest-all %.4f", r.all.pv_profit) + fmt("; t %.4f", tt.t) +
             fmt(" (hand %.4f)", t_hand) + fmt("; %.1f s", secs));

  const auto rnn_again = ro::run_rollout(s, rollout_options(ro::RolloutPolicy::kCrRnn, 1));
  const auto rnn_threaded = ro::run_rollout(s, rollout_options(ro::RolloutPolicy::kCrRnn, 4));
  const auto cr_threaded = ro::run_rollout(s, rollout_options(ro::RolloutPolicy::kCr, 4));
  return strip_timing(rnn_again) == strip_timing(r.rnn) &&
         strip_timing(rnn_threaded) == strip_timing(r.rnn) &&
         strip_timing(cr_threaded) == strip_timing(r.cr);
}

}  // namespace

int main() {
  ro::log::set_level(ro::log::Level::kError);
  const auto start = Clock::now();
  enumeration_counts();
  single_option_lattice();
  deterministic_dp();
  worthless_option();
  fixed_point_bisection();
  gradient_check();
  overfit();

  DeskScale desk;
  desk_scale(desk);
  const bool desk_deterministic = desk.cr_times.front() == 1.0;
  learning_trend(desk);

  const auto h5 = ro::generate_synthetic_scenario(7, 5, 3, 50.0);
  const bool rollout_deterministic = rollout_consistency(h5);
  report(13, "determinism", desk_deterministic && rollout_deterministic,
         std::string("H=7 policy reports ") + (desk_deterministic ? "identical" : "DIFFER") +
             ", rollout reports " + (rollout_deterministic ? "identical" : "DIFFER") +
             " across reruns and workers=4 vs 1");

  std::printf("%d of 13 criteria failed (%.1f s)\n", failures, seconds_since(start));
  return std::min(failures, 125);
}
