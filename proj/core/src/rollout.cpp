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

#include "regionopt/rollout.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "regionopt/error.hpp"
#include "regionopt/log.hpp"
#include "regionopt/parallel.hpp"
#include "regionopt/ridership.hpp"
#include "regionopt/seeding.hpp"
#include "regionopt/stochastic.hpp"
#include "text.hpp"

namespace regionopt {
namespace {

using nlohmann::json;

// Two-sided Student t critical values; rows df = 1..30, then 40, 60, 120, inf.
constexpr std::array<double, 34> kT05 = {
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179,
    2.160,  2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
    2.060,  2.056, 2.052, 2.048, 2.045, 2.042, 2.021, 2.000, 1.980, 1.960};
constexpr std::array<double, 34> kT01 = {
    63.657, 9.925, 5.841, 4.604, 4.032, 3.707, 3.499, 3.355, 3.250, 3.169, 3.106, 3.055,
    3.012,  2.977, 2.947, 2.921, 2.898, 2.878, 2.861, 2.845, 2.831, 2.819, 2.807, 2.797,
    2.787,  2.779, 2.771, 2.763, 2.756, 2.750, 2.704, 2.660, 2.617, 2.576};
constexpr std::array<double, 34> kT001 = {
    636.619, 31.599, 12.924, 8.610, 6.869, 5.959, 5.408, 5.041, 4.781, 4.587, 4.437, 4.318,
    4.221,   4.140,  4.073,  4.015, 3.965, 3.922, 3.883, 3.850, 3.819, 3.792, 3.768, 3.745,
    3.725,   3.707,  3.690,  3.674, 3.659, 3.646, 3.551, 3.460, 3.373, 3.291};

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

std::string join(const std::vector<ZoneId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? "," : "") + ids[i];
  return out;
}

}  // namespace

const char* to_string(RolloutPolicy policy) {
  switch (policy) {
    case RolloutPolicy::kCr: return "CR";
    case RolloutPolicy::kCrRnn: return "CR-RNN";
    case RolloutPolicy::kInvestAll: return "invest-all";
  }
  return "?";
}

RolloutPolicy rollout_policy_from_string(const std::string& name) {
  if (name == "CR" || name == "cr") return RolloutPolicy::kCr;
  if (name == "CR-RNN" || name == "cr-rnn") return RolloutPolicy::kCrRnn;
  if (name == "invest-all") return RolloutPolicy::kInvestAll;
  fail(ErrorKind::kInvalidArgument, "unknown rollout policy '" + name + "'");
}

RolloutResult run_rollout(const Scenario& scenario, const RolloutOptions& options) {
  require(options.outer_paths >= 1, ErrorKind::kInvalidArgument, "need at least one outer path");
  require(options.epochs >= 1, ErrorKind::kInvalidArgument, "need at least one epoch");
  require(options.inner_paths >= 1, ErrorKind::kInvalidArgument, "need at least one inner path");
  const auto start = std::chrono::steady_clock::now();
  const Scenario& sc = scenario;

  Scenario outer_sc = sc;
  outer_sc.horizon_steps.clear();
  for (std::size_t e = 1; e <= options.epochs; ++e) outer_sc.horizon_steps.push_back(static_cast<double>(e));
  const DemandPaths outer =
      simulate_paths(outer_sc, options.outer_paths, derive_seed(options.seed, "outer"), options.workers);

  ZoneMask initial = 0;
  for (const auto& id : options.initial_covered) initial |= ZoneMask{1} << sc.zone_index(id);
  const auto n_init = static_cast<std::size_t>(std::popcount(initial));
  const std::uint64_t inner_seed = derive_seed(options.seed, "inner");
  const std::uint64_t policy_seed = derive_seed(options.seed, "policy");

  RolloutResult res;
  res.policy = options.policy;
  res.zones = sc.zones;
  res.outer_paths = options.outer_paths;
  res.epochs = options.epochs;
  res.records.resize(options.outer_paths * options.epochs);
  res.npv_per_path.assign(options.outer_paths, 0.0);
  res.profit_per_path.assign(options.outer_paths, 0.0);

  parallel_for(options.outer_paths, options.workers, [&](std::size_t p) {
    ZoneMask covered = initial;
    std::vector<ZoneIndex> order;
    for (std::size_t e = 1; e <= options.epochs; ++e) {
      RolloutEpoch& rec = res.records[p * options.epochs + e - 1];
      rec.path = p;
      rec.epoch = e;
      const Eigen::MatrixXd demand = outer.matrix_copy(p, e - 1);
      const auto candidates = candidate_zones(sc, covered);
      std::vector<ZoneIndex> invest;
      if (options.policy == RolloutPolicy::kInvestAll) {
        if (e == 1) invest = candidates;
      } else if (!candidates.empty()) {
        try {
          Scenario inner_sc = sc;
          inner_sc.base_demand = demand;
          const DemandPaths inner =
              simulate_paths(inner_sc, options.inner_paths, stream_seed(inner_seed, {p, e}), 1);
          ValuationOptions vo = options.valuation;
          vo.covered = covered;
          const SequenceValuator valuator(inner_sc, inner, vo);
          PolicyResult pr;
          if (options.policy == RolloutPolicy::kCr) {
            pr = cr_policy(valuator, candidates, 1);
          } else {
            CrRnnHyper hyper = options.inner;
            hyper.seed = stream_seed(policy_seed, {p, e});
            pr = cr_rnn_policy(valuator, candidates, hyper, 1);
          }
          invest = pr.invested_now();
          rec.best_value = pr.best_value;
          rec.evaluated = pr.evaluated_count;
        } catch (const Error& err) {
          fail(err.kind(), "rollout path " + std::to_string(p) + " epoch " + std::to_string(e) +
                               ": " + err.what());
        }
      }
      for (ZoneIndex z : invest) {
        covered |= ZoneMask{1} << z;
        order.push_back(z);
        rec.invested.push_back(sc.zones[z]);
      }
      for (ZoneIndex z : order) rec.covered.push_back(sc.zones[z]);
      if (!order.empty()) {
        rec.ridership = cumulative_ridership(covered, demand, sc, 0, options.valuation.ridership) -
                        cumulative_ridership(initial, demand, sc, 0, options.valuation.ridership);
        double cost = 0.0;
        for (std::size_t pos = 1; pos <= order.size(); ++pos) cost -= zone_payoff(pos, 0.0, sc, n_init);
        rec.payoff = rec.ridership - cost;
      }
      const double d = std::pow(1.0 + sc.discount_rate, -static_cast<double>(e));
      res.npv_per_path[p] += d * rec.payoff;
      if (rec.ridership != 0.0) res.profit_per_path[p] += d * rec.payoff / rec.ridership;
    }
  });

  for (std::size_t p = 0; p < options.outer_paths; ++p) {
    res.mean_npv += res.npv_per_path[p];
    res.pv_profit += res.profit_per_path[p];
  }
  res.mean_npv /= static_cast<double>(options.outer_paths);
  res.pv_profit /= static_cast<double>(options.outer_paths);
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

double t_critical(std::size_t df, double alpha) {
  require(df >= 1, ErrorKind::kInvalidArgument, "degrees of freedom must be >= 1");
  const std::array<double, 34>* table = nullptr;
  if (alpha == 0.05) table = &kT05;
  if (alpha == 0.01) table = &kT01;
  if (alpha == 0.001) table = &kT001;
  require(table != nullptr, ErrorKind::kInvalidArgument,
          "alpha must be one of 0.05, 0.01, 0.001");
  if (df <= 30) return (*table)[df - 1];
  if (df < 40) return (*table)[29];
  if (df < 60) return (*table)[30];
  if (df < 120) return (*table)[31];
  return (*table)[32];
}

PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
  require(a.size() == b.size(), ErrorKind::kDimensionMismatch, "paired samples differ in length");
  require(a.size() >= 2, ErrorKind::kInvalidArgument, "paired t-test needs at least two pairs");
  PairedTTest r;
  r.n = a.size();
  r.df = r.n - 1;
  r.alpha = alpha;
  r.critical = t_critical(r.df, alpha);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.n; ++i) sum += a[i] - b[i];
  r.mean_diff = sum / static_cast<double>(r.n);
  double ss = 0.0;
  for (std::size_t i = 0; i < r.n; ++i) {
    const double d = a[i] - b[i] - r.mean_diff;
    ss += d * d;
  }
  r.sd_diff = std::sqrt(ss / static_cast<double>(r.df));
  const double se = r.sd_diff / std::sqrt(static_cast<double>(r.n));
  if (se > 0.0) {
    r.t = r.mean_diff / se;
  } else if (r.mean_diff != 0.0) {
    r.t = std::copysign(std::numeric_limits<double>::infinity(), r.mean_diff);
  } else {
    r.t = 0.0;
  }
  r.significant = std::abs(r.t) >= r.critical;
  const double half = t_critical(r.df, 0.05) * se;
  r.ci_low = r.mean_diff - half;
  r.ci_high = r.mean_diff + half;
  return r;
}

json t_test_to_json(const PairedTTest& t) {
  json sig = json::object();
  for (double a : {0.05, 0.01, 0.001}) {
    sig[text::format_double(a)] = std::abs(t.t) >= t_critical(t.df, a);
  }
  return {{"n", t.n},
          {"df", t.df},
          {"mean_diff", t.mean_diff},
          {"sd_diff", t.sd_diff},
          {"t", finite_or_string(t.t)},
          {"alpha", t.alpha},
          {"critical", t.critical},
          {"ci95", {t.ci_low, t.ci_high}},
          {"significant", t.significant},
          {"significant_at", sig}};
}

json rollout_to_json(const RolloutResult& r) {
  json records = json::array();
  for (const auto& rec : r.records) {
    records.push_back({{"path", rec.path},
                       {"epoch", rec.epoch},
                       {"invested", rec.invested},
                       {"covered", rec.covered},
                       {"ridership", rec.ridership},
                       {"payoff", rec.payoff},
                       {"best_value", rec.best_value},
                       {"evaluated", rec.evaluated}});
  }
  return {{"policy", to_string(r.policy)},
          {"zones", r.zones},
          {"outer_paths", r.outer_paths},
          {"epochs", r.epochs},
          {"records", records},
          {"npv_per_path", r.npv_per_path},
          {"profit_per_path", r.profit_per_path},
          {"mean_npv", r.mean_npv},
          {"pv_profit", r.pv_profit},
          {"timing", {{"wall_time_seconds", r.wall_time}}}};
}

RolloutResult rollout_from_json(const json& j) {
  try {
    RolloutResult r;
    r.policy = rollout_policy_from_string(j.at("policy").get<std::string>());
    r.zones = j.at("zones").get<std::vector<ZoneId>>();
    r.outer_paths = j.at("outer_paths").get<std::size_t>();
    r.epochs = j.at("epochs").get<std::size_t>();
    for (const auto& rec : j.at("records")) {
      RolloutEpoch e;
      e.path = rec.at("path").get<std::size_t>();
      e.epoch = rec.at("epoch").get<std::size_t>();
      e.invested = rec.at("invested").get<std::vector<ZoneId>>();
      e.covered = rec.at("covered").get<std::vector<ZoneId>>();
      e.ridership = number_from(rec.at("ridership"));
      e.payoff = number_from(rec.at("payoff"));
      e.best_value = number_from(rec.at("best_value"));
      e.evaluated = rec.at("evaluated").get<std::size_t>();
      r.records.push_back(std::move(e));
    }
    r.npv_per_path = j.at("npv_per_path").get<std::vector<double>>();
    r.profit_per_path = j.at("profit_per_path").get<std::vector<double>>();
    r.mean_npv = j.at("mean_npv").get<double>();
    r.pv_profit = j.at("pv_profit").get<double>();
    r.wall_time = j.at("timing").at("wall_time_seconds").get<double>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("rollout report: ") + e.what());
  }
}

void write_rollout_table(const RolloutResult& r, const std::filesystem::path& csv) {
  std::ofstream out(csv);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + csv.string());
  out << "policy,path,epoch,invested,covered,ridership,payoff,best_value,evaluated\n";
  for (const auto& rec : r.records) {
    out << to_string(r.policy) << ',' << rec.path << ',' << rec.epoch << ','
        << text::quote(join(rec.invested)) << ',' << text::quote(join(rec.covered)) << ','
        << text::format_double(rec.ridership) << ',' << text::format_double(rec.payoff) << ','
        << text::format_double(rec.best_value) << ',' << rec.evaluated << '\n';
  }
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + csv.string());
}

void write_rollout_report(const RolloutResult& policy, const RolloutResult* benchmark,
                          const std::filesystem::path& file, const json& config) {
  json j = {{"format", "regionopt.rollout_report"},
            {"version", 1},
            {"policy", rollout_to_json(policy)},
            {"benchmark", nullptr},
            {"comparison", nullptr},
            {"config", config}};
  if (benchmark) {
    j["benchmark"] = rollout_to_json(*benchmark);
    if (policy.outer_paths >= 2 && benchmark->outer_paths == policy.outer_paths) {
      j["comparison"] = {
          {"profitability", t_test_to_json(paired_t_test(policy.profit_per_path,
                                                         benchmark->profit_per_path))},
          {"npv", t_test_to_json(paired_t_test(policy.npv_per_path, benchmark->npv_per_path))}};
    }
  }
  {
    std::ofstream out(file);
    require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + file.string());
    out << j.dump(2) << '\n';
    require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + file.string());
  }
  auto csv = file;
  csv.replace_extension(".csv");
  write_rollout_table(policy, csv);
  if (benchmark) {
    auto bench_csv = file;
    bench_csv.replace_extension(".benchmark.csv");
    write_rollout_table(*benchmark, bench_csv);
  }
}

}  // namespace regionopt
