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

#include "regionopt/policy.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>

#include "regionopt/error.hpp"
#include "regionopt/log.hpp"
#include "regionopt/parallel.hpp"
#include "regionopt/seeding.hpp"
#include "text.hpp"

namespace regionopt {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<ZoneId> ids_of(const Scenario& sc, std::span<const ZoneIndex> zones) {
  std::vector<ZoneId> out;
  for (ZoneIndex z : zones) out.push_back(sc.zones[z]);
  return out;
}

struct Valued {
  double eta = 0.0;
  bool degraded = false;
};

std::vector<Valued> valuate_all(const SequenceValuator& valuator,
                                const std::vector<Sequence>& sequences, int workers) {
  std::vector<Valued> out(sequences.size());
  parallel_for(sequences.size(), workers, [&](std::size_t i) {
    const auto v = valuator.valuate(sequences[i]);
    out[i] = Valued{v.policy_value, v.regression_degraded};
  });
  return out;
}

// Index of the highest value; equal values resolve to the smallest sequence.
std::size_t argmax(const std::vector<const Sequence*>& seqs, const std::vector<double>& etas) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < seqs.size(); ++i) {
    if (etas[i] > etas[best] || (etas[i] == etas[best] && *seqs[i] < *seqs[best])) best = i;
  }
  return best;
}

void fill_best(PolicyResult& r, const SequenceValuator& valuator, const Sequence& best) {
  const auto& sc = valuator.scenario();
  const auto v = valuator.valuate(best);
  r.best_sequence = best;
  r.best_value = v.policy_value;
  r.decisions.clear();
  r.npv_deterministic = 0.0;
  for (std::size_t h = 0; h < best.size(); ++h) {
    r.decisions.push_back({sc.zones[best.order[h]], v.decisions_t0[h], v.per_zone_value_t0[h]});
    r.npv_deterministic += v.payoff_t0[h];
  }
  r.option_premium = r.best_value - r.npv_deterministic;
}

void fill_header(PolicyResult& r, const SequenceValuator& valuator,
                 std::span<const ZoneIndex> candidates) {
  const auto& sc = valuator.scenario();
  r.zones = sc.zones;
  r.covered = ids_of(sc, indices_of(valuator.options().covered));
  r.candidates = ids_of(sc, candidates);
  for (ZoneIndex z : candidates) {
    require(!mask_contains(valuator.options().covered, z), ErrorKind::kInvalidArgument,
            "candidate zone " + sc.zones[z] + " is already covered");
  }
  r.population = factorial(candidates.size());
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

const char* to_string(PolicyMode mode) { return mode == PolicyMode::kCr ? "CR" : "CR-RNN"; }

const char* to_string(SequenceRow::Role role) {
  switch (role) {
    case SequenceRow::Role::kEnumerated: return "enumerated";
    case SequenceRow::Role::kSampled: return "sampled";
    case SequenceRow::Role::kTopK: return "top_k";
  }
  return "?";
}

bool operator==(const SequenceRow& a, const SequenceRow& b) {
  const bool scores_equal = (std::isnan(a.score) && std::isnan(b.score)) || a.score == b.score;
  return a.sequence == b.sequence && a.eta == b.eta && a.role == b.role && a.label == b.label &&
         scores_equal;
}

std::vector<ZoneIndex> PolicyResult::invested_now() const {
  std::vector<ZoneIndex> out;
  for (std::size_t h = 0; h < decisions.size(); ++h) {
    if (decisions[h].decision != Decision::kInvest) break;
    out.push_back(best_sequence.order[h]);
  }
  return out;
}

std::vector<ZoneIndex> candidate_zones(const Scenario& scenario, ZoneMask covered) {
  std::vector<ZoneIndex> out;
  for (std::size_t z = 0; z < scenario.zones.size(); ++z) {
    if (!mask_contains(covered, static_cast<ZoneIndex>(z))) out.push_back(static_cast<ZoneIndex>(z));
  }
  return out;
}

PolicyResult cr_policy(const SequenceValuator& valuator, std::span<const ZoneIndex> candidates,
                       int workers) {
  const auto start = Clock::now();
  PolicyResult r;
  r.mode = PolicyMode::kCr;
  fill_header(r, valuator, candidates);
  const auto seqs = enumerate_sequences(candidates);
  const auto vals = valuate_all(valuator, seqs, workers);

  std::vector<const Sequence*> ptrs;
  std::vector<double> etas;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    ptrs.push_back(&seqs[i]);
    etas.push_back(vals[i].eta);
    r.regression_degraded = r.regression_degraded || vals[i].degraded;
    r.rows.push_back({seqs[i], vals[i].eta, SequenceRow::Role::kEnumerated});
  }
  r.evaluated_count = seqs.size();
  fill_best(r, valuator, seqs[argmax(ptrs, etas)]);
  r.wall_time = seconds_since(start);
  return r;
}

PolicyResult cr_policy(const Scenario& scenario, const DemandPaths& paths,
                       const PolicyOptions& options) {
  SequenceValuator valuator(scenario, paths, options.valuation);
  return cr_policy(valuator, candidate_zones(scenario, options.valuation.covered), options.workers);
}

PolicyResult cr_rnn_policy(const SequenceValuator& valuator, std::span<const ZoneIndex> candidates,
                           const CrRnnHyper& hyper, int workers) {
  require(hyper.k >= 1, ErrorKind::kInvalidArgument, "k must be >= 1");
  require(hyper.frac_seq > 0.0 && hyper.frac_seq <= 1.0, ErrorKind::kInvalidArgument,
          "frac_seq must lie in (0, 1]");
  if (candidates.size() <= hyper.small_h_threshold) {
    auto r = cr_policy(valuator, candidates, workers);
    r.fell_back_to_cr = true;
    return r;
  }
  const auto start = Clock::now();
  const auto& sc = valuator.scenario();
  PolicyResult r;
  r.mode = PolicyMode::kCrRnn;
  fill_header(r, valuator, candidates);

  auto split = sample_sequences(candidates, hyper.frac_seq, derive_seed(hyper.seed, "sampling"));
  const auto sampled_vals = valuate_all(valuator, split.sampled, workers);

  std::vector<const Sequence*> ptrs;
  std::vector<double> etas;
  std::vector<ValuedSequence> valued;
  for (std::size_t i = 0; i < split.sampled.size(); ++i) {
    ptrs.push_back(&split.sampled[i]);
    etas.push_back(sampled_vals[i].eta);
    r.regression_degraded = r.regression_degraded || sampled_vals[i].degraded;
    valued.push_back({split.sampled[i], sampled_vals[i].eta});
  }
  r.evaluated_count = split.sampled.size();

  std::vector<ScoredSequence> top;
  if (!split.remaining.empty()) {
    const std::size_t k = std::min(hyper.k, split.remaining.size());
    const bool all_equal = std::all_of(etas.begin(), etas.end(),
                                       [&](double e) { return e == etas.front(); });
    if (split.sampled.size() < 2 || all_equal) {
      log::warning("sampled sequences carry no ranking signal; taking the first k unseen orders");
      for (std::size_t i = 0; i < k; ++i) top.push_back({i, split.remaining[i], 0.0});
    } else {
      auto dataset = label_dataset(valued, static_cast<double>(r.population), hyper.thr_fact,
                                   hyper.pnr_max);
      dataset.vocabulary = sc.zones;
      r.labeling = LabelSummary{dataset.eta_ub,           dataset.eta_thr,
                                dataset.eta_bin,          dataset.positives(),
                                dataset.size(),           dataset.floor_rule_applied,
                                dataset.weibull_fallback};
      std::map<Sequence, int> label_of;
      for (std::size_t i = 0; i < dataset.size(); ++i) label_of[dataset.sequences[i]] = dataset.labels[i];
      TrainHyper th = hyper.rnn;
      th.head = HeadKind::kClassifier;
      th.model_seed = derive_seed(hyper.seed, "model");
      th.batch_seed = derive_seed(hyper.seed, "batching");
      th.workers = workers;
      TrainResult trained;
      try {
        trained = train(dataset, th);
      } catch (const Error& e) {
        fail(e.kind(), std::string("CR-RNN training failed: ") + e.what());
      }
      r.training = TrainSummary{trained.history.psi, trained.history.best_epoch,
                                trained.model.meta.epochs_trained,
                                trained.history.best_validation_loss};
      top = score_and_rank(trained.model, split.remaining, k, workers);
      for (std::size_t i = 0; i < split.sampled.size(); ++i) {
        r.rows.push_back({split.sampled[i], sampled_vals[i].eta, SequenceRow::Role::kSampled,
                          label_of.at(split.sampled[i])});
      }
    }
  }
  if (r.rows.empty()) {
    for (std::size_t i = 0; i < split.sampled.size(); ++i) {
      r.rows.push_back({split.sampled[i], sampled_vals[i].eta, SequenceRow::Role::kSampled});
    }
  }

  std::vector<Sequence> top_seqs;
  for (const auto& t : top) top_seqs.push_back(t.sequence);
  const auto top_vals = valuate_all(valuator, top_seqs, workers);
  for (std::size_t i = 0; i < top.size(); ++i) {
    ptrs.push_back(&top_seqs[i]);
    etas.push_back(top_vals[i].eta);
    r.regression_degraded = r.regression_degraded || top_vals[i].degraded;
    SequenceRow row{top_seqs[i], top_vals[i].eta, SequenceRow::Role::kTopK};
    row.score = top[i].score;
    r.rows.push_back(row);
  }
  r.evaluated_count += top.size();
  fill_best(r, valuator, *ptrs[argmax(ptrs, etas)]);
  r.wall_time = seconds_since(start);
  return r;
}

PolicyResult cr_rnn_policy(const Scenario& scenario, const DemandPaths& paths,
                           const CrRnnHyper& hyper, const PolicyOptions& options) {
  SequenceValuator valuator(scenario, paths, options.valuation);
  return cr_rnn_policy(valuator, candidate_zones(scenario, options.valuation.covered), hyper,
                       options.workers);
}

json report_to_json(const PolicyResult& r) {
  json decisions = json::array();
  for (const auto& d : r.decisions) {
    decisions.push_back({{"zone", d.zone}, {"decision", to_string(d.decision)}, {"value_t0", d.value_t0}});
  }
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"sequence", format_sequence(row.sequence, r.zones)},
                    {"eta", row.eta},
                    {"role", to_string(row.role)},
                    {"label", row.label < 0 ? json(nullptr) : json(row.label)},
                    {"score", number_or_null(row.score)}});
  }
  json j = {{"format", "regionopt.policy_report"},
            {"version", 1},
            {"mode", to_string(r.mode)},
            {"fell_back_to_cr", r.fell_back_to_cr},
            {"zones", r.zones},
            {"covered", r.covered},
            {"candidates", r.candidates},
            {"best_sequence", format_sequence(r.best_sequence, r.zones)},
            {"best_value", r.best_value},
            {"decisions", decisions},
            {"npv_deterministic", r.npv_deterministic},
            {"option_premium", r.option_premium},
            {"evaluated_count", r.evaluated_count},
            {"population", r.population},
            {"skip_fraction", r.population ? 1.0 - static_cast<double>(r.evaluated_count) /
                                                       static_cast<double>(r.population)
                                           : 0.0},
            {"regression_degraded", r.regression_degraded},
            {"labeling", nullptr},
            {"training", nullptr},
            {"sequences", rows},
            {"timing", {{"wall_time_seconds", r.wall_time}}}};
  if (r.labeling) {
    const auto& l = *r.labeling;
    j["labeling"] = {{"eta_ub", l.eta_ub},         {"eta_thr", l.eta_thr},
                     {"eta_bin", l.eta_bin},       {"positives", l.positives},
                     {"size", l.size},             {"floor_rule_applied", l.floor_rule_applied},
                     {"weibull_fallback", l.weibull_fallback}};
  }
  if (r.training) {
    const auto& t = *r.training;
    j["training"] = {{"psi", t.psi},
                     {"best_epoch", t.best_epoch},
                     {"epochs_trained", t.epochs_trained},
                     {"best_validation_loss", t.best_validation_loss}};
  }
  return j;
}

PolicyResult report_from_json(const json& j) {
  try {
    require(j.at("format") == "regionopt.policy_report", ErrorKind::kParse,
            "not a policy report");
    PolicyResult r;
    const auto mode = j.at("mode").get<std::string>();
    require(mode == "CR" || mode == "CR-RNN", ErrorKind::kParse, "unknown mode " + mode);
    r.mode = mode == "CR" ? PolicyMode::kCr : PolicyMode::kCrRnn;
    r.fell_back_to_cr = j.at("fell_back_to_cr").get<bool>();
    r.zones = j.at("zones").get<std::vector<ZoneId>>();
    r.covered = j.at("covered").get<std::vector<ZoneId>>();
    r.candidates = j.at("candidates").get<std::vector<ZoneId>>();
    r.best_sequence = parse_sequence(j.at("best_sequence").get<std::string>(), r.zones);
    r.best_value = j.at("best_value").get<double>();
    for (const auto& d : j.at("decisions")) {
      const auto kind = d.at("decision").get<std::string>();
      r.decisions.push_back({d.at("zone").get<std::string>(),
                             kind == "invest" ? Decision::kInvest : Decision::kDefer,
                             d.at("value_t0").get<double>()});
    }
    r.npv_deterministic = j.at("npv_deterministic").get<double>();
    r.option_premium = j.at("option_premium").get<double>();
    r.evaluated_count = j.at("evaluated_count").get<std::size_t>();
    r.population = j.at("population").get<std::uint64_t>();
    r.regression_degraded = j.at("regression_degraded").get<bool>();
    if (!j.at("labeling").is_null()) {
      const auto& l = j.at("labeling");
      r.labeling = LabelSummary{l.at("eta_ub").get<double>(),      l.at("eta_thr").get<double>(),
                                l.at("eta_bin").get<double>(),     l.at("positives").get<std::size_t>(),
                                l.at("size").get<std::size_t>(),   l.at("floor_rule_applied").get<bool>(),
                                l.at("weibull_fallback").get<bool>()};
    }
    if (!j.at("training").is_null()) {
      const auto& t = j.at("training");
      r.training = TrainSummary{t.at("psi").get<std::size_t>(), t.at("best_epoch").get<int>(),
                                t.at("epochs_trained").get<int>(),
                                t.at("best_validation_loss").get<double>()};
    }
    for (const auto& row : j.at("sequences")) {
      SequenceRow s;
      s.sequence = parse_sequence(row.at("sequence").get<std::string>(), r.zones);
      s.eta = row.at("eta").get<double>();
      const auto role = row.at("role").get<std::string>();
      s.role = role == "sampled"  ? SequenceRow::Role::kSampled
               : role == "top_k" ? SequenceRow::Role::kTopK
                                 : SequenceRow::Role::kEnumerated;
      if (!row.at("label").is_null()) s.label = row.at("label").get<int>();
      if (!row.at("score").is_null()) s.score = row.at("score").get<double>();
      r.rows.push_back(std::move(s));
    }
    r.wall_time = j.at("timing").at("wall_time_seconds").get<double>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("policy report: ") + e.what());
  }
}

void write_sequence_table(const PolicyResult& r, const std::filesystem::path& csv) {
  std::ofstream out(csv);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + csv.string());
  out << "sequence,eta,role,label,score\n";
  for (const auto& row : r.rows) {
    out << text::quote(format_sequence(row.sequence, r.zones)) << ',' << text::format_double(row.eta)
        << ',' << to_string(row.role) << ',' << (row.label < 0 ? "" : std::to_string(row.label)) << ','
        << (std::isfinite(row.score) ? text::format_double(row.score) : "") << '\n';
  }
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + csv.string());
}

void write_report(const PolicyResult& result, const std::filesystem::path& file,
                  const json& config) {
  json j = report_to_json(result);
  j["config"] = config;
  {
    std::ofstream out(file);
    require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + file.string());
    out << j.dump(2) << '\n';
    require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + file.string());
  }
  auto csv = file;
  write_sequence_table(result, csv.replace_extension(".csv"));
}

PolicyResult read_report(const std::filesystem::path& file) {
  std::ifstream in(file);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot read " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, file.string() + ": " + e.what());
  }
  return report_from_json(j);
}

}  // namespace regionopt
