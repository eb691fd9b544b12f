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

// regionopt command-line tool.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "regionopt/error.hpp"
#include "regionopt/labeling.hpp"
#include "regionopt/log.hpp"
#include "regionopt/lsmc.hpp"
#include "regionopt/neural.hpp"
#include "regionopt/parallel.hpp"
#include "regionopt/policy.hpp"
#include "regionopt/rollout.hpp"
#include "regionopt/scenario.hpp"
#include "regionopt/seeding.hpp"
#include "regionopt/sequences.hpp"
#include "regionopt/stochastic.hpp"

namespace ro = regionopt;
using nlohmann::json;

namespace {

struct Common {
  std::uint64_t seed = 1;
  int workers = 1;
  bool quiet = false;
};

struct ScenarioInput {
  std::string scenario;
  std::size_t paths = 300;
  std::string paths_file;
  int horizon = 0;  // 0 keeps the scenario's horizon
  int basis = 3;
  std::string covered;
};

struct RnnFlags {
  double frac_seq = 0.06;
  double pnr_max = 0.01;
  double thr_fact = 0.1;
  std::size_t k = 50;
  std::size_t small_h = 6;
  std::vector<std::size_t> embedding_sizes{10};
  int epochs = 300;
  int patience = 20;
  double lr = 1e-3;
  std::size_t batch = 32;
  double validation = 0.2;
};

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string id;
  while (std::getline(in, id, ',')) {
    if (!id.empty()) out.push_back(id);
  }
  return out;
}

void write_json(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  ro::require(static_cast<bool>(f), ro::ErrorKind::kIo, "cannot write " + out);
  f << j.dump(2) << '\n';
}

void log_config(const std::string& command, const json& config) {
  ro::log::info(command + " config " + config.dump());
}

json common_json(const Common& c) {
  return {{"seed", c.seed}, {"workers", c.workers}};
}

json input_json(const ScenarioInput& s) {
  return {{"scenario", s.scenario},
          {"paths", s.paths},
          {"paths_file", s.paths_file},
          {"horizon", s.horizon},
          {"basis", s.basis},
          {"covered", split_ids(s.covered)}};
}

json rnn_json(const RnnFlags& r) {
  return {{"frac_seq", r.frac_seq},     {"pnr_max", r.pnr_max},
          {"thr_fact", r.thr_fact},     {"k", r.k},
          {"small_h", r.small_h},       {"embedding_sizes", r.embedding_sizes},
          {"epochs", r.epochs},         {"patience", r.patience},
          {"learning_rate", r.lr},      {"batch", r.batch},
          {"validation_fraction", r.validation}};
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  app->add_option("--workers", c.workers, "Parallel workers (env REGIONOPT_WORKERS)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_flag("--quiet", c.quiet, "Only log warnings and errors");
}

void add_input(CLI::App* app, ScenarioInput& s) {
  app->add_option("--scenario", s.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  app->add_option("--paths", s.paths, "Number of simulated demand paths")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--paths-file", s.paths_file, "Pre-simulated paths (.bin or .csv)")
      ->check(CLI::ExistingFile);
  app->add_option("--horizon", s.horizon, "Horizon t_E in years (steps 1..t_E)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--basis", s.basis, "Regression basis functions J")
      ->capture_default_str()
      ->check(CLI::Range(1, 16));
  app->add_option("--covered", s.covered, "Comma-separated zones already served");
}

void add_rnn(CLI::App* app, RnnFlags& r) {
  app->add_option("--frac-seq", r.frac_seq, "Training sample fraction of H!")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--pnr-max", r.pnr_max, "Max positive-to-negative label ratio")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app->add_option("--thr-fact", r.thr_fact, "Threshold factor below the estimated maximum")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--k", r.k, "Top-K sequences to value")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--small-h", r.small_h, "Use plain CR up to this many candidate zones")
      ->capture_default_str();
  app->add_option("--embedding-sizes", r.embedding_sizes, "Embedding sizes to sweep")
      ->delimiter(',')
      ->capture_default_str();
  app->add_option("--epochs", r.epochs, "Max training epochs")->capture_default_str();
  app->add_option("--patience", r.patience, "Early-stopping patience")->capture_default_str();
  app->add_option("--lr", r.lr, "Adam learning rate")->capture_default_str();
  app->add_option("--batch", r.batch, "Mini-batch size")->capture_default_str();
  app->add_option("--validation", r.validation, "Validation fraction")->capture_default_str();
}

ro::TrainHyper train_hyper(const RnnFlags& r, int workers) {
  ro::TrainHyper h;
  h.embedding_sizes = r.embedding_sizes;
  h.learning_rate = r.lr;
  h.batch_size = r.batch;
  h.max_epochs = r.epochs;
  h.patience = r.patience;
  h.validation_fraction = r.validation;
  h.workers = workers;
  return h;
}

ro::CrRnnHyper cr_rnn_hyper(const RnnFlags& r, std::uint64_t seed, int workers) {
  ro::CrRnnHyper h;
  h.frac_seq = r.frac_seq;
  h.pnr_max = r.pnr_max;
  h.thr_fact = r.thr_fact;
  h.k = r.k;
  h.small_h_threshold = r.small_h;
  h.seed = seed;
  h.rnn = train_hyper(r, workers);
  return h;
}

struct Loaded {
  ro::Scenario scenario;
  ro::DemandPaths paths;
  ro::ValuationOptions valuation;
};

Loaded load_inputs(const ScenarioInput& in, const Common& c) {
  Loaded l;
  l.scenario = ro::load_scenario(in.scenario);
  if (in.horizon > 0) {
    l.scenario.horizon_steps.clear();
    for (int t = 1; t <= in.horizon; ++t) l.scenario.horizon_steps.push_back(t);
  }
  if (!in.paths_file.empty()) {
    const std::filesystem::path f(in.paths_file);
    l.paths = f.extension() == ".csv" ? ro::read_paths_csv(f) : ro::read_paths_binary(f);
    ro::require(l.paths.steps() == l.scenario.horizon_steps.size() &&
                    l.paths.subzones() == l.scenario.subzones.size(),
                ro::ErrorKind::kDimensionMismatch, "paths file does not match the scenario");
  } else {
    l.paths = ro::simulate_paths(l.scenario, in.paths, ro::derive_seed(c.seed, "paths"), c.workers);
  }
  l.valuation.basis_count = in.basis;
  for (const auto& id : split_ids(in.covered)) {
    l.valuation.covered |= ro::ZoneMask{1} << l.scenario.zone_index(id);
  }
  return l;
}

void report_error(const std::string& kind, const std::string& message) {
  json j = {{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-options service-region design: CR and CR-RNN policies"};
  app.require_subcommand(0, 1);
  Common common;
  common.workers = ro::workers_from_env(1);

  // scenario gen
  auto* scenario_cmd = app.add_subcommand("scenario", "Scenario tooling");
  scenario_cmd->require_subcommand(1);
  auto* gen = scenario_cmd->add_subcommand("gen", "Generate a synthetic scenario");
  std::size_t gen_zones = 7, gen_sub = 3;
  double gen_scale = 50.0;
  int gen_horizon = 5;
  std::string gen_out;
  add_common(gen, common);
  gen->add_option("--zones", gen_zones, "Number of zones")->capture_default_str()->check(CLI::Range(1, 64));
  gen->add_option("--subzones-per-zone", gen_sub, "Sub-zones per zone")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--demand-scale", gen_scale, "Demand scale")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--horizon", gen_horizon, "Horizon t_E in years")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "Output scenario JSON")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate GBM demand paths");
  ScenarioInput sim_in;
  std::string sim_out;
  add_common(sim, common);
  add_input(sim, sim_in);
  sim->add_option("--out", sim_out, "Output file (.csv or binary)")->required();

  // valuate
  auto* val = app.add_subcommand("valuate", "Value one investment sequence");
  ScenarioInput val_in;
  std::string val_seq, val_out;
  add_common(val, common);
  add_input(val, val_in);
  val->add_option("--sequence", val_seq, "Comma-separated zone order")->required();
  val->add_option("--out", val_out, "Output JSON (default stdout)");

  // cr
  auto* cr = app.add_subcommand("cr", "Full-enumeration CR policy");
  ScenarioInput cr_in;
  std::string cr_out;
  add_common(cr, common);
  add_input(cr, cr_in);
  cr->add_option("--out", cr_out, "Output report JSON")->required();

  // cr-rnn
  auto* rnn = app.add_subcommand("cr-rnn", "CR policy accelerated by an LSTM ranker");
  ScenarioInput rnn_in;
  RnnFlags rnn_flags;
  std::string rnn_out;
  add_common(rnn, common);
  add_input(rnn, rnn_in);
  add_rnn(rnn, rnn_flags);
  rnn->add_option("--out", rnn_out, "Output report JSON")->required();

  // label
  auto* lab = app.add_subcommand("label", "Sample, value and label sequences");
  ScenarioInput lab_in;
  RnnFlags lab_flags;
  std::string lab_out;
  add_common(lab, common);
  add_input(lab, lab_in);
  add_rnn(lab, lab_flags);
  lab->add_option("--out", lab_out, "Output dataset CSV (JSON sidecar alongside)")->required();

  // train
  auto* trn = app.add_subcommand("train", "Train the LSTM on a labeled dataset");
  RnnFlags trn_flags;
  std::string trn_data, trn_out, trn_head = "classifier";
  add_common(trn, common);
  add_rnn(trn, trn_flags);
  trn->add_option("--data", trn_data, "Labeled dataset CSV")->required()->check(CLI::ExistingFile);
  trn->add_option("--head", trn_head, "classifier or regressor")
      ->capture_default_str()
      ->check(CLI::IsMember({"classifier", "regressor"}));
  trn->add_option("--out", trn_out, "Output checkpoint JSON")->required();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Gap@K and AUC of a checkpoint");
  std::string ev_model, ev_truth, ev_train, ev_out;
  std::vector<std::size_t> ev_k{30, 50, 70};
  add_common(ev, common);
  ev->add_option("--model", ev_model, "Checkpoint JSON")->required()->check(CLI::ExistingFile);
  ev->add_option("--truth", ev_truth, "Ground-truth valuation CSV")->required()->check(CLI::ExistingFile);
  ev->add_option("--train", ev_train, "Training dataset CSV (excluded from the test pool)")
      ->check(CLI::ExistingFile);
  ev->add_option("--k", ev_k, "K values")->delimiter(',')->capture_default_str();
  ev->add_option("--out", ev_out, "Output CSV")->required();

  // rollout
  auto* roll = app.add_subcommand("rollout", "Rolling-horizon service-region design");
  std::string roll_scenario, roll_policy = "cr-rnn", roll_out, roll_covered;
  std::size_t roll_outer = 5, roll_epochs = 5, roll_inner = 300;
  int roll_basis = 3, roll_horizon = 0;
  bool roll_no_bench = false;
  RnnFlags roll_flags;
  add_common(roll, common);
  add_rnn(roll, roll_flags);
  roll->add_option("--scenario", roll_scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  roll->add_option("--policy", roll_policy, "cr, cr-rnn or invest-all")
      ->capture_default_str()
      ->check(CLI::IsMember({"cr", "cr-rnn", "invest-all"}));
  roll->add_option("--outer-paths", roll_outer, "Realized outer paths")->capture_default_str()->check(CLI::PositiveNumber);
  roll->add_option("--rollout-epochs", roll_epochs, "Decision epochs")->capture_default_str()->check(CLI::PositiveNumber);
  roll->add_option("--paths", roll_inner, "Inner paths per epoch")->capture_default_str()->check(CLI::PositiveNumber);
  roll->add_option("--horizon", roll_horizon, "Inner roll period t_E in years")->check(CLI::NonNegativeNumber);
  roll->add_option("--basis", roll_basis, "Regression basis functions J")->capture_default_str()->check(CLI::Range(1, 16));
  roll->add_option("--covered", roll_covered, "Comma-separated zones served before epoch 1");
  roll->add_flag("--no-benchmark", roll_no_bench, "Skip the invest-all benchmark and t-tests");
  roll->add_option("--out", roll_out, "Output report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) report_error("usage", e.what());
    return code == 0 ? 0 : 2;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 2;
  }
  ro::log::set_level(common.quiet ? ro::log::Level::kWarning : ro::log::Level::kInfo);

  try {
    if (gen->parsed()) {
      auto sc = ro::generate_synthetic_scenario(common.seed, gen_zones, gen_sub, gen_scale);
      sc.horizon_steps.clear();
      for (int t = 1; t <= gen_horizon; ++t) sc.horizon_steps.push_back(t);
      log_config("scenario gen", {{"seed", common.seed}, {"zones", gen_zones},
                                  {"subzones_per_zone", gen_sub}, {"demand_scale", gen_scale},
                                  {"horizon", gen_horizon}, {"out", gen_out}});
      ro::save_scenario(sc, gen_out);
    } else if (sim->parsed()) {
      json config = common_json(common);
      config["input"] = input_json(sim_in);
      config["out"] = sim_out;
      log_config("simulate", config);
      const auto l = load_inputs(sim_in, common);
      if (std::filesystem::path(sim_out).extension() == ".csv") {
        ro::write_paths_csv(l.paths, sim_out);
      } else {
        ro::write_paths_binary(l.paths, sim_out);
      }
    } else if (val->parsed()) {
      json config = common_json(common);
      config["input"] = input_json(val_in);
      config["sequence"] = val_seq;
      log_config("valuate", config);
      const auto l = load_inputs(val_in, common);
      const auto seq = ro::parse_sequence(val_seq, l.scenario);
      const ro::SequenceValuator valuator(l.scenario, l.paths, l.valuation);
      const auto v = valuator.valuate(seq);
      json zones = json::array();
      for (std::size_t h = 0; h < seq.size(); ++h) {
        std::vector<int> taus(v.stopping_times.begin() + static_cast<std::ptrdiff_t>(h * v.paths),
                              v.stopping_times.begin() + static_cast<std::ptrdiff_t>((h + 1) * v.paths));
        zones.push_back({{"zone", l.scenario.zones[seq.order[h]]},
                         {"decision_t0", ro::to_string(v.decisions_t0[h])},
                         {"value_t0", v.per_zone_value_t0[h]},
                         {"payoff_t0", v.payoff_t0[h]},
                         {"stopping_times", taus}});
      }
      write_json({{"format", "regionopt.valuation"},
                  {"version", 1},
                  {"sequence", ro::format_sequence(seq, l.scenario)},
                  {"policy_value", v.policy_value},
                  {"regression_degraded", v.regression_degraded},
                  {"never", ro::kNever},
                  {"zones", zones},
                  {"config", config}},
                 val_out);
    } else if (cr->parsed()) {
      json config = common_json(common);
      config["input"] = input_json(cr_in);
      log_config("cr", config);
      const auto l = load_inputs(cr_in, common);
      const ro::SequenceValuator valuator(l.scenario, l.paths, l.valuation);
      const auto r = ro::cr_policy(valuator, ro::candidate_zones(l.scenario, l.valuation.covered),
                                   common.workers);
      ro::write_report(r, cr_out, config);
    } else if (rnn->parsed()) {
      json config = common_json(common);
      config["input"] = input_json(rnn_in);
      config["rnn"] = rnn_json(rnn_flags);
      log_config("cr-rnn", config);
      const auto l = load_inputs(rnn_in, common);
      const ro::SequenceValuator valuator(l.scenario, l.paths, l.valuation);
      const auto r = ro::cr_rnn_policy(valuator,
                                       ro::candidate_zones(l.scenario, l.valuation.covered),
                                       cr_rnn_hyper(rnn_flags, common.seed, common.workers),
                                       common.workers);
      ro::write_report(r, rnn_out, config);
    } else if (lab->parsed()) {
      json config = common_json(common);
      config["input"] = input_json(lab_in);
      config["rnn"] = rnn_json(lab_flags);
      log_config("label", config);
      const auto l = load_inputs(lab_in, common);
      const ro::SequenceValuator valuator(l.scenario, l.paths, l.valuation);
      const auto cands = ro::candidate_zones(l.scenario, l.valuation.covered);
      const auto split = ro::sample_sequences(cands, lab_flags.frac_seq,
                                              ro::derive_seed(common.seed, "sampling"));
      std::vector<ro::ValuedSequence> valued(split.sampled.size());
      ro::parallel_for(valued.size(), common.workers, [&](std::size_t i) {
        valued[i] = {split.sampled[i], valuator.valuate(split.sampled[i]).policy_value};
      });
      auto d = ro::label_dataset(valued, static_cast<double>(ro::factorial(cands.size())),
                                 lab_flags.thr_fact, lab_flags.pnr_max);
      d.vocabulary = l.scenario.zones;
      ro::write_labeled_dataset(d, lab_out);
    } else if (trn->parsed()) {
      json config = common_json(common);
      config["data"] = trn_data;
      config["head"] = trn_head;
      config["rnn"] = rnn_json(trn_flags);
      log_config("train", config);
      const auto d = ro::read_labeled_dataset(trn_data);
      auto h = train_hyper(trn_flags, common.workers);
      h.head = ro::head_kind_from_string(trn_head);
      h.model_seed = ro::derive_seed(common.seed, "model");
      h.batch_seed = ro::derive_seed(common.seed, "batching");
      const auto result = ro::train(d, h);
      ro::save_model(result.model, trn_out);
    } else if (ev->parsed()) {
      json config = common_json(common);
      config["model"] = ev_model;
      config["truth"] = ev_truth;
      config["train"] = ev_train;
      config["k"] = ev_k;
      log_config("evaluate", config);
      const auto model = ro::load_model(ev_model);
      const auto truth = ro::read_labeled_dataset(ev_truth);
      ro::require(truth.vocabulary == model.vocabulary(), ro::ErrorKind::kInvalidArgument,
                  "model and ground truth use different zone vocabularies");
      std::set<ro::Sequence> seen;
      double eta_bin = truth.eta_bin;
      if (!ev_train.empty()) {
        const auto tr = ro::read_labeled_dataset(ev_train);
        seen.insert(tr.sequences.begin(), tr.sequences.end());
        eta_bin = tr.eta_bin;
      }
      std::vector<ro::Sequence> pool;
      std::vector<double> etas;
      for (std::size_t i = 0; i < truth.size(); ++i) {
        if (seen.count(truth.sequences[i])) continue;
        pool.push_back(truth.sequences[i]);
        etas.push_back(truth.etas[i]);
      }
      ro::require(!pool.empty(), ro::ErrorKind::kInvalidArgument, "empty test pool");
      const double eta_true = *std::max_element(etas.begin(), etas.end());
      const auto ranked = ro::score_and_rank(model, pool, pool.size(), common.workers);
      std::vector<double> scores(pool.size());
      for (const auto& s : ranked) scores[s.index] = s.score;
      const auto labels = ro::label_with_threshold(etas, eta_bin);
      const bool both = std::count(labels.begin(), labels.end(), 1) > 0 &&
                        std::count(labels.begin(), labels.end(), 0) > 0;
      const double auc = both ? ro::auc(scores, labels) : std::numeric_limits<double>::quiet_NaN();
      std::ofstream out(ev_out);
      ro::require(static_cast<bool>(out), ro::ErrorKind::kIo, "cannot write " + ev_out);
      out << "k,pool_size,eta_true,eta_pred,gap_percent,auc,eta_bin\n";
      for (std::size_t k : ev_k) {
        const std::size_t kk = std::min(k, ranked.size());
        double eta_pred = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < kk; ++i) eta_pred = std::max(eta_pred, etas[ranked[i].index]);
        out << k << ',' << pool.size() << ',' << eta_true << ',' << eta_pred << ','
            << ro::gap_at_k(eta_true, eta_pred) << ',' << (both ? std::to_string(auc) : "")
            << ',' << eta_bin << '\n';
      }
    } else if (roll->parsed()) {
      json config = common_json(common);
      config["scenario"] = roll_scenario;
      config["policy"] = roll_policy;
      config["outer_paths"] = roll_outer;
      config["rollout_epochs"] = roll_epochs;
      config["paths"] = roll_inner;
      config["horizon"] = roll_horizon;
      config["basis"] = roll_basis;
      config["covered"] = split_ids(roll_covered);
      config["benchmark"] = !roll_no_bench;
      config["rnn"] = rnn_json(roll_flags);
      log_config("rollout", config);
      auto sc = ro::load_scenario(roll_scenario);
      if (roll_horizon > 0) {
        sc.horizon_steps.clear();
        for (int t = 1; t <= roll_horizon; ++t) sc.horizon_steps.push_back(t);
      }
      ro::RolloutOptions opt;
      opt.outer_paths = roll_outer;
      opt.epochs = roll_epochs;
      opt.inner_paths = roll_inner;
      opt.seed = common.seed;
      opt.policy = ro::rollout_policy_from_string(roll_policy);
      opt.inner = cr_rnn_hyper(roll_flags, common.seed, 1);
      opt.valuation.basis_count = roll_basis;
      opt.initial_covered = split_ids(roll_covered);
      opt.workers = common.workers;
      const auto result = ro::run_rollout(sc, opt);
      std::optional<ro::RolloutResult> bench;
      if (!roll_no_bench && opt.policy != ro::RolloutPolicy::kInvestAll) {
        auto bopt = opt;
        bopt.policy = ro::RolloutPolicy::kInvestAll;
        bench = ro::run_rollout(sc, bopt);
      }
      ro::write_rollout_report(result, bench ? &*bench : nullptr, roll_out, config);
    }
  } catch (const ro::Error& e) {
    report_error(std::string(ro::to_string(e.kind())), e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 0;
}
