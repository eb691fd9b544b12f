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

#include "regionopt/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "regionopt/error.hpp"
#include "regionopt/log.hpp"
#include "text.hpp"

namespace regionopt {
namespace {

using nlohmann::json;

// Shape-equation residual and derivative for data scaled into (0, 1].
struct ShapeEquation {
  std::span<const double> y;
  double mean_log = 0.0;

  std::pair<double, double> operator()(double k) const {
    double b = 0.0, a = 0.0, c = 0.0;
    for (double v : y) {
      const double l = std::log(v);
      const double w = std::pow(v, k);
      b += w;
      a += w * l;
      c += w * l * l;
    }
    const double r = a / b;
    return {r - 1.0 / k - mean_log, c / b - r * r + 1.0 / (k * k)};
  }
};

}  // namespace

WeibullFit fit_weibull(std::span<const double> values) {
  require(values.size() >= 10, ErrorKind::kInvalidArgument,
          "a Weibull fit needs at least 10 values");
  double hi_x = 0.0, lo_x = values[0];
  for (double v : values) {
    require(std::isfinite(v) && v > 0.0, ErrorKind::kInvalidArgument,
            "Weibull fit needs strictly positive finite values; shift the sample first");
    hi_x = std::max(hi_x, v);
    lo_x = std::min(lo_x, v);
  }
  require(lo_x < hi_x, ErrorKind::kInvalidArgument, "Weibull fit of a constant sample");

  std::vector<double> y(values.size());
  double mean_log = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = values[i] / hi_x;
    mean_log += std::log(y[i]);
  }
  mean_log /= static_cast<double>(y.size());
  const ShapeEquation g{y, mean_log};

  // g is increasing in k, negative near 0 and positive for large k.
  double lo = 1e-3, hi = 1.0;
  while (g(lo).first > 0.0) lo *= 0.5;
  while (g(hi).first < 0.0) {
    hi *= 2.0;
    require(hi < 1e6, ErrorKind::kConvergence, "Weibull shape is unbounded");
  }
  WeibullFit fit;
  double k = std::clamp(1.2 / std::sqrt(std::max(1e-12, -mean_log)), lo, hi);
  for (fit.iterations = 1; fit.iterations <= 200; ++fit.iterations) {
    const auto [r, dr] = g(k);
    fit.residual = r;
    if (std::abs(r) < 1e-13) break;
    (r < 0.0 ? lo : hi) = k;
    double next = k - r / dr;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - k) <= 1e-15 * k) {
      k = next;
      fit.residual = g(k).first;
      break;
    }
    k = next;
  }
  require(std::abs(fit.residual) < 1e-8, ErrorKind::kConvergence,
          "Weibull shape equation did not converge");
  double b = 0.0;
  for (double v : y) b += std::pow(v, k);
  fit.shape = k;
  fit.scale = hi_x * std::pow(b / static_cast<double>(y.size()), 1.0 / k);
  return fit;
}

double eta_upper_bound(const WeibullFit& fit, double population) {
  require(population >= 1.0, ErrorKind::kInvalidArgument, "population size must be >= 1");
  // F(x)^L = 1/2  =>  (x / lambda)^k = -ln(1 - 2^(-1/L)).
  const double tail = -std::expm1(std::log(0.5) / population);
  return fit.scale * std::pow(-std::log(tail), 1.0 / fit.shape);
}

double estimate_eta_ub(std::span<const double> values, double population) {
  return eta_upper_bound(fit_weibull(values), population);
}

std::size_t LabeledDataset::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

void sort_by_value(std::vector<ValuedSequence>& valuations) {
  std::sort(valuations.begin(), valuations.end(),
            [](const ValuedSequence& a, const ValuedSequence& b) {
              if (a.eta != b.eta) return a.eta > b.eta;
              return a.sequence < b.sequence;
            });
}

LabeledDataset label_dataset(std::vector<ValuedSequence> valuations, double population,
                             double thr_fact, double pnr_max) {
  require(valuations.size() >= 2, ErrorKind::kInvalidArgument,
          "labeling needs at least two valuations");
  require(thr_fact >= 0.0 && thr_fact < 1.0, ErrorKind::kInvalidArgument,
          "thr_fact must lie in [0, 1)");
  require(pnr_max >= 0.0, ErrorKind::kInvalidArgument, "pnr_max must be >= 0");
  require(population >= static_cast<double>(valuations.size()), ErrorKind::kInvalidArgument,
          "population smaller than the sample");
  sort_by_value(valuations);

  LabeledDataset d;
  d.population = population;
  d.thr_fact = thr_fact;
  d.pnr_max = pnr_max;
  const std::size_t m = valuations.size();
  for (auto& v : valuations) {
    d.sequences.push_back(std::move(v.sequence));
    d.etas.push_back(v.eta);
  }

  std::vector<double> positive;
  for (double e : d.etas) {
    if (e > 0.0 && std::isfinite(e)) positive.push_back(e);
  }
  try {
    const auto fit = fit_weibull(positive);
    d.weibull_shape = fit.shape;
    d.weibull_scale = fit.scale;
    d.eta_ub = eta_upper_bound(fit, population);
  } catch (const Error& e) {
    d.weibull_fallback = true;
    d.eta_ub = d.etas.front();
    log::warning(std::string("Weibull fit failed, using the sample maximum: ") + e.what());
  }
  d.eta_thr = d.eta_ub * (1.0 - thr_fact);

  std::size_t above = 0;
  while (above < m && d.etas[above] >= d.eta_thr) ++above;
  std::size_t n = 0;
  for (std::size_t c = 1; c <= above && c < m; ++c) {
    if (static_cast<double>(c) <= pnr_max * static_cast<double>(m - c)) n = c;
  }
  // Never split a group of equal values across the cutoff.
  while (n > 0 && n < m && d.etas[n] == d.etas[n - 1]) --n;
  if (n == 0) {
    d.floor_rule_applied = true;
    n = 1;
    while (n < m && d.etas[n] == d.etas[0]) ++n;
    require(n < m, ErrorKind::kInvalidArgument, "all valuations are equal; nothing to separate");
  }
  d.labels.assign(m, 0);
  std::fill(d.labels.begin(), d.labels.begin() + static_cast<std::ptrdiff_t>(n), 1);
  d.eta_bin = d.etas[n - 1];

  double mean = 0.0;
  for (double e : d.etas) mean += e;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double e : d.etas) var += (e - mean) * (e - mean);
  d.target_mean = mean;
  d.target_std = std::sqrt(var / static_cast<double>(m));
  if (!(d.target_std > 0.0)) d.target_std = 1.0;
  return d;
}

std::vector<int> label_with_threshold(std::span<const double> etas, double eta_bin) {
  std::vector<int> out(etas.size());
  for (std::size_t i = 0; i < etas.size(); ++i) out[i] = etas[i] >= eta_bin ? 1 : 0;
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  return p.replace_extension(".json");
}

void write_labeled_dataset(const LabeledDataset& d, const std::filesystem::path& csv) {
  {
    std::ofstream out(csv);
    require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + csv.string());
    out << "sequence,eta,label\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
      out << text::quote(format_sequence(d.sequences[i], d.vocabulary)) << ','
          << text::format_double(d.etas[i]) << ',' << d.labels[i] << '\n';
    }
    require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + csv.string());
  }
  json meta = {{"format", "regionopt.labeled_dataset"},
               {"version", 1},
               {"vocabulary", d.vocabulary},
               {"population", d.population},
               {"thr_fact", d.thr_fact},
               {"pnr_max", d.pnr_max},
               {"eta_ub", d.eta_ub},
               {"eta_thr", d.eta_thr},
               {"eta_bin", d.eta_bin},
               {"weibull_shape", d.weibull_shape},
               {"weibull_scale", d.weibull_scale},
               {"floor_rule_applied", d.floor_rule_applied},
               {"weibull_fallback", d.weibull_fallback},
               {"target_mean", d.target_mean},
               {"target_std", d.target_std},
               {"positives", d.positives()},
               {"size", d.size()}};
  const auto side = sidecar_path(csv);
  std::ofstream out(side);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + side.string());
  out << meta.dump(2) << '\n';
}

LabeledDataset read_labeled_dataset(const std::filesystem::path& csv) {
  LabeledDataset d;
  const auto side = sidecar_path(csv);
  std::ifstream meta_in(side);
  require(static_cast<bool>(meta_in), ErrorKind::kIo, "cannot read " + side.string());
  try {
    const json meta = json::parse(meta_in);
    d.vocabulary = meta.at("vocabulary").get<std::vector<ZoneId>>();
    d.population = meta.at("population").get<double>();
    d.thr_fact = meta.at("thr_fact").get<double>();
    d.pnr_max = meta.at("pnr_max").get<double>();
    d.eta_ub = meta.at("eta_ub").get<double>();
    d.eta_thr = meta.at("eta_thr").get<double>();
    d.eta_bin = meta.at("eta_bin").get<double>();
    d.weibull_shape = meta.value("weibull_shape", 0.0);
    d.weibull_scale = meta.value("weibull_scale", 0.0);
    d.floor_rule_applied = meta.value("floor_rule_applied", false);
    d.weibull_fallback = meta.value("weibull_fallback", false);
    d.target_mean = meta.value("target_mean", 0.0);
    d.target_std = meta.value("target_std", 1.0);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, side.string() + ": " + e.what());
  }
  require(std::is_sorted(d.vocabulary.begin(), d.vocabulary.end()), ErrorKind::kParse,
          "vocabulary must be sorted in " + side.string());

  std::ifstream in(csv);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot read " + csv.string());
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = text::split_csv_line(line);
    require(cells.size() == 3, ErrorKind::kParse, "expected 3 columns in " + csv.string());
    d.sequences.push_back(parse_sequence(cells[0], d.vocabulary));
    d.etas.push_back(text::parse_double(cells[1], csv));
    require(cells[2] == "0" || cells[2] == "1", ErrorKind::kParse,
            "label must be 0 or 1 in " + csv.string());
    d.labels.push_back(cells[2] == "1" ? 1 : 0);
  }
  return d;
}

}  // namespace regionopt
