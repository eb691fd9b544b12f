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

#include "regionopt/neural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "regionopt/error.hpp"
#include "regionopt/log.hpp"
#include "regionopt/parallel.hpp"
#include "regionopt/seeding.hpp"

namespace regionopt {
namespace {

using nlohmann::json;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// Activations of a forward pass over a batch of equal-length sequences,
// kept for backpropagation. Column b belongs to sequence b.
struct Trace {
  std::vector<Eigen::MatrixXd> inputs;     // per step, psi x B
  std::vector<Eigen::MatrixXd> gates;      // per step, 4 psi x B, [f, i, o, g]
  std::vector<Eigen::MatrixXd> cell;       // H + 1 entries, entry 0 is the zero state
  std::vector<Eigen::MatrixXd> hidden;     // H + 1 entries
  std::vector<Eigen::MatrixXd> cell_tanh;  // per step
  Eigen::VectorXd logits;
};

void run(const LstmModel& model, std::span<const Sequence* const> seqs, Trace& tr) {
  const auto psi = static_cast<Eigen::Index>(model.psi());
  const auto B = static_cast<Eigen::Index>(seqs.size());
  const std::size_t H = seqs.front()->size();
  require(H >= 1, ErrorKind::kInvalidArgument, "cannot score an empty sequence");
  tr.inputs.resize(H);
  tr.gates.resize(H);
  tr.cell_tanh.resize(H);
  tr.cell.resize(H + 1);
  tr.hidden.resize(H + 1);
  tr.cell[0].setZero(psi, B);
  tr.hidden[0].setZero(psi, B);
  const auto E = model.embeddings();
  const auto Wx = model.w_input();
  const auto Wh = model.w_recurrent();
  const auto bias = model.gate_bias();
  for (std::size_t t = 0; t < H; ++t) {
    auto& x = tr.inputs[t];
    x.resize(psi, B);
    for (Eigen::Index b = 0; b < B; ++b) {
      const ZoneIndex z = seqs[static_cast<std::size_t>(b)]->order[t];
      require(z < model.vocab_size(), ErrorKind::kInvalidArgument,
              "sequence zone has no embedding");
      x.col(b) = E.row(z).transpose();
    }
    auto& a = tr.gates[t];
    a.noalias() = Wx * x;
    a.noalias() += Wh * tr.hidden[t];
    a.colwise() += bias;
    a.topRows(3 * psi) = (1.0 + (-a.topRows(3 * psi).array()).exp()).inverse();
    a.bottomRows(psi) = a.bottomRows(psi).array().tanh();
    tr.cell[t + 1] = a.middleRows(0, psi).cwiseProduct(tr.cell[t]) +
                     a.middleRows(psi, psi).cwiseProduct(a.middleRows(3 * psi, psi));
    tr.cell_tanh[t] = tr.cell[t + 1].array().tanh();
    tr.hidden[t + 1] = a.middleRows(2 * psi, psi).cwiseProduct(tr.cell_tanh[t]);
  }
  tr.logits.noalias() = tr.hidden[H].transpose() * model.head_weight();
  tr.logits.array() += model.head_bias();
}

// Loss of one example and dLoss/dlogit.
std::pair<double, double> head_loss(const LstmModel& model, double logit, double target) {
  if (model.head() == HeadKind::kClassifier) {
    return {softplus(logit) - target * logit, sigmoid(logit) - target};
  }
  const double s = model.target_std;
  const double mu = model.target_mean;
  const double raw = logit * s + mu;
  const double pred = (std::max(raw, 0.0) - mu) / s;
  const double y = (target - mu) / s;
  const double r = pred - y;
  return {r * r, raw > 0.0 ? 2.0 * r : 0.0};
}

void backprop(const LstmModel& model, std::span<const Sequence* const> seqs, const Trace& tr,
              const Eigen::VectorXd& dlogits, Eigen::VectorXd& grad) {
  const auto psi = static_cast<Eigen::Index>(model.psi());
  const auto B = static_cast<Eigen::Index>(seqs.size());
  const std::size_t H = seqs.front()->size();
  const auto L = model.layout();
  using RowMatrix = LstmModel::RowMatrix;
  Eigen::Map<RowMatrix> dE(grad.data() + L.embeddings,
                           static_cast<Eigen::Index>(model.vocab_size()), psi);
  Eigen::Map<RowMatrix> dWx(grad.data() + L.w_input, 4 * psi, psi);
  Eigen::Map<RowMatrix> dWh(grad.data() + L.w_recurrent, 4 * psi, psi);
  Eigen::Map<Eigen::VectorXd> db(grad.data() + L.gate_bias, 4 * psi);
  Eigen::Map<Eigen::VectorXd> dw(grad.data() + L.head_weight, psi);

  dw.noalias() += tr.hidden[H] * dlogits;
  grad(static_cast<Eigen::Index>(L.head_bias)) += dlogits.sum();

  const auto Wx = model.w_input();
  const auto Wh = model.w_recurrent();
  Eigen::MatrixXd dh = model.head_weight() * dlogits.transpose();
  Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(psi, B);
  Eigen::MatrixXd da(4 * psi, B), dx(psi, B);
  for (std::size_t t = H; t-- > 0;) {
    const auto& gt = tr.gates[t];
    const auto f = gt.middleRows(0, psi).array();
    const auto i = gt.middleRows(psi, psi).array();
    const auto o = gt.middleRows(2 * psi, psi).array();
    const auto g = gt.middleRows(3 * psi, psi).array();
    const auto tc = tr.cell_tanh[t].array();
    dc.array() += dh.array() * o * (1.0 - tc * tc);
    da.middleRows(0, psi).array() = dc.array() * tr.cell[t].array() * f * (1.0 - f);
    da.middleRows(psi, psi).array() = dc.array() * g * i * (1.0 - i);
    da.middleRows(2 * psi, psi).array() = dh.array() * tc * o * (1.0 - o);
    da.middleRows(3 * psi, psi).array() = dc.array() * i * (1.0 - g * g);
    dWx.noalias() += da * tr.inputs[t].transpose();
    dWh.noalias() += da * tr.hidden[t].transpose();
    db += da.rowwise().sum();
    dx.noalias() = Wx.transpose() * da;
    for (Eigen::Index b = 0; b < B; ++b) {
      dE.row(seqs[static_cast<std::size_t>(b)]->order[t]) += dx.col(b).transpose();
    }
    dh.noalias() = Wh.transpose() * da;
    dc.array() *= f;
  }
}

std::vector<Example> to_examples(const LabeledDataset& d, HeadKind head) {
  std::vector<Example> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    out[i].sequence = d.sequences[i];
    out[i].target = head == HeadKind::kClassifier ? d.labels[i] : d.etas[i];
  }
  return out;
}

void shuffle(std::vector<std::size_t>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

TrainResult train_one(const std::vector<Example>& train_set,
                      const std::vector<Example>& validation_set,
                      const std::vector<ZoneId>& vocabulary, std::size_t psi,
                      const TrainHyper& hyper, double target_mean, double target_std) {
  TrainResult result{make_model(vocabulary, psi, hyper.head, stream_seed(hyper.model_seed, {psi})),
                     {}};
  LstmModel& model = result.model;
  model.target_mean = target_mean;
  model.target_std = target_std;
  model.meta.seed = hyper.model_seed;
  model.meta.learning_rate = hyper.learning_rate;
  model.meta.batch_size = hyper.batch_size;

  auto& hist = result.history;
  hist.psi = psi;
  hist.train_size = train_set.size();
  hist.validation_size = validation_set.size();
  const auto& monitor = validation_set.empty() ? train_set : validation_set;

  const Eigen::Index n = model.parameters().size();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n), v = Eigen::VectorXd::Zero(n), grad(n);
  Eigen::VectorXd best = model.parameters();
  hist.best_validation_loss = mean_loss(model, monitor);
  hist.best_epoch = 0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(hyper.batch_seed);
  std::vector<Example> batch;
  batch.reserve(hyper.batch_size);
  long step = 0;
  for (int epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
    shuffle(order, rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t end = std::min(order.size(), start + hyper.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(train_set[order[k]]);
      const double loss = loss_and_gradient(model, batch, &grad);
      if (!std::isfinite(loss) || !grad.allFinite()) {
        model.parameters() = best;
        fail(ErrorKind::kNumerical, "training diverged at epoch " + std::to_string(epoch) +
                                        " (psi " + std::to_string(psi) +
                                        "); best checkpoint restored");
      }
      epoch_loss += loss * static_cast<double>(end - start);
      ++step;
      m = hyper.beta1 * m + (1.0 - hyper.beta1) * grad;
      v = hyper.beta2 * v + (1.0 - hyper.beta2) * grad.cwiseAbs2();
      const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
      model.parameters().array() -=
          hyper.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + hyper.epsilon);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(std::max<std::size_t>(1, order.size()));
    rec.validation_loss = mean_loss(model, monitor);
    hist.epochs.push_back(rec);
    model.meta.epochs_trained = epoch;
    if (rec.validation_loss < hist.best_validation_loss - hyper.min_delta) {
      hist.best_validation_loss = rec.validation_loss;
      hist.best_epoch = epoch;
      best = model.parameters();
    } else if (epoch - hist.best_epoch >= hyper.patience) {
      break;
    }
  }
  model.parameters() = best;
  model.meta.best_epoch = hist.best_epoch;
  return result;
}

}  // namespace

const char* to_string(HeadKind kind) {
  return kind == HeadKind::kClassifier ? "classifier" : "regressor";
}

HeadKind head_kind_from_string(const std::string& name) {
  if (name == "classifier") return HeadKind::kClassifier;
  if (name == "regressor") return HeadKind::kRegressor;
  fail(ErrorKind::kInvalidArgument, "unknown head kind '" + name + "'");
}

LstmModel::Layout LstmModel::layout_for(std::size_t vocab, std::size_t psi) {
  Layout l{};
  l.embeddings = 0;
  l.w_input = vocab * psi;
  l.w_recurrent = l.w_input + 4 * psi * psi;
  l.gate_bias = l.w_recurrent + 4 * psi * psi;
  l.head_weight = l.gate_bias + 4 * psi;
  l.head_bias = l.head_weight + psi;
  l.total = l.head_bias + 1;
  return l;
}

LstmModel::LstmModel(std::vector<ZoneId> vocabulary, std::size_t psi, HeadKind head)
    : vocabulary_(std::move(vocabulary)), psi_(psi), head_(head) {
  require(psi >= 1, ErrorKind::kInvalidArgument, "embedding size must be >= 1");
  require(!vocabulary_.empty(), ErrorKind::kInvalidArgument, "empty zone vocabulary");
  require(std::is_sorted(vocabulary_.begin(), vocabulary_.end()), ErrorKind::kInvalidArgument,
          "zone vocabulary must be sorted");
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout().total));
}

#define REGIONOPT_VIEW(name, Type, off, rows, cols)                                           \
  LstmModel::Type LstmModel::name() {                                                       \
    return Type(params_.data() + layout().off, rows, cols);                                 \
  }
#define REGIONOPT_CVIEW(name, Type, off, rows, cols)                                          \
  LstmModel::Type LstmModel::name() const {                                                 \
    return Type(params_.data() + layout().off, rows, cols);                                 \
  }

namespace {
inline Eigen::Index ix(std::size_t v) { return static_cast<Eigen::Index>(v); }
}  // namespace

REGIONOPT_VIEW(embeddings, MatrixView, embeddings, ix(vocab_size()), ix(psi_))
REGIONOPT_VIEW(w_input, MatrixView, w_input, ix(4 * psi_), ix(psi_))
REGIONOPT_VIEW(w_recurrent, MatrixView, w_recurrent, ix(4 * psi_), ix(psi_))
REGIONOPT_CVIEW(embeddings, ConstMatrixView, embeddings, ix(vocab_size()), ix(psi_))
REGIONOPT_CVIEW(w_input, ConstMatrixView, w_input, ix(4 * psi_), ix(psi_))
REGIONOPT_CVIEW(w_recurrent, ConstMatrixView, w_recurrent, ix(4 * psi_), ix(psi_))
#undef REGIONOPT_VIEW
#undef REGIONOPT_CVIEW

LstmModel::VectorView LstmModel::gate_bias() {
  return VectorView(params_.data() + layout().gate_bias, ix(4 * psi_));
}
LstmModel::ConstVectorView LstmModel::gate_bias() const {
  return ConstVectorView(params_.data() + layout().gate_bias, ix(4 * psi_));
}
LstmModel::VectorView LstmModel::head_weight() {
  return VectorView(params_.data() + layout().head_weight, ix(psi_));
}
LstmModel::ConstVectorView LstmModel::head_weight() const {
  return ConstVectorView(params_.data() + layout().head_weight, ix(psi_));
}
double LstmModel::head_bias() const { return params_(ix(layout().head_bias)); }
double& LstmModel::head_bias() { return params_(ix(layout().head_bias)); }

LstmModel make_model(std::vector<ZoneId> vocabulary, std::size_t psi, HeadKind head,
                     std::uint64_t seed) {
  LstmModel model(std::move(vocabulary), psi, head);
  SplitMix64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(psi));
  std::uniform_real_distribution<double> init(-bound, bound);
  for (auto& p : model.parameters()) p = init(rng);
  model.gate_bias().setZero();
  model.gate_bias().head(ix(psi)).setOnes();
  return model;
}

double forward_logit(const LstmModel& model, const Sequence& sequence) {
  Trace tr;
  const Sequence* one[] = {&sequence};
  run(model, one, tr);
  return tr.logits(0);
}

double forward(const LstmModel& model, const Sequence& sequence) {
  const double l = forward_logit(model, sequence);
  if (model.head() == HeadKind::kClassifier) return sigmoid(l);
  return std::max(0.0, l * model.target_std + model.target_mean);
}

double loss_and_gradient(const LstmModel& model, std::span<const Example> batch,
                         Eigen::VectorXd* gradient) {
  require(!batch.empty(), ErrorKind::kInvalidArgument, "empty batch");
  if (gradient) gradient->setZero(model.parameters().size());
  // Equal-length sequences run together; groups keep first-appearance order.
  std::vector<std::size_t> lengths;
  for (const auto& ex : batch) {
    if (std::find(lengths.begin(), lengths.end(), ex.sequence.size()) == lengths.end()) {
      lengths.push_back(ex.sequence.size());
    }
  }
  Trace tr;
  double total = 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  std::vector<const Sequence*> seqs;
  std::vector<double> targets;
  Eigen::VectorXd dlogits;
  for (std::size_t len : lengths) {
    seqs.clear();
    targets.clear();
    for (const auto& ex : batch) {
      if (ex.sequence.size() != len) continue;
      seqs.push_back(&ex.sequence);
      targets.push_back(ex.target);
    }
    run(model, seqs, tr);
    dlogits.resize(static_cast<Eigen::Index>(seqs.size()));
    for (std::size_t b = 0; b < seqs.size(); ++b) {
      const auto [loss, dl] = head_loss(model, tr.logits(static_cast<Eigen::Index>(b)), targets[b]);
      total += loss;
      dlogits(static_cast<Eigen::Index>(b)) = dl * scale;
    }
    if (gradient) backprop(model, seqs, tr, dlogits, *gradient);
  }
  return total * scale;
}

double mean_loss(const LstmModel& model, std::span<const Example> batch) {
  return loss_and_gradient(model, batch, nullptr);
}

TrainResult train(const std::vector<Example>& examples, const std::vector<ZoneId>& vocabulary,
                  const TrainHyper& hyper, double target_mean, double target_std) {
  require(!hyper.embedding_sizes.empty(), ErrorKind::kInvalidArgument,
          "no embedding size to train");
  require(hyper.batch_size >= 1, ErrorKind::kInvalidArgument, "batch size must be >= 1");
  require(hyper.learning_rate >= 0.0, ErrorKind::kInvalidArgument,
          "learning rate must be >= 0");
  require(hyper.validation_fraction >= 0.0 && hyper.validation_fraction < 1.0,
          ErrorKind::kInvalidArgument, "validation fraction must lie in [0, 1)");
  require(hyper.max_epochs >= 0 && hyper.patience >= 1, ErrorKind::kInvalidArgument,
          "epochs must be >= 0 and patience >= 1");
  if (hyper.head == HeadKind::kClassifier) {
    std::size_t pos = 0;
    for (const auto& e : examples) {
      require(e.target == 0.0 || e.target == 1.0, ErrorKind::kInvalidArgument,
              "classifier targets must be 0 or 1");
      pos += e.target == 1.0;
    }
    require(pos >= 1 && pos < examples.size(), ErrorKind::kInvalidArgument,
            "classifier training needs both classes");
  } else {
    bool distinct = false;
    for (const auto& e : examples) distinct = distinct || e.target != examples.front().target;
    require(distinct, ErrorKind::kInvalidArgument, "regressor training needs distinct targets");
    require(target_std > 0.0, ErrorKind::kInvalidArgument, "target std must be > 0");
  }

  // Stratified hold-out; each stratum keeps at least one training example.
  std::vector<std::vector<std::size_t>> strata(2);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const bool pos = hyper.head == HeadKind::kClassifier && examples[i].target == 1.0;
    strata[pos ? 1 : 0].push_back(i);
  }
  SplitMix64 split_rng(stream_seed(hyper.batch_seed, {0x5b117ULL}));
  std::vector<Example> train_set, validation_set;
  for (auto& s : strata) {
    shuffle(s, split_rng);
    std::size_t n_val = static_cast<std::size_t>(
        std::llround(hyper.validation_fraction * static_cast<double>(s.size())));
    if (n_val >= s.size()) n_val = s.empty() ? 0 : s.size() - 1;
    std::sort(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::sort(s.begin() + static_cast<std::ptrdiff_t>(n_val), s.end());
    for (std::size_t k = 0; k < s.size(); ++k) {
      (k < n_val ? validation_set : train_set).push_back(examples[s[k]]);
    }
  }

  std::vector<TrainResult> runs(hyper.embedding_sizes.size());
  parallel_for(runs.size(), hyper.workers, [&](std::size_t r) {
    runs[r] = train_one(train_set, validation_set, vocabulary, hyper.embedding_sizes[r], hyper,
                        target_mean, target_std);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].history.best_validation_loss < runs[best].history.best_validation_loss) best = r;
  }
  TrainResult out = std::move(runs[best]);
  for (const auto& r : runs) out.history.sweep.emplace_back(r.history.psi, r.history.best_validation_loss);
  log::info("trained psi=" + std::to_string(out.history.psi) + " best epoch " +
            std::to_string(out.history.best_epoch));
  return out;
}

TrainResult train(const LabeledDataset& dataset, const TrainHyper& hyper) {
  return train(to_examples(dataset, hyper.head), dataset.vocabulary, hyper, dataset.target_mean,
               dataset.target_std);
}

std::vector<ScoredSequence> score_and_rank(const LstmModel& model,
                                           const std::vector<Sequence>& candidates,
                                           std::size_t k, int workers) {
  require(k <= candidates.size(), ErrorKind::kInvalidArgument,
          "k exceeds the number of candidates");
  std::vector<ScoredSequence> all(candidates.size());
  parallel_for(candidates.size(), workers, [&](std::size_t i) {
    all[i] = ScoredSequence{i, candidates[i], forward(model, candidates[i])};
  });
  auto better = [](const ScoredSequence& a, const ScoredSequence& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.sequence < b.sequence;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), better);
  all.resize(k);
  return all;
}

double gap_at_k(double eta_true, double eta_pred) {
  require(eta_true > 0.0, ErrorKind::kInvalidArgument, "Gap@K needs a positive true value");
  return (eta_true - eta_pred) / eta_true * 100.0;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  require(scores.size() == labels.size(), ErrorKind::kDimensionMismatch,
          "scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Average ranks over ties, then Mann-Whitney U.
  double rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[idx[k]] == 1) {
        rank_sum += avg;
        ++pos;
      }
    }
    i = j;
  }
  const std::size_t neg = n - pos;
  require(pos > 0 && neg > 0, ErrorKind::kInvalidArgument, "AUC needs both classes");
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

void save_model(const LstmModel& model, const std::filesystem::path& file) {
  const auto params = model.parameters();
  json j = {{"format", "regionopt.lstm"},
            {"version", 1},
            {"psi", model.psi()},
            {"vocabulary", model.vocabulary()},
            {"head_kind", to_string(model.head())},
            {"target_norm", {{"mean", model.target_mean}, {"std", model.target_std}}},
            {"training_meta",
             {{"seed", model.meta.seed},
              {"epochs_trained", model.meta.epochs_trained},
              {"best_epoch", model.meta.best_epoch},
              {"learning_rate", model.meta.learning_rate},
              {"batch_size", model.meta.batch_size}}},
            {"parameter_order",
             {"embeddings", "w_input", "w_recurrent", "gate_bias", "head_weight", "head_bias"}},
            {"gate_order", {"forget", "input", "output", "candidate"}},
            {"parameters", std::vector<double>(params.data(), params.data() + params.size())}};
  std::ofstream out(file);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + file.string());
  out << j.dump() << '\n';
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + file.string());
}

LstmModel load_model(const std::filesystem::path& file) {
  std::ifstream in(file);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot read " + file.string());
  try {
    const json j = json::parse(in);
    require(j.at("format") == "regionopt.lstm", ErrorKind::kParse,
            file.string() + " is not an LSTM checkpoint");
    require(j.at("version").get<int>() == 1, ErrorKind::kParse,
            "unsupported checkpoint version in " + file.string());
    LstmModel model(j.at("vocabulary").get<std::vector<ZoneId>>(), j.at("psi").get<std::size_t>(),
                    head_kind_from_string(j.at("head_kind").get<std::string>()));
    const auto params = j.at("parameters").get<std::vector<double>>();
    require(params.size() == model.parameter_count(), ErrorKind::kDimensionMismatch,
            "checkpoint has " + std::to_string(params.size()) + " parameters, expected " +
                std::to_string(model.parameter_count()));
    model.parameters() = Eigen::Map<const Eigen::VectorXd>(params.data(), ix(params.size()));
    model.target_mean = j.at("target_norm").at("mean").get<double>();
    model.target_std = j.at("target_norm").at("std").get<double>();
    const auto& meta = j.at("training_meta");
    model.meta.seed = meta.at("seed").get<std::uint64_t>();
    model.meta.epochs_trained = meta.at("epochs_trained").get<int>();
    model.meta.best_epoch = meta.value("best_epoch", 0);
    model.meta.learning_rate = meta.at("learning_rate").get<double>();
    model.meta.batch_size = meta.at("batch_size").get<std::size_t>();
    return model;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, file.string() + ": " + e.what());
  }
}

}  // namespace regionopt
