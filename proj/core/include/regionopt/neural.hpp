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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "regionopt/labeling.hpp"
#include "regionopt/scenario.hpp"
#include "regionopt/sequences.hpp"

namespace regionopt {

enum class HeadKind { kClassifier, kRegressor };

const char* to_string(HeadKind kind);
HeadKind head_kind_from_string(const std::string& name);

struct TrainingMeta {
  std::uint64_t seed = 0;
  int epochs_trained = 0;
  int best_epoch = 0;
  double learning_rate = 0.0;
  std::size_t batch_size = 0;
};

/// Embedding + single-layer LSTM + scalar feed-forward head.
///
/// Parameters live in one flat vector, in this order:
///   embeddings  vocab x psi, row-major (row z is zone z)
///   w_input     4 psi x psi, row-major, gate blocks [forget, input, output, candidate]
///   w_recurrent 4 psi x psi, row-major, same gate blocks
///   gate_bias   4 psi
///   head_weight psi
///   head_bias   1
class LstmModel {
 public:
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MatrixView = Eigen::Map<RowMatrix>;
  using ConstMatrixView = Eigen::Map<const RowMatrix>;
  using VectorView = Eigen::Map<Eigen::VectorXd>;
  using ConstVectorView = Eigen::Map<const Eigen::VectorXd>;

  LstmModel() = default;
  LstmModel(std::vector<ZoneId> vocabulary, std::size_t psi, HeadKind head);

  std::size_t psi() const { return psi_; }
  std::size_t vocab_size() const { return vocabulary_.size(); }
  const std::vector<ZoneId>& vocabulary() const { return vocabulary_; }
  HeadKind head() const { return head_; }

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }
  std::size_t parameter_count() const { return static_cast<std::size_t>(params_.size()); }

  struct Layout {
    std::size_t embeddings, w_input, w_recurrent, gate_bias, head_weight, head_bias, total;
  };
  Layout layout() const { return layout_for(vocab_size(), psi_); }
  static Layout layout_for(std::size_t vocab, std::size_t psi);

  ConstMatrixView embeddings() const;
  ConstMatrixView w_input() const;
  ConstMatrixView w_recurrent() const;
  ConstVectorView gate_bias() const;
  ConstVectorView head_weight() const;
  double head_bias() const;
  MatrixView embeddings();
  MatrixView w_input();
  MatrixView w_recurrent();
  VectorView gate_bias();
  VectorView head_weight();
  double& head_bias();

  double target_mean = 0.0;
  double target_std = 1.0;
  TrainingMeta meta;

 private:
  std::vector<ZoneId> vocabulary_;
  std::size_t psi_ = 0;
  HeadKind head_ = HeadKind::kClassifier;
  Eigen::VectorXd params_;
};

/// Uniform(-1/sqrt(psi), 1/sqrt(psi)) for every parameter, forget-gate bias 1.
LstmModel make_model(std::vector<ZoneId> vocabulary, std::size_t psi, HeadKind head,
                     std::uint64_t seed);

/// Pre-activation output of the head (logit for the classifier).
double forward_logit(const LstmModel& model, const Sequence& sequence);
/// Probability (classifier) or non-negative predicted value (regressor).
double forward(const LstmModel& model, const Sequence& sequence);

struct Example {
  Sequence sequence;
  double target = 0.0;  // label (classifier) or raw value (regressor)
};

/// Mean loss over the batch and its gradient with respect to every parameter.
/// Classifier: binary cross-entropy. Regressor: squared error on normalized
/// targets through the ReLU output.
double loss_and_gradient(const LstmModel& model, std::span<const Example> batch,
                         Eigen::VectorXd* gradient);
double mean_loss(const LstmModel& model, std::span<const Example> batch);

struct TrainHyper {
  std::vector<std::size_t> embedding_sizes{10};
  HeadKind head = HeadKind::kClassifier;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  int max_epochs = 300;
  int patience = 20;
  /// Validation loss must drop by more than this to count as progress.
  double min_delta = 0.0;
  double validation_fraction = 0.2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t model_seed = 0;
  std::uint64_t batch_seed = 0;
  int workers = 1;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainingHistory {
  std::size_t psi = 0;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_validation_loss = 0.0;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  /// One entry per swept embedding size.
  std::vector<std::pair<std::size_t, double>> sweep;
};

struct TrainResult {
  LstmModel model;
  TrainingHistory history;
};

/// Adam with mini-batches and full backpropagation through time. Holds out a
/// stratified validation split, keeps the best-validation checkpoint and
/// stops after `patience` epochs without improvement. With several embedding
/// sizes, the one with the lowest best validation loss is returned.
TrainResult train(const LabeledDataset& dataset, const TrainHyper& hyper);
TrainResult train(const std::vector<Example>& examples, const std::vector<ZoneId>& vocabulary,
                  const TrainHyper& hyper, double target_mean = 0.0, double target_std = 1.0);

struct ScoredSequence {
  std::size_t index = 0;  // position in the candidate list
  Sequence sequence;
  double score = 0.0;
};

/// Top-k candidates by score, descending; equal scores in lexicographic order.
std::vector<ScoredSequence> score_and_rank(const LstmModel& model,
                                           const std::vector<Sequence>& candidates,
                                           std::size_t k, int workers = 1);

/// (eta_true - eta_pred) / eta_true * 100.
double gap_at_k(double eta_true, double eta_pred);

/// Probability that a random positive outscores a random negative, ties 1/2.
double auc(std::span<const double> scores, std::span<const int> labels);

void save_model(const LstmModel& model, const std::filesystem::path& file);
LstmModel load_model(const std::filesystem::path& file);

}  // namespace regionopt
