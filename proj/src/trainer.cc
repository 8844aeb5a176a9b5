// Copyright 2026 The Cner Authors.
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

#include "cner/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cner/errors.h"
#include "cner/rng.h"

namespace cner {
namespace {

// Seed streams derived from TrainingConfig::seed.
constexpr std::uint64_t kShuffleStream = 101;
constexpr std::uint64_t kDropoutStream = 102;

}  // namespace

RmsProp::RmsProp(std::vector<Parameter*> parameters, double learning_rate,
                 double decay, double epsilon)
    : parameters_(std::move(parameters)),
      learning_rate_(learning_rate),
      decay_(decay),
      epsilon_(epsilon) {
  for (const Parameter* p : parameters_) {
    accumulators_.emplace_back(p->value.shape());
    std::vector<bool> frozen(p->value.cols(), false);
    for (std::size_t c : p->frozen_columns) {
      if (c < frozen.size()) frozen[c] = true;
    }
    frozen_.push_back(std::move(frozen));
  }
}

void RmsProp::Step() {
  std::vector<Tensor> next_acc(accumulators_.size());
  std::vector<Tensor> next_value(parameters_.size());
  for (std::size_t k = 0; k < parameters_.size(); ++k) {
    const Parameter& p = *parameters_[k];
    next_acc[k] = accumulators_[k];
    next_value[k] = p.value;
    if (!p.trainable) continue;
    if (p.grad.shape() != p.value.shape()) {
      throw NumericError("gradient of " + p.name + " has the wrong shape");
    }
    const std::size_t cols = p.value.cols();
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      if (frozen_[k][i % cols]) continue;
      const double g = p.grad[i];
      double& acc = next_acc[k][i];
      acc = decay_ * acc + (1.0 - decay_) * g * g;
      next_value[k][i] -= learning_rate_ * g / std::sqrt(acc + epsilon_);
    }
    if (!next_value[k].AllFinite() || !next_acc[k].AllFinite()) {
      throw NumericError("non-finite RMSProp update for parameter " + p.name);
    }
  }
  for (std::size_t k = 0; k < parameters_.size(); ++k) {
    accumulators_[k] = std::move(next_acc[k]);
    parameters_[k]->value = std::move(next_value[k]);
  }
}

EvalReport EvaluateModel(Tagger& model, const Dataset& dataset,
                         const std::set<std::u32string>* training_surfaces,
                         bool constrain_bio) {
  std::vector<std::u32string> sentences;
  sentences.reserve(dataset.size());
  for (const LabeledSentence& s : dataset.samples) sentences.push_back(s.chars);
  const std::vector<Prediction> predictions =
      model.Predict(sentences, constrain_bio);
  std::vector<std::vector<NerLabel>> labels;
  labels.reserve(predictions.size());
  for (const Prediction& p : predictions) labels.push_back(p.labels);
  return Evaluate(dataset, labels, training_surfaces);
}

TrainState Fit(Tagger& model, const Dataset& train, const Dataset& val,
               const TrainingConfig& config, const EpochCallback& on_epoch) {
  config.Validate();
  if (train.empty()) throw InputError("training set is empty");
  if (val.empty()) throw InputError("validation set is empty");

  std::vector<Parameter*> parameters = model.Parameters();
  RmsProp optimizer(parameters, config.learning_rate, config.rms_decay,
                    config.epsilon);
  Rng shuffle_rng(DeriveSeed(config.seed, kShuffleStream));
  const std::uint64_t dropout_seed = DeriveSeed(config.seed, kDropoutStream);

  TrainState state;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t step = 0;
  std::size_t stale_epochs = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.Shuffle(std::span<std::size_t>(order));
    EpochRecord record;
    record.epoch = epoch;
    for (std::size_t first = 0; first < order.size();
         first += config.batch_size) {
      const std::size_t last =
          std::min(order.size(), first + config.batch_size);
      std::vector<const LabeledSentence*> batch;
      for (std::size_t k = first; k < last; ++k) {
        batch.push_back(&train.samples[order[k]]);
      }
      for (Parameter* p : parameters) p->ZeroGrad();
      Tape tape;
      LossOptions options;
      options.lambda = config.lambda;
      options.dropout = config.dropout;
      options.train = true;
      options.seed = DeriveSeed(dropout_seed, step++);
      Var loss = model.JointLoss(tape, batch, options);
      record.train_loss += loss.value().item();
      tape.Backward(loss);
      optimizer.Step();
    }

    EvalReport report = EvaluateModel(model, val, nullptr);
    record.val_fscore = report.fscore();
    record.improved = record.val_fscore > state.best_fscore;
    if (record.improved) {
      state.best_fscore = record.val_fscore;
      state.best_epoch = epoch;
      state.best = model.ToCheckpoint();
      state.best_report = std::move(report);
      stale_epochs = 0;
    } else {
      ++stale_epochs;
    }
    state.epochs_run = epoch;
    state.history.push_back(record);
    if (on_epoch) on_epoch(record);
    if (stale_epochs > config.patience) break;
  }

  model.LoadParameters(state.best);
  state.accumulators = optimizer.accumulators();
  return state;
}

}  // namespace cner
