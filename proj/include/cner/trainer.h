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

// RMSProp and the epoch loop with validation-based early stopping.

#ifndef CNER_TRAINER_H_
#define CNER_TRAINER_H_

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "cner/checkpoint.h"
#include "cner/config.h"
#include "cner/corpus.h"
#include "cner/eval.h"
#include "cner/model.h"
#include "cner/tape.h"

namespace cner {

// acc <- decay * acc + (1 - decay) * g^2
// value <- value - lr * g / sqrt(acc + eps)
// Non-trainable parameters and frozen columns are left untouched.
class RmsProp {
 public:
  RmsProp(std::vector<Parameter*> parameters, double learning_rate,
          double decay, double epsilon);

  // Applies one update from each parameter's grad. Throws NumericError
  // naming the parameter if an updated value is not finite; no parameter
  // is modified in that case.
  void Step();

  const std::vector<Tensor>& accumulators() const { return accumulators_; }

 private:
  std::vector<Parameter*> parameters_;
  std::vector<Tensor> accumulators_;
  std::vector<std::vector<bool>> frozen_;  // per parameter, per column
  double learning_rate_;
  double decay_;
  double epsilon_;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_fscore = 0.0;
  bool improved = false;
};

struct TrainState {
  std::vector<Tensor> accumulators;
  std::size_t epochs_run = 0;
  double best_fscore = -std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  Checkpoint best;
  EvalReport best_report;
  std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Trains with seeded per-epoch shuffling and mini-batches of
// config.batch_size. After each epoch the model is scored on `val` (entity
// F); a strictly better score replaces the best checkpoint. Training stops
// once more than config.patience consecutive epochs fail to improve, or at
// config.max_epochs. On return the model holds the best parameters.
TrainState Fit(Tagger& model, const Dataset& train, const Dataset& val,
               const TrainingConfig& config,
               const EpochCallback& on_epoch = {});

// Predicts NER labels for every sentence of `dataset` and scores them.
EvalReport EvaluateModel(Tagger& model, const Dataset& dataset,
                         const std::set<std::u32string>* training_surfaces,
                         bool constrain_bio = false);

}  // namespace cner

#endif  // CNER_TRAINER_H_
