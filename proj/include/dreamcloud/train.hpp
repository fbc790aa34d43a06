// Copyright 2026 The DreamCloud Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <vector>

#include "dreamcloud/dataset.hpp"
#include "dreamcloud/setnet.hpp"

namespace dreamcloud {

// Adam on the mean minibatch cross-entropy. With cosine decay the step size
// falls from learning_rate to 0 over the run: lr * (1 + cos(pi * s / S)) / 2
// before update s of S.
struct TrainConfig {
  int epochs = 20;
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  bool cosine_decay = true;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Seed seed = 0;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;            // mean training loss over the epoch
  double train_accuracy = 0.0;  // predictions made before each batch update
  double heldout_accuracy = -1.0;  // -1 when no held-out set was given
};

struct TrainResult {
  SetNetModel model;
  std::vector<EpochStats> trace;
};

// Single-threaded and deterministic for a fixed seed. `model` is copied.
TrainResult Train(const SetNetModel& model, const SyntheticDataset& train_set,
                  const TrainConfig& cfg,
                  const SyntheticDataset* heldout = nullptr);

double Accuracy(const SetNetModel& model, const SyntheticDataset& data);

}  // namespace dreamcloud
