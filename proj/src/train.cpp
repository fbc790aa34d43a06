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

#include "dreamcloud/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dreamcloud/error.hpp"
#include "dreamcloud/random.hpp"

namespace dreamcloud {
namespace {

// Adam state for one parameter block.
struct Moments {
  Eigen::MatrixXd m, v;
};

void AdamStep(Eigen::Ref<Eigen::MatrixXd> param,
              const Eigen::Ref<const Eigen::MatrixXd>& grad,
              Moments& mom, const TrainConfig& cfg, double lr, double bias1,
              double bias2) {
  mom.m = cfg.beta1 * mom.m + (1.0 - cfg.beta1) * grad;
  mom.v = cfg.beta2 * mom.v + (1.0 - cfg.beta2) * grad.cwiseAbs2();
  const double step = lr / bias1;
  param.array() -=
      step * mom.m.array() / ((mom.v.array() / bias2).sqrt() + cfg.epsilon);
}

void CheckDataset(const SetNetModel& model, const SyntheticDataset& data) {
  for (const LabeledCloud& s : data.samples) {
    if (s.cloud.size() != model.capacity()) {
      ThrowNumeric("capacity mismatch: dataset cloud has " +
                   std::to_string(s.cloud.size()) + " points, model takes " +
                   std::to_string(model.capacity()));
    }
    if (s.label >= model.num_classes()) ThrowUsage("dataset label out of range");
  }
}

}  // namespace

double Accuracy(const SetNetModel& model, const SyntheticDataset& data) {
  if (data.samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const LabeledCloud& s : data.samples) {
    if (model.Forward(s.cloud).Argmax() == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.samples.size());
}

TrainResult Train(const SetNetModel& initial, const SyntheticDataset& train_set,
                  const TrainConfig& cfg, const SyntheticDataset* heldout) {
  if (train_set.samples.empty()) ThrowUsage("training set is empty");
  if (cfg.epochs < 0 || cfg.batch_size == 0 || !(cfg.learning_rate > 0.0) ||
      !(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) ||
      !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0) || !(cfg.epsilon > 0.0)) {
    ThrowUsage("invalid training configuration");
  }
  CheckDataset(initial, train_set);
  if (heldout) CheckDataset(initial, *heldout);

  TrainResult result{initial, {}};
  SetNetModel& model = result.model;

  // Flat views over every weight and bias block, encoder first.
  auto blocks = [](auto& layers_a, auto& layers_b) {
    std::vector<Eigen::Ref<Eigen::MatrixXd>> out;
    for (auto* layers : {&layers_a, &layers_b}) {
      for (DenseLayer& l : *layers) {
        out.emplace_back(l.weight);
        out.emplace_back(Eigen::Map<Eigen::MatrixXd>(l.bias.data(), l.bias.size(), 1));
      }
    }
    return out;
  };
  auto params = blocks(model.encoder(), model.head());
  std::vector<Moments> moments;
  for (const auto& p : params) {
    moments.push_back({Eigen::MatrixXd::Zero(p.rows(), p.cols()),
                       Eigen::MatrixXd::Zero(p.rows(), p.cols())});
  }

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(train_set.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  long step = 0;
  const std::size_t batches = (order.size() + cfg.batch_size - 1) / cfg.batch_size;
  const double total = static_cast<double>(batches) * cfg.epochs;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(begin + cfg.batch_size, order.size());
      const double weight = 1.0 / static_cast<double>(end - begin);
      ParameterGradient grad = model.ZeroGradient();
      for (std::size_t i = begin; i < end; ++i) {
        const LabeledCloud& s = train_set.samples[order[i]];
        std::size_t predicted = 0;
        loss_sum += model.LossAndGradient(s.cloud, s.label, weight, grad, &predicted);
        if (predicted == s.label) ++correct;
      }
      const double lr =
          cfg.cosine_decay
              ? cfg.learning_rate * 0.5 *
                    (1.0 + std::cos(std::numbers::pi * static_cast<double>(step) / total))
              : cfg.learning_rate;
      ++step;
      const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      auto grads = blocks(grad.encoder, grad.head);
      for (std::size_t b = 0; b < params.size(); ++b) {
        AdamStep(params[b], grads[b], moments[b], cfg, lr, bias1, bias2);
      }
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum / static_cast<double>(order.size());
    stats.train_accuracy =
        static_cast<double>(correct) / static_cast<double>(order.size());
    if (heldout) stats.heldout_accuracy = Accuracy(model, *heldout);
    if (!std::isfinite(stats.loss) || !model.AllFinite()) {
      ThrowNumeric("training diverged at epoch " + std::to_string(epoch));
    }
    result.trace.push_back(stats);
  }
  return result;
}

}  // namespace dreamcloud
