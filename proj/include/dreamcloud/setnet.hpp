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
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dreamcloud/cloud.hpp"

namespace dreamcloud {

// Layer widths. The per-point encoder starts at 3 (xyz); the head ends at the
// class count, which is not listed here.
struct Architecture {
  std::vector<int> encoder{3, 64, 128, 256};
  std::vector<int> head_hidden{128};

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

struct Logits {
  std::vector<double> scores;

  std::size_t Argmax() const;
};

// Per-point gradient of one logit, aligned with the input points.
using PointGradient = std::vector<Point>;

// Gradient of a scalar with respect to every parameter, shaped like the model.
struct ParameterGradient {
  std::vector<DenseLayer> encoder;
  std::vector<DenseLayer> head;
};

// Permutation-invariant classifier: a shared per-point MLP (affine + ReLU on
// every encoder layer), a channelwise max over points, then an MLP head with
// ReLU between layers and raw logits out.
//
// Max-pool ties resolve to the lowest point index, and ReLU has derivative 0
// at 0, so points that win no pooled channel get exactly zero gradient.
class SetNetModel {
 public:
  SetNetModel() = default;
  // All parameters zero.
  SetNetModel(std::size_t capacity, std::vector<std::string> class_names,
              Architecture arch = {});

  // He-normal weights, zero biases.
  static SetNetModel Initialized(std::size_t capacity,
                                 std::vector<std::string> class_names,
                                 Seed seed, Architecture arch = {});

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t num_classes() const noexcept { return class_names_.size(); }
  const std::vector<std::string>& class_names() const noexcept {
    return class_names_;
  }
  const Architecture& architecture() const noexcept { return arch_; }

  std::vector<DenseLayer>& encoder() noexcept { return encoder_; }
  const std::vector<DenseLayer>& encoder() const noexcept { return encoder_; }
  std::vector<DenseLayer>& head() noexcept { return head_; }
  const std::vector<DenseLayer>& head() const noexcept { return head_; }

  std::size_t ParameterCount() const;
  bool AllFinite() const;

  // Requires |x| == capacity().
  Logits Forward(const PointCloud& x) const;
  // d logit[target] / d x.
  PointGradient InputGradient(const PointCloud& x, std::size_t target) const;
  // Both in one pass.
  Logits ForwardWithGradient(const PointCloud& x, std::size_t target,
                             PointGradient& gradient) const;

  // Softmax cross-entropy against `label`; accumulates (adds) the parameter
  // gradient scaled by `weight` into `grad`. Returns the loss; the argmax
  // class goes to `predicted` when given.
  double LossAndGradient(const PointCloud& x, std::size_t label, double weight,
                         ParameterGradient& grad,
                         std::size_t* predicted = nullptr) const;
  ParameterGradient ZeroGradient() const;

  std::size_t ClassIndex(const std::string& name) const;

 private:
  void CheckInput(const PointCloud& x) const;

  std::size_t capacity_ = 0;
  std::vector<std::string> class_names_;
  Architecture arch_;
  std::vector<DenseLayer> encoder_;
  std::vector<DenseLayer> head_;
};

// Weight file: magic "DCSN", u32 version, u64 capacity, u32 encoder width
// count + u32 widths, u32 head hidden count + u32 widths, u32 class count +
// (u32 length, bytes) names, u64 parameter count, then float64 parameters.
// Layers are stored encoder first then head; each layer is its weight matrix
// in row-major order followed by its bias. All integers and floats are
// little-endian.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void SaveModel(const SetNetModel& model, std::ostream& out);
void SaveModel(const SetNetModel& model, const std::string& path);
SetNetModel LoadModel(std::istream& in);
SetNetModel LoadModel(const std::string& path);

}  // namespace dreamcloud
