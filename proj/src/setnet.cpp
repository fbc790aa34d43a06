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

#include "dreamcloud/setnet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "dreamcloud/error.hpp"
#include "dreamcloud/random.hpp"

namespace dreamcloud {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Post-activation matrices of the per-point encoder; acts[0] holds the raw
// coordinates (3 x m).
struct EncoderTrace {
  std::vector<MatrixXd> acts;
  std::vector<Index> argmax;
  VectorXd pooled;
};

// acts[0] is the pooled vector; acts.back() the logits.
struct HeadTrace {
  std::vector<VectorXd> acts;
};

std::vector<int> HeadWidths(const Architecture& arch, std::size_t classes) {
  std::vector<int> widths{arch.encoder.back()};
  widths.insert(widths.end(), arch.head_hidden.begin(), arch.head_hidden.end());
  widths.push_back(static_cast<int>(classes));
  return widths;
}

std::vector<DenseLayer> ZeroLayers(const std::vector<int>& widths) {
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    layers.push_back({MatrixXd::Zero(widths[i + 1], widths[i]),
                      VectorXd::Zero(widths[i + 1])});
  }
  return layers;
}

// Matrix products run on column counts rounded up to a multiple of 8 (zero
// padding). Every real column then goes through the same GEMM micro-kernel,
// so a point's result does not depend on its position.
Index PaddedColumns(Index n) { return (n + 7) / 8 * 8; }

// Fills `t` in place; buffers keep their capacity between calls.
void Encode(const std::vector<DenseLayer>& layers, const PointCloud& x,
            EncoderTrace& t) {
  const Index m = static_cast<Index>(x.size());
  const Index cols = PaddedColumns(m);
  t.acts.resize(layers.size() + 1);
  MatrixXd& input = t.acts[0];
  input.setZero(3, cols);
  for (Index j = 0; j < m; ++j) {
    for (int d = 0; d < 3; ++d) input(d, j) = x[j][d];
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    MatrixXd& out = t.acts[l + 1];
    out.resize(layers[l].weight.rows(), cols);
    out.noalias() = layers[l].weight * t.acts[l];
    out.colwise() += layers[l].bias;
    out = out.cwiseMax(0.0);
  }

  // Strict '>' keeps the lowest index on ties.
  const MatrixXd& top = t.acts.back();
  const Index channels = top.rows();
  t.pooled = top.col(0);
  t.argmax.assign(channels, 0);
  for (Index j = 1; j < m; ++j) {
    for (Index c = 0; c < channels; ++c) {
      if (top(c, j) > t.pooled(c)) {
        t.pooled(c) = top(c, j);
        t.argmax[c] = j;
      }
    }
  }
}

// Per-thread activation buffers; a 1000-point trace is several megabytes.
EncoderTrace& Scratch() {
  thread_local EncoderTrace trace;
  return trace;
}

HeadTrace RunHead(const std::vector<DenseLayer>& layers, const VectorXd& pooled) {
  HeadTrace t;
  t.acts.push_back(pooled);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    VectorXd z = layers[i].weight * t.acts.back() + layers[i].bias;
    if (i + 1 < layers.size()) z = z.cwiseMax(0.0);
    t.acts.push_back(std::move(z));
  }
  return t;
}

// Returns d/d(pooled) given d/d(logits); accumulates parameter gradients when
// `grad` is set.
VectorXd BackwardHead(const std::vector<DenseLayer>& layers, const HeadTrace& t,
                      VectorXd delta, std::vector<DenseLayer>* grad,
                      double weight) {
  for (std::size_t i = layers.size(); i-- > 0;) {
    if (grad) {
      (*grad)[i].weight.noalias() += weight * delta * t.acts[i].transpose();
      (*grad)[i].bias += weight * delta;
    }
    VectorXd prev = layers[i].weight.transpose() * delta;
    if (i > 0) prev = prev.cwiseProduct((t.acts[i].array() > 0.0).cast<double>().matrix());
    delta = std::move(prev);
  }
  return delta;
}

// Pushes d/d(pooled) back through the encoder. Only points that win a pooled
// channel with a positive activation carry gradient, so the backward pass
// runs on that subset. Returns the selected point indices and their input
// gradients (3 x |selected|).
std::pair<std::vector<Index>, MatrixXd> BackwardEncoder(
    const std::vector<DenseLayer>& layers, const EncoderTrace& t,
    const VectorXd& dpooled, std::vector<DenseLayer>* grad, double weight) {
  const Index channels = t.pooled.size();
  std::vector<Index> selected;
  for (Index c = 0; c < channels; ++c) {
    if (t.pooled(c) > 0.0 && dpooled(c) != 0.0) selected.push_back(t.argmax[c]);
  }
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
  const Index s = static_cast<Index>(selected.size());
  if (s == 0) return {selected, MatrixXd(3, 0)};

  auto column_of = [&](Index point) {
    return static_cast<Index>(
        std::lower_bound(selected.begin(), selected.end(), point) -
        selected.begin());
  };
  const Index cols = PaddedColumns(s);
  MatrixXd delta = MatrixXd::Zero(channels, cols);
  for (Index c = 0; c < channels; ++c) {
    if (t.pooled(c) > 0.0 && dpooled(c) != 0.0) {
      delta(c, column_of(t.argmax[c])) += dpooled(c);
    }
  }

  auto gather = [&](const MatrixXd& full) {
    MatrixXd out = MatrixXd::Zero(full.rows(), cols);
    for (Index k = 0; k < s; ++k) out.col(k) = full.col(selected[k]);
    return out;
  };

  for (std::size_t l = layers.size(); l-- > 0;) {
    const MatrixXd below = gather(t.acts[l]);
    if (grad) {
      (*grad)[l].weight.noalias() += weight * delta * below.transpose();
      (*grad)[l].bias += weight * delta.rowwise().sum();
    }
    MatrixXd prev = layers[l].weight.transpose() * delta;
    if (l > 0) prev = prev.cwiseProduct((below.array() > 0.0).cast<double>().matrix());
    delta = std::move(prev);
  }
  return {selected, delta};
}

Logits ToLogits(const VectorXd& z) {
  return Logits{std::vector<double>(z.data(), z.data() + z.size())};
}

// Little-endian binary helpers.
template <typename T>
void Put(std::ostream& out, T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    out.write(bytes.data(), bytes.size());
  } else {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }
}

template <typename T>
T Get(std::istream& in) {
  std::array<char, sizeof(T)> bytes{};
  if (!in.read(bytes.data(), bytes.size())) {
    ThrowIo("truncated model file");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  return std::bit_cast<T>(bytes);
}

std::vector<int> GetWidths(std::istream& in, const char* what) {
  const auto n = Get<std::uint32_t>(in);
  if (n > 64) ThrowIo(std::string("implausible ") + what + " layer count");
  std::vector<int> widths;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto w = Get<std::uint32_t>(in);
    if (w == 0 || w > (1u << 16)) {
      ThrowIo(std::string("shape mismatch: invalid ") + what + " width");
    }
    widths.push_back(static_cast<int>(w));
  }
  return widths;
}

void CheckArchitecture(const Architecture& arch, std::size_t capacity,
                       std::size_t classes) {
  if (arch.encoder.size() < 2 || arch.encoder.front() != 3) {
    ThrowUsage("encoder must start at width 3 and have at least one layer");
  }
  for (int w : arch.encoder) {
    if (w < 1) ThrowUsage("layer widths must be positive");
  }
  for (int w : arch.head_hidden) {
    if (w < 1) ThrowUsage("layer widths must be positive");
  }
  if (capacity < 1) ThrowUsage("capacity must be at least 1");
  if (classes < 2) ThrowUsage("at least 2 classes required");
}

}  // namespace

std::size_t Logits::Argmax() const {
  return static_cast<std::size_t>(
      std::max_element(scores.begin(), scores.end()) - scores.begin());
}

SetNetModel::SetNetModel(std::size_t capacity,
                         std::vector<std::string> class_names,
                         Architecture arch)
    : capacity_(capacity),
      class_names_(std::move(class_names)),
      arch_(std::move(arch)) {
  CheckArchitecture(arch_, capacity_, class_names_.size());
  encoder_ = ZeroLayers(arch_.encoder);
  head_ = ZeroLayers(HeadWidths(arch_, class_names_.size()));
}

SetNetModel SetNetModel::Initialized(std::size_t capacity,
                                     std::vector<std::string> class_names,
                                     Seed seed, Architecture arch) {
  SetNetModel model(capacity, std::move(class_names), std::move(arch));
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto init = [&](std::vector<DenseLayer>& layers) {
    for (DenseLayer& layer : layers) {
      const double stddev = std::sqrt(2.0 / static_cast<double>(layer.weight.cols()));
      for (Index r = 0; r < layer.weight.rows(); ++r) {
        for (Index c = 0; c < layer.weight.cols(); ++c) {
          layer.weight(r, c) = stddev * normal(rng);
        }
      }
    }
  };
  init(model.encoder_);
  init(model.head_);
  return model;
}

std::size_t SetNetModel::ParameterCount() const {
  std::size_t n = 0;
  for (const auto* layers : {&encoder_, &head_}) {
    for (const DenseLayer& l : *layers) n += l.weight.size() + l.bias.size();
  }
  return n;
}

bool SetNetModel::AllFinite() const {
  for (const auto* layers : {&encoder_, &head_}) {
    for (const DenseLayer& l : *layers) {
      if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    }
  }
  return true;
}

void SetNetModel::CheckInput(const PointCloud& x) const {
  if (x.size() != capacity_) {
    ThrowNumeric("capacity mismatch: model takes " + std::to_string(capacity_) +
                 " points, got " + std::to_string(x.size()));
  }
}

Logits SetNetModel::Forward(const PointCloud& x) const {
  CheckInput(x);
  EncoderTrace& enc = Scratch();
  Encode(encoder_, x, enc);
  return ToLogits(RunHead(head_, enc.pooled).acts.back());
}

PointGradient SetNetModel::InputGradient(const PointCloud& x,
                                         std::size_t target) const {
  PointGradient g;
  ForwardWithGradient(x, target, g);
  return g;
}

Logits SetNetModel::ForwardWithGradient(const PointCloud& x, std::size_t target,
                                        PointGradient& gradient) const {
  CheckInput(x);
  if (target >= num_classes()) {
    ThrowUsage("target class " + std::to_string(target) + " out of range");
  }
  EncoderTrace& enc = Scratch();
  Encode(encoder_, x, enc);
  const HeadTrace head = RunHead(head_, enc.pooled);

  VectorXd dz = VectorXd::Zero(static_cast<Index>(num_classes()));
  dz(static_cast<Index>(target)) = 1.0;
  const VectorXd dpooled = BackwardHead(head_, head, dz, nullptr, 0.0);
  const auto [selected, dx] = BackwardEncoder(encoder_, enc, dpooled, nullptr, 0.0);

  gradient.assign(x.size(), Point{0.0, 0.0, 0.0});
  for (std::size_t k = 0; k < selected.size(); ++k) {
    for (int d = 0; d < 3; ++d) {
      gradient[selected[k]][d] = dx(d, static_cast<Index>(k));
    }
  }
  return ToLogits(head.acts.back());
}

ParameterGradient SetNetModel::ZeroGradient() const {
  return {ZeroLayers(arch_.encoder), ZeroLayers(HeadWidths(arch_, num_classes()))};
}

double SetNetModel::LossAndGradient(const PointCloud& x, std::size_t label,
                                    double weight,
                                    ParameterGradient& grad,
                                    std::size_t* predicted) const {
  CheckInput(x);
  if (label >= num_classes()) ThrowUsage("label out of range");
  EncoderTrace& enc = Scratch();
  Encode(encoder_, x, enc);
  const HeadTrace head = RunHead(head_, enc.pooled);
  const VectorXd& z = head.acts.back();
  if (predicted) *predicted = ToLogits(z).Argmax();

  const double zmax = z.maxCoeff();
  const VectorXd e = (z.array() - zmax).exp().matrix();
  const double sum = e.sum();
  const double loss = std::log(sum) + zmax - z(static_cast<Index>(label));

  VectorXd dz = e / sum;
  dz(static_cast<Index>(label)) -= 1.0;
  const VectorXd dpooled = BackwardHead(head_, head, dz, &grad.head, weight);
  BackwardEncoder(encoder_, enc, dpooled, &grad.encoder, weight);
  return loss;
}

std::size_t SetNetModel::ClassIndex(const std::string& name) const {
  const auto it = std::find(class_names_.begin(), class_names_.end(), name);
  if (it == class_names_.end()) ThrowUsage("unknown class '" + name + "'");
  return static_cast<std::size_t>(it - class_names_.begin());
}

void SaveModel(const SetNetModel& model, std::ostream& out) {
  out.write("DCSN", 4);
  Put<std::uint32_t>(out, kModelFormatVersion);
  Put<std::uint64_t>(out, model.capacity());
  const Architecture& arch = model.architecture();
  for (const auto* widths : {&arch.encoder, &arch.head_hidden}) {
    Put<std::uint32_t>(out, static_cast<std::uint32_t>(widths->size()));
    for (int w : *widths) Put<std::uint32_t>(out, static_cast<std::uint32_t>(w));
  }
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(model.num_classes()));
  for (const std::string& name : model.class_names()) {
    Put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  Put<std::uint64_t>(out, model.ParameterCount());
  for (const auto* layers : {&model.encoder(), &model.head()}) {
    for (const DenseLayer& l : *layers) {
      for (Index r = 0; r < l.weight.rows(); ++r) {
        for (Index c = 0; c < l.weight.cols(); ++c) Put<double>(out, l.weight(r, c));
      }
      for (Index r = 0; r < l.bias.size(); ++r) Put<double>(out, l.bias(r));
    }
  }
  if (!out) ThrowIo("failed writing model");
}

void SaveModel(const SetNetModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowIo("cannot open '" + path + "' for writing");
  SaveModel(model, out);
  out.flush();
  if (!out) ThrowIo("failed writing '" + path + "'");
}

SetNetModel LoadModel(std::istream& in) {
  char magic[4] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, "DCSN", 4) != 0) {
    ThrowIo("not a dreamcloud model file");
  }
  const auto version = Get<std::uint32_t>(in);
  if (version != kModelFormatVersion) {
    ThrowIo("unsupported model format version " + std::to_string(version));
  }
  const auto capacity = Get<std::uint64_t>(in);
  Architecture arch;
  arch.encoder = GetWidths(in, "encoder");
  arch.head_hidden = GetWidths(in, "head");
  const auto classes = Get<std::uint32_t>(in);
  if (classes > 4096) ThrowIo("implausible class count");
  std::vector<std::string> names;
  for (std::uint32_t i = 0; i < classes; ++i) {
    const auto len = Get<std::uint32_t>(in);
    if (len > 4096) ThrowIo("implausible class name length");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) ThrowIo("truncated model file");
    names.push_back(std::move(name));
  }

  SetNetModel model;
  try {
    model = SetNetModel(capacity, std::move(names), arch);
  } catch (const Error& e) {
    ThrowIo(std::string("shape mismatch: ") + e.what());
  }
  const auto declared = Get<std::uint64_t>(in);
  if (declared != model.ParameterCount()) {
    ThrowIo("shape mismatch: architecture needs " +
            std::to_string(model.ParameterCount()) + " parameters, file declares " +
            std::to_string(declared));
  }
  for (auto* layers : {&model.encoder(), &model.head()}) {
    for (DenseLayer& l : *layers) {
      for (Index r = 0; r < l.weight.rows(); ++r) {
        for (Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = Get<double>(in);
      }
      for (Index r = 0; r < l.bias.size(); ++r) l.bias(r) = Get<double>(in);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    ThrowIo("shape mismatch: trailing data after parameters");
  }
  if (!model.AllFinite()) ThrowNumeric("model contains non-finite parameters");
  return model;
}

SetNetModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowIo("cannot open '" + path + "' for reading");
  try {
    return LoadModel(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

}  // namespace dreamcloud
