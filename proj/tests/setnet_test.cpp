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

#include <algorithm>
#include <cstring>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "dreamcloud/error.hpp"
#include "dreamcloud/setnet.hpp"
#include "gradient_check.hpp"
#include "test_util.hpp"

namespace dreamcloud {
namespace {

using testing::RandomCloud;

const std::vector<std::string> kNames{"a", "b", "c", "d"};

SetNetModel SmallModel(std::size_t capacity, Seed seed) {
  return SetNetModel::Initialized(capacity, kNames, seed,
                                  Architecture{{3, 16, 32}, {24}});
}

// Nonzero biases so the bias gradients are exercised away from zero.
SetNetModel WithBiases(SetNetModel m, Seed seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.1);
  for (auto* layers : {&m.encoder(), &m.head()}) {
    for (DenseLayer& l : *layers) {
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = n(rng);
    }
  }
  return m;
}

TEST_CASE("parameter count") {
  const SetNetModel m(10, kNames);
  CHECK(m.ParameterCount() == 3 * 64 + 64 + 64 * 128 + 128 + 128 * 256 + 256 +
                                  256 * 128 + 128 + 128 * 4 + 4);
  CHECK(m.encoder().size() == 3);
  CHECK(m.head().size() == 2);
}

TEST_CASE("zero weights give the bias logits") {
  SetNetModel m(8, kNames);
  m.head().back().bias << 1.0, -2.0, 0.5, 3.0;
  const Logits z = m.Forward(RandomCloud(8, 1));
  CHECK(z.scores == std::vector<double>{1.0, -2.0, 0.5, 3.0});
  CHECK(z.Argmax() == 3);
  for (const Point& g : m.InputGradient(RandomCloud(8, 1), 0)) {
    CHECK(g == Point{0.0, 0.0, 0.0});
  }
}

TEST_CASE("input gradient matches finite differences") {
  for (Seed s = 0; s < 4; ++s) {
    const SetNetModel m = WithBiases(SmallModel(40, s), s);
    const auto tally = testing::CheckInputGradient(m, RandomCloud(40, 100 + s),
                                                   s % 4, 60, s);
    CHECK(tally.checked >= 50);
    CHECK(tally.failed == 0);
    CHECK(tally.worst <= testing::kFdRelTol);
  }
}

TEST_CASE("parameter gradient matches finite differences") {
  for (Seed s = 0; s < 4; ++s) {
    const SetNetModel m = WithBiases(SmallModel(40, s), s);
    const auto tally = testing::CheckParameterGradient(
        m, RandomCloud(40, 200 + s), s % 4, 60, s);
    CHECK(tally.checked >= 50);
    CHECK(tally.failed == 0);
    CHECK(tally.worst <= testing::kFdRelTol);
  }
}

TEST_CASE("gradient accumulates with weight") {
  const SetNetModel m = SmallModel(20, 3);
  const PointCloud x = RandomCloud(20, 4);
  ParameterGradient once = m.ZeroGradient(), twice = m.ZeroGradient();
  m.LossAndGradient(x, 1, 2.0, once);
  m.LossAndGradient(x, 1, 1.0, twice);
  m.LossAndGradient(x, 1, 1.0, twice);
  for (std::size_t l = 0; l < once.encoder.size(); ++l) {
    CHECK((once.encoder[l].weight - twice.encoder[l].weight).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("forward is permutation invariant and gradients are equivariant") {
  const SetNetModel m = WithBiases(SetNetModel::Initialized(200, kNames, 7), 7);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud x = RandomCloud(200, trial);
    const Logits base = m.Forward(x);
    const PointGradient g = m.InputGradient(x, 2);
    std::vector<std::size_t> perm(200);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const PointCloud y = Gather(x, perm);
    CHECK(m.Forward(y).scores == base.scores);
    const PointGradient gy = m.InputGradient(y, 2);
    // Distinct points: the gradient follows its point.
    for (std::size_t i = 0; i < perm.size(); ++i) CHECK(gy[i] == g[perm[i]]);
  }
}

TEST_CASE("permutation results hold for every capacity") {
  std::mt19937_64 rng(6);
  for (std::size_t cap : {1u, 5u, 13u, 53u, 130u}) {
    const SetNetModel m = WithBiases(SetNetModel::Initialized(cap, kNames, cap), cap);
    const PointCloud x = RandomCloud(cap, cap);
    std::vector<std::size_t> perm(cap);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const PointCloud y = Gather(x, perm);
    CHECK(m.Forward(y).scores == m.Forward(x).scores);
    const PointGradient g = m.InputGradient(x, 1), gy = m.InputGradient(y, 1);
    for (std::size_t i = 0; i < cap; ++i) CHECK(gy[i] == g[perm[i]]);
  }
}

TEST_CASE("only pooled winners receive gradient") {
  const SetNetModel m = SetNetModel::Initialized(1000, kNames, 1);
  const PointGradient g = m.InputGradient(RandomCloud(1000, 2), 0);
  const auto nonzero = std::count_if(g.begin(), g.end(), [](const Point& p) {
    return p != Point{0.0, 0.0, 0.0};
  });
  CHECK(nonzero > 0);
  CHECK(nonzero <= 256);
}

TEST_CASE("max-pool ties go to the lowest index") {
  const SetNetModel m = WithBiases(SmallModel(6, 2), 2);
  const Point p{0.3, -0.2, 0.9};
  const PointCloud x({p, {0.1, 0.1, 0.1}, p, {-1, 0, 0}, p, {0, 1, 0}});
  const PointGradient g = m.InputGradient(x, 1);
  CHECK(g[2] == Point{0.0, 0.0, 0.0});
  CHECK(g[4] == Point{0.0, 0.0, 0.0});
}

TEST_CASE("input validation") {
  const SetNetModel m = SmallModel(10, 1);
  auto kind = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return static_cast<int>(e.kind());
    }
    return 0;
  };
  CHECK(kind([&] { m.Forward(RandomCloud(9, 1)); }) == int(ErrorKind::kNumeric));
  CHECK(kind([&] { m.InputGradient(RandomCloud(10, 1), 4); }) == int(ErrorKind::kUsage));
  CHECK(m.ClassIndex("c") == 2);
  CHECK_THROWS_AS(m.ClassIndex("z"), Error);
  CHECK_THROWS_AS(SetNetModel(10, {"only"}), Error);
  CHECK_THROWS_AS(SetNetModel(10, kNames, Architecture{{2, 8}, {}}), Error);
}

TEST_CASE("save and load are bit exact") {
  const SetNetModel m = WithBiases(SmallModel(30, 9), 9);
  std::stringstream s;
  SaveModel(m, s);
  const std::string bytes = s.str();
  std::istringstream in(bytes);
  const SetNetModel back = LoadModel(in);
  CHECK(back.capacity() == 30);
  CHECK(back.class_names() == kNames);
  CHECK(back.architecture() == m.architecture());
  for (std::size_t l = 0; l < m.encoder().size(); ++l) {
    CHECK(back.encoder()[l].weight == m.encoder()[l].weight);
    CHECK(back.encoder()[l].bias == m.encoder()[l].bias);
  }
  for (std::size_t l = 0; l < m.head().size(); ++l) {
    CHECK(back.head()[l].weight == m.head()[l].weight);
    CHECK(back.head()[l].bias == m.head()[l].bias);
  }
  const PointCloud x = RandomCloud(30, 1);
  CHECK(back.Forward(x).scores == m.Forward(x).scores);

  std::stringstream again;
  SaveModel(back, again);
  CHECK(again.str() == bytes);
}

TEST_CASE("damaged model files are rejected") {
  const SetNetModel m = SmallModel(30, 9);
  std::stringstream s;
  SaveModel(m, s);
  const std::string bytes = s.str();
  auto load = [](const std::string& b) {
    std::istringstream in(b);
    try {
      LoadModel(in);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(load(bytes.substr(0, bytes.size() - 5)).find("truncated") != std::string::npos);
  CHECK(load(bytes.substr(0, 30)).find("truncated") != std::string::npos);
  CHECK(load("XXXX" + bytes.substr(4)).find("not a dreamcloud model") != std::string::npos);
  CHECK(load(bytes + "extra").find("shape mismatch") != std::string::npos);

  // Encoder width 16 -> 17 changes the parameter count.
  std::string altered = bytes;
  const std::size_t widths_at = 4 + 4 + 8 + 4;
  std::uint32_t w = 0;
  std::memcpy(&w, altered.data() + widths_at + 4, 4);
  REQUIRE(w == 16);
  w = 17;
  std::memcpy(altered.data() + widths_at + 4, &w, 4);
  CHECK(load(altered).find("shape mismatch") != std::string::npos);

  std::string version = bytes;
  version[4] = 9;
  CHECK(load(version).find("version") != std::string::npos);
}

}  // namespace
}  // namespace dreamcloud
