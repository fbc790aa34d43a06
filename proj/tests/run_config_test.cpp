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

#include "doctest.h"
#include "dreamcloud/error.hpp"
#include "dreamcloud/run_config.hpp"
#include "test_util.hpp"

namespace dreamcloud {
namespace {

using nlohmann::json;
using testing::RandomCloud;

const SetNetModel& Model() {
  static const SetNetModel m = SetNetModel::Initialized(
      40, {"cone", "bottle", "cup"}, 2, Architecture{{3, 8, 16}, {8}});
  return m;
}

TEST_CASE("run config defaults") {
  const RunConfig c = ParseRunConfig(json::object());
  CHECK(c.mode == "add");
  CHECK(c.dream.learning_rate == 1.0);
  CHECK(c.dream.iterations == 100);
  CHECK(c.dream.amalgamation_period == 10);
  CHECK_FALSE(c.dream.normalize_gradient);
  CHECK(c.dream.downsample == SampleMethod::kRandom);
  CHECK(c.standardize_input);
  CHECK_FALSE(c.segmentation.has_value());
}

TEST_CASE("run config parses every key and round trips") {
  const json j = json::parse(R"({
    "mode": "pdd", "target": "cone", "learning_rate": 0.5, "iterations": 7,
    "amalgamation_period": 3, "seed": 12, "normalize_gradient": true,
    "downsample": "blue-noise", "threads": 2, "standardize_input": false,
    "segmentation": {"method": "grid", "dims": [2, 1, 3]},
    "targets": ["keep", 1, "random"], "inputs": ["a.xyz"], "model": "m.bin",
    "output": "o.ply", "report": "r.json", "format": "ply"})");
  const RunConfig c = ParseRunConfig(j);
  CHECK(c.mode == "pdd");
  CHECK(c.dream.seed == 12);
  CHECK(c.dream.downsample == SampleMethod::kBlueNoise);
  CHECK(c.targets == std::vector<std::string>{"keep", "1", "random"});
  const auto& grid = std::get<GridSpec>(*c.segmentation);
  CHECK(grid.nz == 3);
  CHECK(ToJson(ParseRunConfig(ToJson(c))) == ToJson(c));
}

TEST_CASE("run config rejects bad input") {
  CHECK_THROWS_AS(ParseRunConfig(json{{"learnin_rate", 1.0}}), Error);
  CHECK_THROWS_AS(ParseRunConfig(json{{"mode", "dream"}}), Error);
  CHECK_THROWS_AS(ParseRunConfig(json{{"iterations", "ten"}}), Error);
  CHECK_THROWS_AS(ParseRunConfig(json{{"learning_rate", -1.0}}), Error);
  CHECK_THROWS_AS(ParseRunConfig(json{{"amalgamation_period", 0}}), Error);
  CHECK_THROWS_AS(ParseRunConfig(json{{"downsample", "uniform-area"}}), Error);
  CHECK_THROWS_AS(ParseRunConfig(json::array()), Error);
}

TEST_CASE("overrides replace keys") {
  const RunConfig c = ParseRunConfig(json{{"seed", 1}, {"iterations", 5}},
                                     json{{"seed", 2}});
  CHECK(c.dream.seed == 2);
  CHECK(c.dream.iterations == 5);
}

TEST_CASE("segmentation specs") {
  const auto km = std::get<KMeansSpec>(ParseSegmentMethod(json{{"method", "kmeans"}, {"k", 3}}));
  CHECK(km.params.k == 3);
  const auto plane = std::get<PlaneSpec>(
      ParseSegmentMethod(json{{"method", "plane"}, {"axis", "y"}, {"offset", 0.25}}));
  CHECK(plane.axis == 1);
  CHECK(plane.offset_fraction == 0.25);
  const auto manual = std::get<ManualSpec>(ParseSegmentMethod(
      json::parse(R"({"method": "manual", "segments": [[0, 2], [1]]})")));
  CHECK(manual.lists.size() == 2);
  for (const json& j : {json{{"method", "kmeans"}, {"k", 2}},
                        json{{"method", "plane"}, {"axis", "x"}, {"offset", 0.5}},
                        json{{"method", "grid"}, {"dims", {1, 2, 3}}}}) {
    CHECK(ToJson(ParseSegmentMethod(j))["method"] == j["method"]);
  }
  CHECK_THROWS_AS(ParseSegmentMethod(json{{"method", "octree"}}), Error);
  CHECK_THROWS_AS(ParseSegmentMethod(json{{"method", "grid"}, {"dims", {1, 2}}}), Error);
  CHECK_THROWS_AS(ParseSegmentMethod(json{{"method", "plane"}, {"axis", "w"}}), Error);
  CHECK_THROWS_AS(ParseSegmentMethod(json{{"method", "kmeans"}, {"kk", 2}}), Error);
}

TEST_CASE("train requests") {
  const TrainRequest r = ParseTrainRequest(json{{"epochs", 3}, {"heldout_fraction", 0.5}});
  CHECK(r.train.epochs == 3);
  CHECK(r.heldout_fraction == 0.5);
  CHECK(ParseTrainRequest(json(nullptr)).train.epochs == 20);
  CHECK_THROWS_AS(ParseTrainRequest(json{{"epoch", 3}}), Error);
}

TEST_CASE("class resolution") {
  CHECK(ResolveClass(Model(), "cup") == 2);
  CHECK(ResolveClass(Model(), "1") == 1);
  CHECK_THROWS_AS(ResolveClass(Model(), "3"), Error);
  CHECK_THROWS_AS(ResolveClass(Model(), "vase"), Error);
  CHECK(ResolveSegmentTarget(Model(), "keep").kind == SegmentTarget::Kind::kKeep);
  CHECK(ResolveSegmentTarget(Model(), "random").kind == SegmentTarget::Kind::kRandom);
}

TEST_CASE("execute add run with report") {
  RunConfig cfg = ParseRunConfig(json{{"target", "cup"}, {"iterations", 4},
                                      {"learning_rate", 0.1}, {"seed", 3}});
  const std::vector<PointCloud> in{RandomCloud(30, 1), RandomCloud(25, 2)};
  const RunOutcome r = ExecuteDream(Model(), in, cfg);
  CHECK(r.cloud.size() == 80);
  CHECK(r.report["format"] == "dreamcloud-report");
  CHECK(r.report["target"]["name"] == "cup");
  CHECK(r.report["subsets"].size() == 2);
  CHECK(r.report["output_count"] == 80);
  CHECK(r.report["sparsity"]["after"]["k"] == 8);
  CHECK(ExecuteDream(Model(), in, cfg).report == r.report);

  // Zero iterations with standardization still returns the input points.
  cfg.dream.iterations = 0;
  const PointCloud single = RandomCloud(40, 7);
  const RunOutcome same = ExecuteDream(Model(), std::span(&single, 1), cfg);
  for (std::size_t i = 0; i < same.cloud.size(); ++i) {
    bool found = false;
    for (const Point& p : single) found |= testing::Dist(p, same.cloud[i]) < 1e-12;
    CHECK(found);
  }
}

TEST_CASE("execute pdd and naive runs") {
  const PointCloud x = RandomCloud(100, 4);
  RunConfig cfg = ParseRunConfig(json::parse(R"({
    "mode": "pdd", "iterations": 2, "learning_rate": 0.1,
    "segmentation": {"method": "plane", "axis": "z", "offset": 0.5},
    "targets": ["cone", "keep"]})"));
  const RunOutcome r = ExecuteDream(Model(), std::span(&x, 1), cfg);
  CHECK(r.report["segments"].size() == 2);
  CHECK(r.report["segments"][1]["kept"] == true);
  cfg.segmentation.reset();
  CHECK_THROWS_AS(ExecuteDream(Model(), std::span(&x, 1), cfg), Error);

  RunConfig naive = ParseRunConfig(json{{"mode", "naive"}, {"target", 0}, {"iterations", 2}});
  CHECK_THROWS_AS(ExecuteDream(Model(), std::span(&x, 1), naive), Error);
  const PointCloud fits = RandomCloud(40, 5);
  CHECK(ExecuteDream(Model(), std::span(&fits, 1), naive).cloud.size() == 40);
}

}  // namespace
}  // namespace dreamcloud
