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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "dreamcloud/dream.hpp"
#include "dreamcloud/segment.hpp"
#include "dreamcloud/setnet.hpp"
#include "dreamcloud/train.hpp"

namespace dreamcloud {

// Declarative dream run. JSON keys match the member names; unknown keys are
// rejected. Targets are class names or indices; PDD targets may also be
// "keep" or "random".
struct RunConfig {
  std::string mode = "add";  // naive | add | pdd
  std::string target;        // naive/add, and the pdd fallback target
  DreamConfig dream;
  bool standardize_input = true;  // naive/add only; pdd standardizes segments
  std::optional<SegmentMethod> segmentation;
  std::vector<std::string> targets;
  std::vector<std::string> inputs;
  std::string model;
  std::string output;
  std::string report;
  std::string format;
};

RunConfig ParseRunConfig(const nlohmann::json& j);
// Merges `overrides` onto `base` key by key, then parses.
RunConfig ParseRunConfig(const nlohmann::json& base,
                         const nlohmann::json& overrides);
nlohmann::json ToJson(const RunConfig& cfg);

// {"method": "kmeans", "k": 4, "max_iters": 100, "tol": 1e-6, "restarts": 5,
//  "seed": 0} | {"method": "plane", "axis": "z", "offset": 0.5} |
// {"method": "grid", "dims": [3, 3, 2]} |
// {"method": "manual", "segments": [[0, 1], [2]]}
SegmentMethod ParseSegmentMethod(const nlohmann::json& j);
nlohmann::json ToJson(const SegmentMethod& method);

// Training run: TrainConfig keys plus "heldout_fraction".
struct TrainRequest {
  TrainConfig train;
  double heldout_fraction = 0.2;
};
TrainRequest ParseTrainRequest(const nlohmann::json& j);
nlohmann::json ToJson(const TrainRequest& req);

struct TrainOutcome {
  TrainResult result;
  nlohmann::json metrics;
};
// Splits `data`, initializes a model from the request seed, trains it and
// reports the per-epoch trace.
TrainOutcome TrainOnDataset(const SyntheticDataset& data, std::size_t capacity,
                            const TrainRequest& req);
nlohmann::json ToJson(const SparsityReport& report);

std::size_t ResolveClass(const SetNetModel& model, const std::string& name);
SegmentTarget ResolveSegmentTarget(const SetNetModel& model,
                                   const std::string& name);

struct RunOutcome {
  PointCloud cloud;
  nlohmann::json report;
};

// Unions the inputs, runs the configured mode and builds the run report
// (resolved config, per-subset logits, sparsity before/after).
RunOutcome ExecuteDream(const SetNetModel& model,
                        std::span<const PointCloud> inputs,
                        const RunConfig& cfg);

}  // namespace dreamcloud
