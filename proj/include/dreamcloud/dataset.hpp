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
#include <string>
#include <vector>

#include "dreamcloud/cloud.hpp"

namespace dreamcloud {

struct LabeledCloud {
  PointCloud cloud;
  std::size_t label = 0;
};

struct SyntheticDataset {
  std::vector<std::string> class_names;
  std::vector<LabeledCloud> samples;
};

// sphere, cube, cone, cylinder, torus, plane, pyramid, capsule.
const std::vector<std::string>& SyntheticClassNames();

// Each sample: a randomly proportioned primitive, rotated about z, surface
// sampled to `capacity` points, standardized, then jittered with N(0, 0.01)
// per coordinate. Samples are ordered class-major.
SyntheticDataset MakeSyntheticDataset(std::size_t per_class,
                                      std::size_t capacity, Seed seed);

// A single clean (unjittered, standardized) sample of class `label`.
PointCloud MakeSyntheticCloud(std::size_t label, std::size_t count,
                              Seed seed, double jitter = 0.0);

// Deterministic stratified split; every class keeps at least one training
// sample.
struct DatasetSplit {
  SyntheticDataset train;
  SyntheticDataset heldout;
};
DatasetSplit SplitDataset(const SyntheticDataset& data,
                          double heldout_fraction, Seed seed);

// Directory layout: <dir>/<class>/<class>_<nnnn>.xyz plus manifest.json.
void WriteDatasetDir(const SyntheticDataset& data, const std::string& dir,
                     std::size_t per_class, std::size_t capacity, Seed seed);
SyntheticDataset ReadDatasetDir(const std::string& dir);

}  // namespace dreamcloud
