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
#include <string_view>
#include <vector>

#include "dreamcloud/cloud.hpp"

namespace dreamcloud {

enum class SampleMethod { kUniformArea, kRandom, kBlueNoise };

SampleMethod ParseSampleMethod(std::string_view name);
std::string_view SampleMethodName(SampleMethod method);

struct SampleConfig {
  std::size_t count = 10000;
  Seed seed = 0;
  SampleMethod method = SampleMethod::kUniformArea;
};

// Area-weighted triangle choice, uniform barycentric point within it.
PointCloud SampleSurface(const TriangleMesh& mesh, std::size_t count,
                         Seed seed);

// Uniform selection without replacement, emitted in draw order.
PointCloud DownsampleRandom(const PointCloud& c, std::size_t count, Seed seed);

// Greedy farthest-point selection starting from a seeded random point; ties go
// to the lowest index. Returned indices are in selection order.
std::vector<std::size_t> FarthestPointIndices(const PointCloud& c,
                                              std::size_t count, Seed seed);
PointCloud DownsampleBlueNoise(const PointCloud& c, std::size_t count,
                               Seed seed);

// kRandom or kBlueNoise.
PointCloud Downsample(const PointCloud& c, std::size_t count,
                      SampleMethod method, Seed seed);

// Brings a cloud to exactly `count` points: random downsampling when larger,
// all points plus uniform resampling with replacement when smaller.
PointCloud FitToCount(const PointCloud& c, std::size_t count, Seed seed);

}  // namespace dreamcloud
