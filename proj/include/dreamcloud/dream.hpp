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
#include <functional>
#include <span>
#include <vector>

#include "dreamcloud/cloud.hpp"
#include "dreamcloud/sampling.hpp"
#include "dreamcloud/segment.hpp"
#include "dreamcloud/setnet.hpp"

namespace dreamcloud {

struct DreamConfig {
  double learning_rate = 1.0;
  int iterations = 100;
  int amalgamation_period = 10;
  std::size_t target = 0;
  Seed seed = 0;
  // Divide each step by the mean absolute gradient coordinate.
  bool normalize_gradient = false;
  // Reduction applied after each union with the original subset.
  SampleMethod downsample = SampleMethod::kRandom;
  // 0 = DREAMCLOUD_THREADS or hardware concurrency.
  unsigned threads = 0;
};

void ValidateDreamConfig(const DreamConfig& cfg, const SetNetModel& model);

struct SubsetTrace {
  double initial_logit = 0.0;
  double final_logit = 0.0;
};

struct DreamResult {
  PointCloud cloud;
  std::vector<SubsetTrace> subsets;
};

// Fired right after the working set is unioned with its original subset and
// before it is downsampled back to capacity.
struct AmalgamationEvent {
  std::size_t subset = 0;
  int iteration = 0;
  const PointCloud& original;
  const PointCloud& merged;
};
using AmalgamationObserver = std::function<void(const AmalgamationEvent&)>;

// Plain gradient ascent on the target logit: x <- x + lr * grad. Requires
// |x| == capacity.
DreamResult NaiveDream(const SetNetModel& model, const PointCloud& x,
                       const DreamConfig& cfg);

// Amalgamated dreaming. X is split with PartitionRandom into capacity-sized
// subsets; each is dreamed independently and, every amalgamation_period
// steps, unioned with its original points and downsampled back to capacity.
// The output concatenates the dreamed subsets in partition order, so it has
// ceil(|X| / m) * m points.
DreamResult Add(const SetNetModel& model, const PointCloud& x,
                const DreamConfig& cfg,
                const AmalgamationObserver& observer = {});

// Add() on the union of `inputs`.
DreamResult AddAmalgamated(const SetNetModel& model,
                           std::span<const PointCloud> inputs,
                           const DreamConfig& cfg);

struct SegmentTarget {
  enum class Kind { kClass, kKeep, kRandom };
  Kind kind = Kind::kKeep;
  std::size_t class_index = 0;

  static SegmentTarget Class(std::size_t index) {
    return {Kind::kClass, index};
  }
  static SegmentTarget Keep() { return {Kind::kKeep, 0}; }
  static SegmentTarget Random() { return {Kind::kRandom, 0}; }
};

struct SegmentOutcome {
  std::size_t input_count = 0;
  std::size_t output_count = 0;
  bool kept = false;
  std::size_t target = 0;  // resolved class; meaningless when kept
  Standardization transform;
  std::vector<SubsetTrace> subsets;
};

struct PddResult {
  PointCloud cloud;
  std::vector<SegmentOutcome> segments;
};

// Seed used by Pdd for the ADD run of segment `index`.
Seed SegmentSeed(Seed seed, std::size_t index);

// Partitioned dreaming. Each segment is standardized, dreamed with Add toward
// its own target, recovered and appended in segment order. Kept segments are
// copied through untouched. `targets` has one entry per segment or a single
// entry broadcast to all.
PddResult Pdd(const SetNetModel& model, const PointCloud& x,
              const Segmentation& seg, std::span<const SegmentTarget> targets,
              const DreamConfig& cfg);
PddResult Pdd(const SetNetModel& model, const PointCloud& x,
              const SegmentMethod& method,
              std::span<const SegmentTarget> targets, const DreamConfig& cfg);

struct SparsityReport {
  double mean_knn = 0.0;
  double max_knn = 0.0;
  std::size_t count = 0;
  std::size_t k = 0;
};

// Distance from each point to its k-th nearest other point; exact.
SparsityReport Sparsity(const PointCloud& c, std::size_t k = 8);
std::vector<double> KthNeighborDistances(const PointCloud& c, std::size_t k);

}  // namespace dreamcloud
