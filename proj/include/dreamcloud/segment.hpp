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
#include <span>
#include <variant>
#include <vector>

#include "dreamcloud/cloud.hpp"

namespace dreamcloud {

// Per-point segment index, dense in [0, count).
struct Segmentation {
  std::vector<std::size_t> assignment;
  std::size_t count = 0;

  std::vector<std::size_t> Sizes() const;
};

struct KMeansParams {
  std::size_t k = 4;
  int max_iters = 100;
  double tol = 1e-6;  // on the largest centroid displacement
  int restarts = 5;
  Seed seed = 0;
};

struct KMeansResult {
  Segmentation segmentation;
  std::vector<Point> centroids;
  double inertia = 0.0;
  int best_restart = 0;
  // One trace per restart: inertia after every Lloyd iteration, then after
  // every single-point transfer pass and every accepted centroid swap.
  std::vector<std::vector<double>> inertia_traces;
};

// k-means++ seeding and Lloyd iterations, then Hartigan single-point transfers
// and a budgeted centroid-swap search. Best of `restarts` by inertia (ties to
// the lower restart index). A cluster that empties takes over the point
// farthest from its centroid among clusters with more than one member.
KMeansResult KMeans(const PointCloud& c, const KMeansParams& params);

double Inertia(const PointCloud& c, const Segmentation& seg,
               std::span<const Point> centroids);

// Splitting plane at min + offset_fraction * extent along `axis`. Points at
// or below the plane form segment 0, the rest segment 1. Both must be
// nonempty.
Segmentation PlaneSplit(const PointCloud& c, int axis, double offset_fraction);

// Uniform block grid over the bounding box. A point on an interior block
// boundary belongs to the lower block; empty blocks are dropped and the
// remaining indices renumbered in x-fastest block order.
Segmentation GridSplit(const PointCloud& c, std::size_t nx, std::size_t ny,
                       std::size_t nz);

// Explicit disjoint index lists that together cover every point.
Segmentation ManualSplit(const PointCloud& c,
                         std::span<const std::vector<std::size_t>> lists);

// Segment clouds in segment order; each keeps the original point order.
std::vector<PointCloud> ApplySegmentation(const PointCloud& c,
                                          const Segmentation& seg);
std::vector<std::vector<std::size_t>> SegmentIndices(const Segmentation& seg);

struct KMeansSpec {
  KMeansParams params;
};
struct PlaneSpec {
  int axis = 2;
  double offset_fraction = 0.5;
};
struct GridSpec {
  std::size_t nx = 1, ny = 1, nz = 1;
};
struct ManualSpec {
  std::vector<std::vector<std::size_t>> lists;
};
using SegmentMethod = std::variant<KMeansSpec, PlaneSpec, GridSpec, ManualSpec>;

Segmentation Segment(const PointCloud& c, const SegmentMethod& method);

}  // namespace dreamcloud
