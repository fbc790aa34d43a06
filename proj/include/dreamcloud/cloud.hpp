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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dreamcloud {

using Point = std::array<double, 3>;
using Seed = std::uint64_t;

// Ordered list of 3D points. Duplicates are allowed; every coordinate must be
// finite.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Point> points);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point> points() const noexcept { return points_; }
  const std::vector<Point>& vec() const noexcept { return points_; }

  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::vector<Point> points_;
};

struct Face {
  std::uint32_t a = 0, b = 0, c = 0;
  friend bool operator==(const Face&, const Face&) = default;
};

// Indexed triangle soup. Construction validates indices; zero-area faces are
// allowed but a mesh needs some area to be sampled.
class TriangleMesh {
 public:
  TriangleMesh() = default;
  TriangleMesh(std::vector<Point> vertices, std::vector<Face> faces);

  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  const std::vector<Face>& faces() const noexcept { return faces_; }

  double FaceArea(std::size_t f) const;
  double SurfaceArea() const;

 private:
  std::vector<Point> vertices_;
  std::vector<Face> faces_;
};

// Isotropic centering + scaling. `scale` is the RMS distance of the source
// points from `centroid`.
struct Standardization {
  Point centroid{0.0, 0.0, 0.0};
  double scale = 1.0;
};

struct Aabb {
  Point min{0.0, 0.0, 0.0};
  Point max{0.0, 0.0, 0.0};

  double Extent(int axis) const { return max[axis] - min[axis]; }
};

struct StandardizedCloud {
  PointCloud cloud;
  Standardization transform;
};

// Points of `a` followed by the points of `b`; no deduplication.
PointCloud Union(const PointCloud& a, const PointCloud& b);
PointCloud Union(std::span<const PointCloud> clouds);

// Seeded shuffle chunked into ceil(|c|/m) subsets of exactly m points. A short
// final chunk is topped up by sampling c uniformly with replacement.
std::vector<PointCloud> PartitionRandom(const PointCloud& c, std::size_t m,
                                        Seed seed);

StandardizedCloud Standardize(const PointCloud& c);
PointCloud Recover(const PointCloud& c, const Standardization& s);

Aabb BoundingBox(const PointCloud& c);
Point Centroid(const PointCloud& c);

// Subset of `c` picked by index, in index order.
PointCloud Gather(const PointCloud& c, std::span<const std::size_t> indices);

}  // namespace dreamcloud
