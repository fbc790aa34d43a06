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

#include "dreamcloud/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dreamcloud/error.hpp"
#include "dreamcloud/random.hpp"

namespace dreamcloud {
namespace {

bool Finite(const Point& p) {
  return std::isfinite(p[0]) && std::isfinite(p[1]) && std::isfinite(p[2]);
}

Point Sub(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

Point Cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

PointCloud::PointCloud(std::vector<Point> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!Finite(points_[i])) {
      ThrowNumeric("non-finite coordinate at point " + std::to_string(i));
    }
  }
}

TriangleMesh::TriangleMesh(std::vector<Point> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  for (const Point& v : vertices_) {
    if (!Finite(v)) ThrowNumeric("non-finite mesh vertex");
  }
  const auto n = vertices_.size();
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& face = faces_[f];
    if (face.a >= n || face.b >= n || face.c >= n) {
      ThrowNumeric("face " + std::to_string(f) + " index out of range");
    }
    if (face.a == face.b || face.b == face.c || face.a == face.c) {
      ThrowNumeric("face " + std::to_string(f) + " repeats a vertex");
    }
  }
}

double TriangleMesh::FaceArea(std::size_t f) const {
  const Face& face = faces_[f];
  const Point& a = vertices_[face.a];
  const Point n = Cross(Sub(vertices_[face.b], a), Sub(vertices_[face.c], a));
  return 0.5 * std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
}

double TriangleMesh::SurfaceArea() const {
  double total = 0.0;
  for (std::size_t f = 0; f < faces_.size(); ++f) total += FaceArea(f);
  return total;
}

PointCloud Union(const PointCloud& a, const PointCloud& b) {
  std::vector<Point> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return PointCloud(std::move(out));
}

PointCloud Union(std::span<const PointCloud> clouds) {
  std::size_t total = 0;
  for (const auto& c : clouds) total += c.size();
  std::vector<Point> out;
  out.reserve(total);
  for (const auto& c : clouds) out.insert(out.end(), c.begin(), c.end());
  return PointCloud(std::move(out));
}

std::vector<PointCloud> PartitionRandom(const PointCloud& c, std::size_t m,
                                        Seed seed) {
  if (c.empty()) ThrowNumeric("empty input");
  if (m == 0) ThrowUsage("partition size must be at least 1");

  Rng rng(seed);
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t chunks = (c.size() + m - 1) / m;
  std::vector<PointCloud> out;
  out.reserve(chunks);
  for (std::size_t k = 0; k < chunks; ++k) {
    std::vector<Point> pts;
    pts.reserve(m);
    const std::size_t begin = k * m;
    const std::size_t end = std::min(begin + m, c.size());
    for (std::size_t i = begin; i < end; ++i) pts.push_back(c[order[i]]);
    while (pts.size() < m) pts.push_back(c[UniformIndex(rng, c.size())]);
    out.emplace_back(std::move(pts));
  }
  return out;
}

Point Centroid(const PointCloud& c) {
  if (c.empty()) ThrowNumeric("empty input");
  Point sum{0.0, 0.0, 0.0};
  for (const Point& p : c) {
    for (int d = 0; d < 3; ++d) sum[d] += p[d];
  }
  const double n = static_cast<double>(c.size());
  return {sum[0] / n, sum[1] / n, sum[2] / n};
}

StandardizedCloud Standardize(const PointCloud& c) {
  if (c.size() < 2) ThrowNumeric("standardize needs at least 2 points");
  const Point mean = Centroid(c);
  double sq = 0.0;
  for (const Point& p : c) {
    for (int d = 0; d < 3; ++d) sq += (p[d] - mean[d]) * (p[d] - mean[d]);
  }
  const double scale = std::sqrt(sq / static_cast<double>(c.size()));
  if (!(scale > 0.0)) ThrowNumeric("zero variance");

  std::vector<Point> out;
  out.reserve(c.size());
  for (const Point& p : c) {
    out.push_back({(p[0] - mean[0]) / scale, (p[1] - mean[1]) / scale,
                   (p[2] - mean[2]) / scale});
  }
  return {PointCloud(std::move(out)), Standardization{mean, scale}};
}

PointCloud Recover(const PointCloud& c, const Standardization& s) {
  if (!(s.scale > 0.0) || !std::isfinite(s.scale)) {
    ThrowNumeric("standardization scale must be positive");
  }
  std::vector<Point> out;
  out.reserve(c.size());
  for (const Point& p : c) {
    out.push_back({p[0] * s.scale + s.centroid[0],
                   p[1] * s.scale + s.centroid[1],
                   p[2] * s.scale + s.centroid[2]});
  }
  return PointCloud(std::move(out));
}

Aabb BoundingBox(const PointCloud& c) {
  if (c.empty()) ThrowNumeric("bounding box of an empty cloud");
  Aabb box{c[0], c[0]};
  for (const Point& p : c) {
    for (int d = 0; d < 3; ++d) {
      box.min[d] = std::min(box.min[d], p[d]);
      box.max[d] = std::max(box.max[d], p[d]);
    }
  }
  return box;
}

PointCloud Gather(const PointCloud& c, std::span<const std::size_t> indices) {
  std::vector<Point> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= c.size()) ThrowUsage("point index out of range");
    out.push_back(c[i]);
  }
  return PointCloud(std::move(out));
}

}  // namespace dreamcloud
