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

#include "dreamcloud/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dreamcloud/error.hpp"
#include "dreamcloud/random.hpp"

namespace dreamcloud {
namespace {

double SquaredDistance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

void CheckCount(const PointCloud& c, std::size_t count) {
  if (count == 0) ThrowUsage("count must be at least 1");
  if (count > c.size()) {
    ThrowNumeric("insufficient points: requested " + std::to_string(count) +
                 " of " + std::to_string(c.size()));
  }
}

}  // namespace

SampleMethod ParseSampleMethod(std::string_view name) {
  if (name == "uniform-area" || name == "uniform") {
    return SampleMethod::kUniformArea;
  }
  if (name == "random") return SampleMethod::kRandom;
  if (name == "blue-noise" || name == "fps") return SampleMethod::kBlueNoise;
  ThrowUsage("unknown sampling method '" + std::string(name) + "'");
}

std::string_view SampleMethodName(SampleMethod method) {
  switch (method) {
    case SampleMethod::kUniformArea: return "uniform-area";
    case SampleMethod::kRandom: return "random";
    case SampleMethod::kBlueNoise: return "blue-noise";
  }
  return "?";
}

PointCloud SampleSurface(const TriangleMesh& mesh, std::size_t count,
                         Seed seed) {
  if (count == 0) ThrowUsage("count must be at least 1");
  const auto& faces = mesh.faces();
  std::vector<double> cdf(faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    total += mesh.FaceArea(f);
    cdf[f] = total;
  }
  if (!(total > 0.0)) ThrowNumeric("mesh has zero surface area");

  Rng rng(seed);
  const auto& v = mesh.vertices();
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = Uniform01(rng) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t f = std::min<std::size_t>(it - cdf.begin(), faces.size() - 1);
    // Skip zero-area faces that share a cdf value with their predecessor.
    while (f > 0 && cdf[f] == cdf[f - 1]) --f;

    const double r1 = std::sqrt(Uniform01(rng));
    const double r2 = Uniform01(rng);
    const double wa = 1.0 - r1, wb = r1 * (1.0 - r2), wc = r1 * r2;
    const Point& a = v[faces[f].a];
    const Point& b = v[faces[f].b];
    const Point& c = v[faces[f].c];
    out.push_back({wa * a[0] + wb * b[0] + wc * c[0],
                   wa * a[1] + wb * b[1] + wc * c[1],
                   wa * a[2] + wb * b[2] + wc * c[2]});
  }
  return PointCloud(std::move(out));
}

PointCloud DownsampleRandom(const PointCloud& c, std::size_t count, Seed seed) {
  CheckCount(c, count);
  Rng rng(seed);
  std::vector<std::size_t> idx(c.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + UniformIndex(rng, c.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return Gather(c, idx);
}

std::vector<std::size_t> FarthestPointIndices(const PointCloud& c,
                                              std::size_t count, Seed seed) {
  CheckCount(c, count);
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  chosen.push_back(UniformIndex(rng, c.size()));

  // Chosen points are parked at -1 so duplicates are never picked twice.
  std::vector<double> nearest(c.size(), std::numeric_limits<double>::infinity());
  nearest[chosen.back()] = -1.0;
  while (chosen.size() < count) {
    const Point& last = c[chosen.back()];
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(c[i], last));
      if (nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    nearest[best] = -1.0;
    chosen.push_back(best);
  }
  return chosen;
}

PointCloud DownsampleBlueNoise(const PointCloud& c, std::size_t count,
                               Seed seed) {
  return Gather(c, FarthestPointIndices(c, count, seed));
}

PointCloud Downsample(const PointCloud& c, std::size_t count,
                      SampleMethod method, Seed seed) {
  switch (method) {
    case SampleMethod::kRandom: return DownsampleRandom(c, count, seed);
    case SampleMethod::kBlueNoise: return DownsampleBlueNoise(c, count, seed);
    case SampleMethod::kUniformArea: break;
  }
  ThrowUsage("uniform-area sampling applies to meshes, not clouds");
}

PointCloud FitToCount(const PointCloud& c, std::size_t count, Seed seed) {
  if (c.empty()) ThrowNumeric("empty input");
  if (c.size() >= count) return DownsampleRandom(c, count, seed);
  Rng rng(seed);
  std::vector<Point> pts(c.begin(), c.end());
  while (pts.size() < count) pts.push_back(c[UniformIndex(rng, c.size())]);
  return PointCloud(std::move(pts));
}

}  // namespace dreamcloud
