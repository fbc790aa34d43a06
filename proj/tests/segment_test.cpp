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
#include <set>

#include "doctest.h"
#include "dreamcloud/error.hpp"
#include "dreamcloud/segment.hpp"
#include "test_util.hpp"

namespace dreamcloud {
namespace {

using testing::RandomCloud;

// Minimum inertia over all k^n labelings; empty clusters are allowed, which
// never beats the best labeling with all clusters used.
double BruteForceInertia(const PointCloud& c, std::size_t k) {
  const std::size_t n = c.size();
  std::vector<std::size_t> label(n, 0);
  double best = INFINITY;
  for (;;) {
    std::vector<Point> sum(k, Point{0, 0, 0});
    std::vector<double> cnt(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (int d = 0; d < 3; ++d) sum[label[i]][d] += c[i][d];
      cnt[label[i]] += 1.0;
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t l = label[i];
      for (int d = 0; d < 3; ++d) {
        const double diff = c[i][d] - sum[l][d] / cnt[l];
        inertia += diff * diff;
      }
    }
    best = std::min(best, inertia);
    std::size_t i = 0;
    while (i < n && ++label[i] == k) label[i++] = 0;
    if (i == n) break;
  }
  return best;
}

TEST_CASE("k-means inertia never increases across Lloyd iterations") {
  for (int trial = 0; trial < 30; ++trial) {
    KMeansParams p;
    p.k = 2 + trial % 6;
    p.seed = trial;
    const KMeansResult r = KMeans(RandomCloud(300, trial), p);
    CHECK(r.inertia_traces.size() == 5);
    for (const auto& trace : r.inertia_traces) {
      REQUIRE_FALSE(trace.empty());
      for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
    }
    CHECK(r.segmentation.count == p.k);
    for (std::size_t s : r.segmentation.Sizes()) CHECK(s > 0);
    CHECK(r.inertia == doctest::Approx(
                           Inertia(RandomCloud(300, trial), r.segmentation, r.centroids)));
  }
}

TEST_CASE("k-means reaches the exhaustive optimum on small inputs") {
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 4 + trial % 9;
    const std::size_t k = 2 + trial % 2;
    const PointCloud c = RandomCloud(n, 1000 + trial);
    KMeansParams p;
    p.k = k;
    p.seed = trial;
    const double got = KMeans(c, p).inertia;
    CHECK(got <= BruteForceInertia(c, k) * (1.0 + 1e-12) + 1e-15);
  }
}

TEST_CASE("k-means separates distant blobs") {
  std::vector<Point> pts;
  const PointCloud blob = RandomCloud(100, 3, 0.1);
  for (int b = 0; b < 3; ++b) {
    for (const Point& p : blob) pts.push_back({p[0] + 10.0 * b, p[1], p[2]});
  }
  KMeansParams p;
  p.k = 3;
  const KMeansResult r = KMeans(PointCloud(pts), p);
  for (int b = 0; b < 3; ++b) {
    std::set<std::size_t> labels;
    for (int i = 0; i < 100; ++i) labels.insert(r.segmentation.assignment[b * 100 + i]);
    CHECK(labels.size() == 1);
  }
  CHECK(r.segmentation.Sizes() == std::vector<std::size_t>{100, 100, 100});
}

TEST_CASE("k-means is deterministic and validates k") {
  const PointCloud c = RandomCloud(100, 5);
  KMeansParams p;
  p.seed = 9;
  CHECK(KMeans(c, p).segmentation.assignment == KMeans(c, p).segmentation.assignment);
  p.k = 101;
  CHECK_THROWS_AS(KMeans(c, p), Error);
  p.k = 0;
  CHECK_THROWS_AS(KMeans(c, p), Error);
}

TEST_CASE("k-means handles duplicate points") {
  std::vector<Point> pts(20, Point{1, 1, 1});
  pts.push_back({5, 5, 5});
  KMeansParams p;
  p.k = 3;
  const KMeansResult r = KMeans(PointCloud(pts), p);
  for (std::size_t s : r.segmentation.Sizes()) CHECK(s > 0);
}

TEST_CASE("plane split matches a brute-force scan") {
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud c = RandomCloud(1 + 100 * trial + 2, trial);
    const int axis = trial % 3;
    const double f = 0.2 + 0.03 * trial;
    const Segmentation s = PlaneSplit(c, axis, f);
    const Aabb box = BoundingBox(c);
    const double cut = box.min[axis] + f * (box.max[axis] - box.min[axis]);
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(s.assignment[i] == (c[i][axis] <= cut ? 0u : 1u));
    }
  }
  const PointCloud line({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  CHECK(PlaneSplit(line, 0, 0.5).assignment == std::vector<std::size_t>{0, 0, 1});
  CHECK_THROWS_AS(PlaneSplit(line, 1, 0.5), Error);
  CHECK_THROWS_AS(PlaneSplit(line, 0, 1.0), Error);
  CHECK_THROWS_AS(PlaneSplit(line, 3, 0.5), Error);
}

TEST_CASE("grid split matches a brute-force scan") {
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud c = RandomCloud(50 * trial + 10, trial);
    const std::size_t dims[3] = {1u + trial % 4, 1u + trial % 3, 2u};
    const Segmentation s = GridSplit(c, dims[0], dims[1], dims[2]);
    const Aabb box = BoundingBox(c);
    // Oracle: first block whose upper face is at or above the point.
    std::vector<std::size_t> block(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::size_t b[3];
      for (int a = 0; a < 3; ++a) {
        const double step = box.Extent(a) / static_cast<double>(dims[a]);
        b[a] = 0;
        while (b[a] + 1 < dims[a] && c[i][a] > box.min[a] + (b[a] + 1) * step) ++b[a];
      }
      block[i] = b[0] + dims[0] * (b[1] + dims[1] * b[2]);
    }
    // Renumber occupied blocks in block order.
    std::vector<std::size_t> used(block.begin(), block.end());
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    CHECK(s.count == used.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      const auto want = std::lower_bound(used.begin(), used.end(), block[i]) - used.begin();
      CHECK(s.assignment[i] == static_cast<std::size_t>(want));
    }
  }
}

TEST_CASE("grid boundaries go to the lower block") {
  const PointCloud c({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}});
  const Segmentation s = GridSplit(c, 2, 1, 1);
  CHECK(s.assignment == std::vector<std::size_t>{0, 0, 0, 1, 1});
  // Blocks 1 and 2 of 4 along x are empty here and dropped.
  const PointCloud ends({{0, 0, 0}, {0.1, 0, 0}, {4, 0, 0}});
  const Segmentation e = GridSplit(ends, 4, 1, 1);
  CHECK(e.count == 2);
  CHECK(e.assignment == std::vector<std::size_t>{0, 0, 1});
}

TEST_CASE("grid octants are binomially balanced") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts(80000);
  for (Point& p : pts) p = {u(rng), u(rng), u(rng)};
  const Segmentation s = GridSplit(PointCloud(pts), 2, 2, 2);
  REQUIRE(s.count == 8);
  const double n = 80000, mean = n / 8, sd = std::sqrt(n * (1.0 / 8) * (7.0 / 8));
  for (std::size_t size : s.Sizes()) CHECK(std::abs(size - mean) <= 3 * sd);
}

TEST_CASE("manual split validates coverage") {
  const PointCloud c = RandomCloud(5, 1);
  const std::vector<std::vector<std::size_t>> ok{{4, 0}, {1, 2, 3}};
  const Segmentation s = ManualSplit(c, ok);
  CHECK(s.assignment == std::vector<std::size_t>{0, 1, 1, 1, 0});
  const auto parts = ApplySegmentation(c, s);
  CHECK(parts[0] == Gather(c, std::vector<std::size_t>{0, 4}));
  CHECK(SegmentIndices(s)[1] == std::vector<std::size_t>{1, 2, 3});

  const std::vector<std::vector<std::size_t>> overlap{{0, 1}, {1, 2, 3, 4}};
  const std::vector<std::vector<std::size_t>> missing{{0, 1}, {2, 3}};
  const std::vector<std::vector<std::size_t>> range{{0, 1, 2, 3, 4, 5}};
  const std::vector<std::vector<std::size_t>> empty_list{{0, 1, 2, 3, 4}, {}};
  CHECK_THROWS_AS(ManualSplit(c, overlap), Error);
  CHECK_THROWS_AS(ManualSplit(c, missing), Error);
  CHECK_THROWS_AS(ManualSplit(c, range), Error);
  CHECK_THROWS_AS(ManualSplit(c, empty_list), Error);
}

TEST_CASE("segment dispatch") {
  const PointCloud c = RandomCloud(100, 2);
  CHECK(Segment(c, PlaneSpec{0, 0.5}).assignment == PlaneSplit(c, 0, 0.5).assignment);
  CHECK(Segment(c, GridSpec{2, 2, 1}).count == GridSplit(c, 2, 2, 1).count);
  KMeansSpec km;
  km.params.k = 3;
  CHECK(Segment(c, km).count == 3);
}

}  // namespace
}  // namespace dreamcloud
