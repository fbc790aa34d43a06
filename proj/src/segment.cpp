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

#include "dreamcloud/segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dreamcloud/error.hpp"
#include "dreamcloud/random.hpp"

namespace dreamcloud {
namespace {

double SquaredDistance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

std::vector<Point> PlusPlusSeeds(const PointCloud& c, std::size_t k, Rng& rng) {
  std::vector<Point> centroids{c[UniformIndex(rng, c.size())]};
  std::vector<double> d2(c.size(), std::numeric_limits<double>::infinity());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      d2[i] = std::min(d2[i], SquaredDistance(c[i], centroids.back()));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = Uniform01(rng) * total;
      pick = c.size() - 1;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (u < d2[i]) {
          pick = i;
          break;
        }
        u -= d2[i];
      }
    } else {
      pick = UniformIndex(rng, c.size());
    }
    centroids.push_back(c[pick]);
  }
  return centroids;
}

struct LloydRun {
  std::vector<std::size_t> assignment;
  std::vector<Point> centroids;
  std::vector<double> trace;
};

LloydRun Lloyd(const PointCloud& c, std::vector<Point> centroids,
               const KMeansParams& params) {
  const std::size_t n = c.size(), k = centroids.size();
  LloydRun run;
  run.assignment.assign(n, 0);
  std::vector<double> dist(n);
  std::vector<std::size_t> sizes(k);

  for (int iter = 0; iter < params.max_iters; ++iter) {
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = SquaredDistance(c[i], centroids[0]);
      for (std::size_t j = 1; j < k; ++j) {
        const double d = SquaredDistance(c[i], centroids[j]);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      run.assignment[i] = best;
      dist[i] = best_d;
      ++sizes[best];
    }

    // Empty-cluster repair: hand the empty cluster the point farthest from
    // its centroid, taken from a cluster that can spare it.
    for (std::size_t j = 0; j < k; ++j) {
      if (sizes[j] != 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[run.assignment[i]] > 1 && (far == n || dist[i] > dist[far])) {
          far = i;
        }
      }
      --sizes[run.assignment[far]];
      run.assignment[far] = j;
      sizes[j] = 1;
      dist[far] = 0.0;
      centroids[j] = c[far];
    }

    std::vector<Point> next(k, Point{0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
      for (int d = 0; d < 3; ++d) next[run.assignment[i]][d] += c[i][d];
    }
    double shift = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      for (int d = 0; d < 3; ++d) next[j][d] /= static_cast<double>(sizes[j]);
      shift = std::max(shift, std::sqrt(SquaredDistance(next[j], centroids[j])));
    }
    centroids = std::move(next);

    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      inertia += SquaredDistance(c[i], centroids[run.assignment[i]]);
    }
    run.trace.push_back(inertia);
    if (shift < params.tol) break;
  }
  run.centroids = std::move(centroids);
  return run;
}

// Hartigan single-point transfers: move point i from cluster a to b when
//   |b| / (|b| + 1) * d(i, b) < |a| / (|a| - 1) * d(i, a),
// which lowers the inertia by the difference. One trace entry per pass.
void Refine(const PointCloud& c, LloydRun& run, int max_passes) {
  const std::size_t n = c.size(), k = run.centroids.size();
  std::vector<Point> sum(k, Point{0.0, 0.0, 0.0});
  std::vector<double> size(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < 3; ++d) sum[run.assignment[i]][d] += c[i][d];
    size[run.assignment[i]] += 1.0;
  }
  auto centroid = [&](std::size_t j) {
    return Point{sum[j][0] / size[j], sum[j][1] / size[j], sum[j][2] / size[j]};
  };
  for (int pass = 0; pass < max_passes; ++pass) {
    const std::vector<std::size_t> before = run.assignment;
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = run.assignment[i];
      if (size[a] < 2.0) continue;
      const double remove = size[a] / (size[a] - 1.0) * SquaredDistance(c[i], centroid(a));
      std::size_t best = a;
      double best_add = remove;
      for (std::size_t b = 0; b < k; ++b) {
        if (b == a) continue;
        const double add = size[b] / (size[b] + 1.0) * SquaredDistance(c[i], centroid(b));
        if (add < best_add) {
          best_add = add;
          best = b;
        }
      }
      if (best == a || remove - best_add <= 1e-12 * remove) continue;
      for (int d = 0; d < 3; ++d) {
        sum[a][d] -= c[i][d];
        sum[best][d] += c[i][d];
      }
      size[a] -= 1.0;
      size[best] += 1.0;
      run.assignment[i] = best;
      moved = true;
    }
    if (!moved) break;
    // Exact recomputation so the trace reflects the stored centroids.
    std::fill(sum.begin(), sum.end(), Point{0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
      for (int d = 0; d < 3; ++d) sum[run.assignment[i]][d] += c[i][d];
    }
    std::vector<Point> centroids(k);
    for (std::size_t j = 0; j < k; ++j) centroids[j] = centroid(j);
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      inertia += SquaredDistance(c[i], centroids[run.assignment[i]]);
    }
    if (!(inertia < run.trace.back())) {
      run.assignment = before;
      break;
    }
    run.centroids = std::move(centroids);
    run.trace.push_back(inertia);
  }
}

// Swap search: move one centroid onto a candidate point, descend again, keep
// the result when it lowers the inertia. Candidates are drawn by D^2 weight;
// the trial budget shrinks as the cloud grows.
void SwapSearch(const PointCloud& c, LloydRun& run, const KMeansParams& params,
                Rng& rng) {
  constexpr std::size_t kMaxCandidates = 32;
  const std::size_t n = c.size(), k = run.centroids.size();
  if (k < 2) return;
  std::size_t budget = std::clamp<std::size_t>(500000 / n, 8, 512);
  while (budget > 0 && run.trace.back() > 0.0) {
    std::vector<std::size_t> candidates;
    if (n <= kMaxCandidates) {
      for (std::size_t i = 0; i < n; ++i) candidates.push_back(i);
    } else {
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = SquaredDistance(c[i], run.centroids[run.assignment[i]]);
      }
      std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
      for (std::size_t t = 0; t < kMaxCandidates; ++t) candidates.push_back(pick(rng));
    }
    bool improved = false;
    for (std::size_t j = 0; j < k && !improved; ++j) {
      for (std::size_t cand : candidates) {
        if (budget == 0) break;
        --budget;
        std::vector<Point> start = run.centroids;
        start[j] = c[cand];
        LloydRun trial = Lloyd(c, std::move(start), params);
        Refine(c, trial, params.max_iters);
        const double now = run.trace.back();
        if (now - trial.trace.back() > 1e-12 * now) {
          run.assignment = std::move(trial.assignment);
          run.centroids = std::move(trial.centroids);
          run.trace.push_back(trial.trace.back());
          improved = true;
          break;
        }
      }
    }
    if (!improved) break;
  }
}

}  // namespace

std::vector<std::size_t> Segmentation::Sizes() const {
  std::vector<std::size_t> sizes(count, 0);
  for (std::size_t a : assignment) ++sizes.at(a);
  return sizes;
}

double Inertia(const PointCloud& c, const Segmentation& seg,
               std::span<const Point> centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    total += SquaredDistance(c[i], centroids[seg.assignment[i]]);
  }
  return total;
}

KMeansResult KMeans(const PointCloud& c, const KMeansParams& params) {
  if (params.k < 1) ThrowUsage("k must be at least 1");
  if (params.max_iters < 1 || params.restarts < 1 || !(params.tol >= 0.0)) {
    ThrowUsage("invalid k-means parameters");
  }
  if (c.size() < params.k) {
    ThrowNumeric("k-means needs at least k=" + std::to_string(params.k) +
                 " points, got " + std::to_string(c.size()));
  }

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < params.restarts; ++r) {
    Rng rng(DeriveSeed(params.seed, static_cast<std::uint64_t>(r)));
    LloydRun run = Lloyd(c, PlusPlusSeeds(c, params.k, rng), params);
    Refine(c, run, params.max_iters);
    SwapSearch(c, run, params, rng);
    const double inertia = run.trace.back();
    best.inertia_traces.push_back(run.trace);
    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.best_restart = r;
      best.segmentation = {std::move(run.assignment), params.k};
      best.centroids = std::move(run.centroids);
    }
  }
  return best;
}

Segmentation PlaneSplit(const PointCloud& c, int axis, double offset_fraction) {
  if (axis < 0 || axis > 2) ThrowUsage("plane axis must be x, y or z");
  if (!(offset_fraction > 0.0 && offset_fraction < 1.0)) {
    ThrowUsage("plane offset must lie strictly between 0 and 1");
  }
  const Aabb box = BoundingBox(c);
  const double extent = box.Extent(axis);
  if (!(extent > 0.0)) ThrowNumeric("degenerate extent along split axis");
  const double threshold = box.min[axis] + offset_fraction * extent;

  Segmentation seg{std::vector<std::size_t>(c.size()), 2};
  std::size_t below = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    seg.assignment[i] = c[i][axis] <= threshold ? 0 : 1;
    below += seg.assignment[i] == 0;
  }
  if (below == 0 || below == c.size()) {
    ThrowNumeric("plane split leaves segment " + std::to_string(below == 0 ? 0 : 1) +
                 " empty");
  }
  return seg;
}

Segmentation GridSplit(const PointCloud& c, std::size_t nx, std::size_t ny,
                       std::size_t nz) {
  if (nx < 1 || ny < 1 || nz < 1) ThrowUsage("grid dimensions must be >= 1");
  if (c.empty()) ThrowNumeric("grid split of an empty cloud");
  const Aabb box = BoundingBox(c);
  const std::size_t dims[3] = {nx, ny, nz};

  auto cell = [&](const Point& p, int axis) -> std::size_t {
    const double extent = box.Extent(axis);
    if (!(extent > 0.0)) return 0;
    const double t = (p[axis] - box.min[axis]) / extent * static_cast<double>(dims[axis]);
    const double idx = std::ceil(t) - 1.0;
    return static_cast<std::size_t>(
        std::clamp(idx, 0.0, static_cast<double>(dims[axis] - 1)));
  };

  std::vector<std::size_t> block(c.size());
  std::vector<std::size_t> remap(nx * ny * nz, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    block[i] = cell(c[i], 0) + nx * (cell(c[i], 1) + ny * cell(c[i], 2));
    remap[block[i]] = 1;
  }
  std::size_t count = 0;
  for (std::size_t& r : remap) r = r ? count++ : 0;

  Segmentation seg{std::vector<std::size_t>(c.size()), count};
  for (std::size_t i = 0; i < c.size(); ++i) seg.assignment[i] = remap[block[i]];
  return seg;
}

Segmentation ManualSplit(const PointCloud& c,
                         std::span<const std::vector<std::size_t>> lists) {
  if (lists.empty()) ThrowUsage("manual segmentation needs at least one list");
  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  Segmentation seg{std::vector<std::size_t>(c.size(), kUnset), lists.size()};
  for (std::size_t s = 0; s < lists.size(); ++s) {
    if (lists[s].empty()) ThrowUsage("manual segment " + std::to_string(s) + " is empty");
    for (std::size_t i : lists[s]) {
      if (i >= c.size()) ThrowUsage("manual index " + std::to_string(i) + " out of range");
      if (seg.assignment[i] != kUnset) {
        ThrowUsage("manual index " + std::to_string(i) + " listed twice");
      }
      seg.assignment[i] = s;
    }
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (seg.assignment[i] == kUnset) {
      ThrowUsage("point " + std::to_string(i) + " is in no manual segment");
    }
  }
  return seg;
}

std::vector<std::vector<std::size_t>> SegmentIndices(const Segmentation& seg) {
  std::vector<std::vector<std::size_t>> out(seg.count);
  for (std::size_t i = 0; i < seg.assignment.size(); ++i) {
    if (seg.assignment[i] >= seg.count) ThrowUsage("segment index out of range");
    out[seg.assignment[i]].push_back(i);
  }
  return out;
}

std::vector<PointCloud> ApplySegmentation(const PointCloud& c,
                                          const Segmentation& seg) {
  if (seg.assignment.size() != c.size()) {
    ThrowUsage("segmentation does not match the cloud size");
  }
  std::vector<PointCloud> out;
  for (const auto& idx : SegmentIndices(seg)) out.push_back(Gather(c, idx));
  return out;
}

Segmentation Segment(const PointCloud& c, const SegmentMethod& method) {
  struct Visitor {
    const PointCloud& c;
    Segmentation operator()(const KMeansSpec& s) const {
      return KMeans(c, s.params).segmentation;
    }
    Segmentation operator()(const PlaneSpec& s) const {
      return PlaneSplit(c, s.axis, s.offset_fraction);
    }
    Segmentation operator()(const GridSpec& s) const {
      return GridSplit(c, s.nx, s.ny, s.nz);
    }
    Segmentation operator()(const ManualSpec& s) const {
      return ManualSplit(c, s.lists);
    }
  };
  return std::visit(Visitor{c}, method);
}

}  // namespace dreamcloud
