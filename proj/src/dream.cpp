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

#include "dreamcloud/dream.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "dreamcloud/error.hpp"
#include "dreamcloud/random.hpp"
#include "parallel.hpp"

namespace dreamcloud {
namespace {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

// Seed streams.
constexpr std::uint64_t kPartitionStream = 0;
constexpr std::uint64_t kRandomTargetStream = 1;
constexpr std::uint64_t kSubsetStreamBase = 1'000;
constexpr std::uint64_t kSegmentStreamBase = 1'000'000;

double TargetLogit(const SetNetModel& model, const PointCloud& x,
                   std::size_t target) {
  return model.Forward(x).scores[target];
}

// One x <- x + lr * grad step on the target logit.
PointCloud Step(const SetNetModel& model, const PointCloud& x,
                const DreamConfig& cfg) {
  PointGradient g;
  model.ForwardWithGradient(x, cfg.target, g);
  double scale = cfg.learning_rate;
  if (cfg.normalize_gradient) {
    double sum = 0.0;
    for (const Point& p : g) sum += std::abs(p[0]) + std::abs(p[1]) + std::abs(p[2]);
    const double mean = sum / (3.0 * static_cast<double>(g.size()));
    if (mean > 0.0) scale /= mean;
  }
  std::vector<Point> next(x.begin(), x.end());
  for (std::size_t i = 0; i < next.size(); ++i) {
    for (int d = 0; d < 3; ++d) next[i][d] += scale * g[i][d];
  }
  return PointCloud(std::move(next));
}

SubsetTrace DreamSubset(const SetNetModel& model, const PointCloud& original,
                        std::size_t subset, const DreamConfig& cfg, Seed seed,
                        const AmalgamationObserver& observer,
                        std::mutex& observer_mutex, PointCloud& out) {
  SubsetTrace trace;
  trace.initial_logit = TargetLogit(model, original, cfg.target);
  PointCloud x = original;
  for (int t = 1; t <= cfg.iterations; ++t) {
    x = Step(model, x, cfg);
    if (t % cfg.amalgamation_period == 0) {
      const PointCloud merged = Union(x, original);
      if (observer) {
        std::lock_guard lock(observer_mutex);
        observer(AmalgamationEvent{subset, t, original, merged});
      }
      x = Downsample(merged, model.capacity(), cfg.downsample,
                     DeriveSeed(seed, static_cast<std::uint64_t>(t)));
    }
  }
  trace.final_logit =
      cfg.iterations == 0 ? trace.initial_logit : TargetLogit(model, x, cfg.target);
  out = std::move(x);
  return trace;
}

}  // namespace

void ValidateDreamConfig(const DreamConfig& cfg, const SetNetModel& model) {
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    ThrowUsage("learning rate must be positive");
  }
  if (cfg.iterations < 0) ThrowUsage("iterations must be >= 0");
  if (cfg.amalgamation_period < 1) ThrowUsage("amalgamation period must be >= 1");
  if (cfg.target >= model.num_classes()) {
    ThrowUsage("target class " + std::to_string(cfg.target) + " out of range");
  }
  if (cfg.downsample == SampleMethod::kUniformArea) {
    ThrowUsage("in-loop downsampling must be random or blue-noise");
  }
}

DreamResult NaiveDream(const SetNetModel& model, const PointCloud& x,
                       const DreamConfig& cfg) {
  ValidateDreamConfig(cfg, model);
  if (x.size() != model.capacity()) {
    ThrowNumeric("capacity mismatch: naive dreaming needs exactly " +
                 std::to_string(model.capacity()) + " points, got " +
                 std::to_string(x.size()));
  }
  SubsetTrace trace;
  trace.initial_logit = TargetLogit(model, x, cfg.target);
  PointCloud current = x;
  for (int t = 1; t <= cfg.iterations; ++t) current = Step(model, current, cfg);
  trace.final_logit = cfg.iterations == 0 ? trace.initial_logit
                                          : TargetLogit(model, current, cfg.target);
  return {std::move(current), {trace}};
}

DreamResult Add(const SetNetModel& model, const PointCloud& x,
                const DreamConfig& cfg, const AmalgamationObserver& observer) {
  ValidateDreamConfig(cfg, model);
  if (x.empty()) ThrowNumeric("empty input");
  const std::vector<PointCloud> subsets =
      PartitionRandom(x, model.capacity(), DeriveSeed(cfg.seed, kPartitionStream));

  std::vector<PointCloud> dreamed(subsets.size());
  std::vector<SubsetTrace> traces(subsets.size());
  std::mutex observer_mutex;
  detail::ParallelFor(subsets.size(), cfg.threads, [&](std::size_t s) {
    traces[s] = DreamSubset(model, subsets[s], s, cfg,
                            DeriveSeed(cfg.seed, kSubsetStreamBase + s), observer,
                            observer_mutex, dreamed[s]);
  });
  return {Union(dreamed), std::move(traces)};
}

DreamResult AddAmalgamated(const SetNetModel& model,
                           std::span<const PointCloud> inputs,
                           const DreamConfig& cfg) {
  if (inputs.empty()) ThrowUsage("no input clouds");
  return Add(model, Union(inputs), cfg);
}

Seed SegmentSeed(Seed seed, std::size_t index) {
  return DeriveSeed(seed, kSegmentStreamBase + index);
}

PddResult Pdd(const SetNetModel& model, const PointCloud& x,
              const Segmentation& seg, std::span<const SegmentTarget> targets,
              const DreamConfig& cfg) {
  if (seg.count == 0) ThrowUsage("segmentation has no segments");
  if (targets.size() != 1 && targets.size() != seg.count) {
    ThrowUsage("expected 1 or " + std::to_string(seg.count) + " targets, got " +
               std::to_string(targets.size()));
  }
  const std::vector<PointCloud> segments = ApplySegmentation(x, seg);

  Rng target_rng(DeriveSeed(cfg.seed, kRandomTargetStream));
  PddResult result;
  std::vector<PointCloud> pieces;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const SegmentTarget& t = targets.size() == 1 ? targets[0] : targets[i];
    const PointCloud& piece = segments[i];
    SegmentOutcome outcome;
    outcome.input_count = piece.size();
    if (piece.empty()) ThrowNumeric("segment " + std::to_string(i) + " is empty");

    if (t.kind == SegmentTarget::Kind::kKeep) {
      outcome.kept = true;
      outcome.output_count = piece.size();
      pieces.push_back(piece);
      result.segments.push_back(outcome);
      continue;
    }
    outcome.target = t.kind == SegmentTarget::Kind::kRandom
                         ? UniformIndex(target_rng, model.num_classes())
                         : t.class_index;
    if (piece.size() < 2) {
      ThrowNumeric("segment " + std::to_string(i) + " has fewer than 2 points");
    }
    StandardizedCloud std_piece;
    try {
      std_piece = Standardize(piece);
    } catch (const Error& e) {
      ThrowNumeric("segment " + std::to_string(i) + " is degenerate: " + e.what());
    }
    DreamConfig seg_cfg = cfg;
    seg_cfg.seed = SegmentSeed(cfg.seed, i);
    seg_cfg.target = outcome.target;
    DreamResult dreamed = Add(model, std_piece.cloud, seg_cfg);

    outcome.transform = std_piece.transform;
    outcome.subsets = std::move(dreamed.subsets);
    pieces.push_back(Recover(dreamed.cloud, std_piece.transform));
    outcome.output_count = pieces.back().size();
    result.segments.push_back(std::move(outcome));
  }
  result.cloud = Union(pieces);
  return result;
}

PddResult Pdd(const SetNetModel& model, const PointCloud& x,
              const SegmentMethod& method,
              std::span<const SegmentTarget> targets, const DreamConfig& cfg) {
  return Pdd(model, x, Segment(x, method), targets, cfg);
}

std::vector<double> KthNeighborDistances(const PointCloud& c, std::size_t k) {
  if (k < 1) ThrowUsage("k must be at least 1");
  if (c.size() <= k) {
    ThrowNumeric("too few points: sparsity with k=" + std::to_string(k) +
                 " needs more than " + std::to_string(k) + " points");
  }
  using BPoint = bg::model::point<double, 3, bg::cs::cartesian>;
  std::vector<BPoint> pts;
  pts.reserve(c.size());
  for (const Point& p : c) pts.emplace_back(p[0], p[1], p[2]);
  const bgi::rtree<BPoint, bgi::rstar<16>> tree(pts.begin(), pts.end());

  std::vector<double> out(c.size());
  std::vector<BPoint> hits;
  for (std::size_t i = 0; i < c.size(); ++i) {
    hits.clear();
    // k + 1 hits include the query point itself at distance 0, so the largest
    // is the k-th nearest other point even with duplicates.
    tree.query(bgi::nearest(pts[i], static_cast<unsigned>(k + 1)),
               std::back_inserter(hits));
    double worst = 0.0;
    for (const BPoint& h : hits) {
      const double dx = h.get<0>() - c[i][0], dy = h.get<1>() - c[i][1],
                   dz = h.get<2>() - c[i][2];
      worst = std::max(worst, dx * dx + dy * dy + dz * dz);
    }
    out[i] = std::sqrt(worst);
  }
  return out;
}

SparsityReport Sparsity(const PointCloud& c, std::size_t k) {
  const std::vector<double> d = KthNeighborDistances(c, k);
  SparsityReport r;
  r.k = k;
  r.count = c.size();
  double sum = 0.0;
  for (double v : d) {
    sum += v;
    r.max_knn = std::max(r.max_knn, v);
  }
  r.mean_knn = sum / static_cast<double>(d.size());
  return r;
}

}  // namespace dreamcloud
