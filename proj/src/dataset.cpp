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

#include "dreamcloud/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

#include "json.hpp"

#include "dreamcloud/error.hpp"
#include "dreamcloud/io.hpp"
#include "dreamcloud/random.hpp"
#include "dreamcloud/sampling.hpp"
#include "dreamcloud/shapes.hpp"

namespace dreamcloud {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

double Between(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * Uniform01(rng);
}

TriangleMesh RandomPrimitive(std::size_t label, Rng& rng) {
  switch (label) {
    case 0: return shapes::Sphere(1.0);
    case 1:
      return shapes::Box(Between(rng, 0.9, 1.1), Between(rng, 0.9, 1.1),
                         Between(rng, 0.9, 1.1));
    case 2: return shapes::Cone(Between(rng, 0.4, 0.6), Between(rng, 0.9, 1.3));
    case 3:
      return shapes::Cylinder(Between(rng, 0.3, 0.5), Between(rng, 1.0, 1.6));
    case 4: return shapes::Torus(1.0, Between(rng, 0.2, 0.35));
    case 5:
      return shapes::Scale(shapes::Plane(1.0),
                           {Between(rng, 0.8, 1.2), Between(rng, 0.8, 1.2), 1.0});
    case 6:
      return shapes::Pyramid(Between(rng, 0.9, 1.2), Between(rng, 0.8, 1.2));
    case 7:
      return shapes::Capsule(Between(rng, 0.25, 0.4), Between(rng, 0.8, 1.4));
    default: ThrowUsage("unknown synthetic class " + std::to_string(label));
  }
}

std::string SampleFile(const std::string& cls, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%04zu.xyz", i);
  return cls + "/" + cls + buf;
}

}  // namespace

const std::vector<std::string>& SyntheticClassNames() {
  static const std::vector<std::string> names = {
      "sphere", "cube",  "cone",    "cylinder",
      "torus",  "plane", "pyramid", "capsule"};
  return names;
}

PointCloud MakeSyntheticCloud(std::size_t label, std::size_t count, Seed seed,
                              double jitter) {
  Rng rng(seed);
  TriangleMesh mesh = RandomPrimitive(label, rng);
  mesh = shapes::RotateZ(mesh, Between(rng, 0.0, 2.0 * std::numbers::pi));
  const Seed surface_seed = rng();
  PointCloud cloud = Standardize(SampleSurface(mesh, count, surface_seed)).cloud;
  if (jitter <= 0.0) return cloud;
  std::normal_distribution<double> noise(0.0, jitter);
  std::vector<Point> pts(cloud.begin(), cloud.end());
  for (Point& p : pts) {
    for (double& v : p) v += noise(rng);
  }
  return PointCloud(std::move(pts));
}

SyntheticDataset MakeSyntheticDataset(std::size_t per_class,
                                      std::size_t capacity, Seed seed) {
  if (per_class < 1) ThrowUsage("per_class must be at least 1");
  if (capacity < 2) ThrowUsage("capacity must be at least 2");
  SyntheticDataset data;
  data.class_names = SyntheticClassNames();
  for (std::size_t label = 0; label < data.class_names.size(); ++label) {
    for (std::size_t i = 0; i < per_class; ++i) {
      const Seed s = DeriveSeed(seed, (std::uint64_t{label} << 32) | i);
      data.samples.push_back({MakeSyntheticCloud(label, capacity, s, 0.01), label});
    }
  }
  return data;
}

DatasetSplit SplitDataset(const SyntheticDataset& data, double heldout_fraction,
                          Seed seed) {
  if (!(heldout_fraction >= 0.0 && heldout_fraction < 1.0)) {
    ThrowUsage("heldout fraction must be in [0, 1)");
  }
  DatasetSplit split;
  split.train.class_names = data.class_names;
  split.heldout.class_names = data.class_names;
  Rng rng(seed);
  for (std::size_t label = 0; label < data.class_names.size(); ++label) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
      if (data.samples[i].label == label) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    std::size_t held = static_cast<std::size_t>(
        std::llround(heldout_fraction * static_cast<double>(idx.size())));
    if (!idx.empty() && held >= idx.size()) held = idx.size() - 1;
    // Keep dataset order within each side.
    std::sort(idx.begin(), idx.begin() + held);
    std::sort(idx.begin() + held, idx.end());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      (k < held ? split.heldout : split.train).samples.push_back(data.samples[idx[k]]);
    }
  }
  return split;
}

void WriteDatasetDir(const SyntheticDataset& data, const std::string& dir,
                     std::size_t per_class, std::size_t capacity, Seed seed) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) ThrowIo("cannot create '" + dir + "': " + ec.message());

  json files = json::array();
  json counts = json::object();
  std::vector<std::size_t> next(data.class_names.size(), 0);
  for (const std::string& cls : data.class_names) {
    fs::create_directories(fs::path(dir) / cls, ec);
    if (ec) ThrowIo("cannot create '" + dir + "/" + cls + "': " + ec.message());
  }
  for (const LabeledCloud& s : data.samples) {
    const std::string& cls = data.class_names.at(s.label);
    const std::string rel = SampleFile(cls, next[s.label]++);
    WriteCloud(s.cloud, (fs::path(dir) / rel).string(), FileFormat::kXyz);
    files.push_back({{"path", rel}, {"label", s.label}});
  }
  for (std::size_t l = 0; l < data.class_names.size(); ++l) {
    counts[data.class_names[l]] = next[l];
  }
  const json manifest = {
      {"format", "dreamcloud-dataset"}, {"version", 1},
      {"seed", seed},                   {"per_class", per_class},
      {"capacity", capacity},           {"classes", data.class_names},
      {"counts", counts},               {"files", files}};
  const std::string path = (fs::path(dir) / "manifest.json").string();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowIo("cannot open '" + path + "' for writing");
  out << manifest.dump(2) << '\n';
  if (!out) ThrowIo("failed writing '" + path + "'");
}

SyntheticDataset ReadDatasetDir(const std::string& dir) {
  const std::string path = (fs::path(dir) / "manifest.json").string();
  std::ifstream in(path);
  if (!in) ThrowIo("cannot open dataset manifest '" + path + "'");
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    ThrowIo(path + ": " + e.what());
  }
  SyntheticDataset data;
  try {
    if (manifest.at("format") != "dreamcloud-dataset") {
      ThrowIo(path + ": not a dreamcloud dataset manifest");
    }
    data.class_names = manifest.at("classes").get<std::vector<std::string>>();
    for (const json& f : manifest.at("files")) {
      const auto label = f.at("label").get<std::size_t>();
      if (label >= data.class_names.size()) {
        ThrowIo(path + ": label out of range");
      }
      const auto rel = f.at("path").get<std::string>();
      data.samples.push_back(
          {ReadCloud((fs::path(dir) / rel).string(), FileFormat::kXyz), label});
    }
  } catch (const json::exception& e) {
    ThrowIo(path + ": " + e.what());
  }
  if (data.samples.empty()) ThrowIo(path + ": dataset has no samples");
  return data;
}

}  // namespace dreamcloud
