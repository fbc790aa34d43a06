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

#include "dreamcloud/dreamcloud.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "dreamcloud/dataset.hpp"
#include "dreamcloud/error.hpp"
#include "dreamcloud/io.hpp"
#include "dreamcloud/run_config.hpp"
#include "dreamcloud/sampling.hpp"

struct dc_cloud {
  dreamcloud::PointCloud cloud;
};
struct dc_mesh {
  dreamcloud::TriangleMesh mesh;
};
struct dc_model {
  dreamcloud::SetNetModel model;
};
struct dc_segmentation {
  dreamcloud::Segmentation seg;
};

namespace {

using namespace dreamcloud;

static_assert(sizeof(Point) == 3 * sizeof(double));

thread_local std::string g_last_error;

dc_status Fail(dc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
dc_status Guard(Fn&& fn) {
  try {
    fn();
    return DC_OK;
  } catch (const Error& e) {
    return Fail(static_cast<dc_status>(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return Fail(DC_ERR_USAGE, std::string("invalid JSON: ") + e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return Fail(DC_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(DC_ERR_NUMERIC, "out of memory");
  } catch (const std::exception& e) {
    return Fail(DC_ERR_NUMERIC, e.what());
  } catch (...) {
    return Fail(DC_ERR_NUMERIC, "unknown error");
  }
}

void Require(const void* p, const char* what) {
  if (!p) ThrowUsage(std::string(what) + " must not be null");
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json ParseJson(const char* text) {
  if (!text || !*text) return nlohmann::json(nullptr);
  return nlohmann::json::parse(text);
}

FileFormat FormatFor(const char* path, const char* format) {
  return format ? ParseFileFormat(format) : FormatFromPath(path);
}

constexpr Rgb kPalette[18] = {
    {230, 25, 75},   {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
    {245, 130, 48},  {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
    {210, 245, 60},  {250, 190, 212}, {0, 128, 128},  {220, 190, 255},
    {170, 110, 40},  {255, 250, 200}, {128, 0, 0},    {170, 255, 195},
    {128, 128, 0},   {0, 0, 128}};

}  // namespace

extern "C" {

const char* dc_version(void) { return "1.0.0"; }

const char* dc_last_error(void) { return g_last_error.c_str(); }

void dc_string_free(char* s) { std::free(s); }

dc_status dc_cloud_create(const double* xyz, size_t count, dc_cloud** out) {
  return Guard([&] {
    Require(out, "out");
    if (count > 0) Require(xyz, "xyz");
    std::vector<Point> pts(count);
    for (size_t i = 0; i < count; ++i) {
      pts[i] = {xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]};
    }
    *out = new dc_cloud{PointCloud(std::move(pts))};
  });
}

void dc_cloud_free(dc_cloud* cloud) { delete cloud; }

size_t dc_cloud_size(const dc_cloud* cloud) { return cloud ? cloud->cloud.size() : 0; }

const double* dc_cloud_data(const dc_cloud* cloud) {
  if (!cloud || cloud->cloud.empty()) return nullptr;
  return cloud->cloud.vec().front().data();
}

dc_status dc_cloud_union(const dc_cloud* a, const dc_cloud* b, dc_cloud** out) {
  return Guard([&] {
    Require(a, "a");
    Require(b, "b");
    Require(out, "out");
    *out = new dc_cloud{Union(a->cloud, b->cloud)};
  });
}

dc_status dc_cloud_read(const char* path, const char* format, dc_cloud** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = new dc_cloud{ReadCloud(path, FormatFor(path, format))};
  });
}

dc_status dc_cloud_write(const dc_cloud* cloud, const char* path,
                         const char* format) {
  return Guard([&] {
    Require(cloud, "cloud");
    Require(path, "path");
    WriteCloud(cloud->cloud, path, FormatFor(path, format));
  });
}

dc_status dc_cloud_downsample(const dc_cloud* cloud, size_t count,
                              const char* method, uint64_t seed, dc_cloud** out) {
  return Guard([&] {
    Require(cloud, "cloud");
    Require(out, "out");
    const SampleMethod m = method ? ParseSampleMethod(method) : SampleMethod::kBlueNoise;
    *out = new dc_cloud{Downsample(cloud->cloud, count, m, seed)};
  });
}

dc_status dc_cloud_sparsity(const dc_cloud* cloud, size_t k, double* mean_knn,
                            double* max_knn) {
  return Guard([&] {
    Require(cloud, "cloud");
    const SparsityReport r = Sparsity(cloud->cloud, k);
    if (mean_knn) *mean_knn = r.mean_knn;
    if (max_knn) *max_knn = r.max_knn;
  });
}

dc_status dc_mesh_read(const char* path, dc_mesh** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = new dc_mesh{ReadMesh(path)};
  });
}

void dc_mesh_free(dc_mesh* mesh) { delete mesh; }

size_t dc_mesh_face_count(const dc_mesh* mesh) {
  return mesh ? mesh->mesh.faces().size() : 0;
}

dc_status dc_mesh_sample(const dc_mesh* mesh, size_t count, uint64_t seed,
                         dc_cloud** out) {
  return Guard([&] {
    Require(mesh, "mesh");
    Require(out, "out");
    *out = new dc_cloud{SampleSurface(mesh->mesh, count, seed)};
  });
}

dc_status dc_dataset_write(const char* dir, size_t per_class, size_t capacity,
                           uint64_t seed) {
  return Guard([&] {
    Require(dir, "dir");
    const SyntheticDataset data = MakeSyntheticDataset(per_class, capacity, seed);
    WriteDatasetDir(data, dir, per_class, capacity, seed);
  });
}

dc_status dc_model_load(const char* path, dc_model** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = new dc_model{LoadModel(std::string(path))};
  });
}

dc_status dc_model_save(const dc_model* model, const char* path) {
  return Guard([&] {
    Require(model, "model");
    Require(path, "path");
    SaveModel(model->model, std::string(path));
  });
}

void dc_model_free(dc_model* model) { delete model; }

size_t dc_model_capacity(const dc_model* model) {
  return model ? model->model.capacity() : 0;
}

size_t dc_model_class_count(const dc_model* model) {
  return model ? model->model.num_classes() : 0;
}

const char* dc_model_class_name(const dc_model* model, size_t index) {
  if (!model || index >= model->model.num_classes()) return nullptr;
  return model->model.class_names()[index].c_str();
}

dc_status dc_model_train(const char* dataset_dir, const char* config_json,
                         dc_model** out, char** metrics_json) {
  return Guard([&] {
    Require(dataset_dir, "dataset_dir");
    Require(out, "out");
    const TrainRequest req = ParseTrainRequest(ParseJson(config_json));
    const SyntheticDataset data = ReadDatasetDir(dataset_dir);
    if (data.samples.empty()) ThrowUsage("dataset has no samples");
    const std::size_t capacity = data.samples.front().cloud.size();
    TrainOutcome trained = TrainOnDataset(data, capacity, req);
    std::string metrics = trained.metrics.dump(2);
    if (metrics_json) *metrics_json = CopyString(metrics);
    *out = new dc_model{std::move(trained.result.model)};
  });
}

dc_status dc_model_classify(const dc_model* model, const dc_cloud* cloud,
                            uint64_t seed, double* logits, size_t* label) {
  return Guard([&] {
    Require(model, "model");
    Require(cloud, "cloud");
    const PointCloud fitted =
        FitToCount(Standardize(cloud->cloud).cloud, model->model.capacity(), seed);
    const Logits z = model->model.Forward(fitted);
    if (logits) std::copy(z.scores.begin(), z.scores.end(), logits);
    if (label) *label = z.Argmax();
  });
}

dc_status dc_dream(const dc_model* model, const dc_cloud* const* inputs,
                   size_t input_count, const char* config_json, dc_cloud** out,
                   char** report_json) {
  return Guard([&] {
    Require(model, "model");
    Require(out, "out");
    if (input_count > 0) Require(inputs, "inputs");
    std::vector<PointCloud> clouds;
    for (size_t i = 0; i < input_count; ++i) {
      Require(inputs[i], "input cloud");
      clouds.push_back(inputs[i]->cloud);
    }
    const RunConfig cfg = ParseRunConfig(ParseJson(config_json), nullptr);
    RunOutcome run = ExecuteDream(model->model, clouds, cfg);
    std::string report = run.report.dump(2);
    if (report_json) *report_json = CopyString(report);
    *out = new dc_cloud{std::move(run.cloud)};
  });
}

dc_status dc_segment(const dc_cloud* cloud, const char* spec_json,
                     dc_segmentation** out) {
  return Guard([&] {
    Require(cloud, "cloud");
    Require(spec_json, "spec_json");
    Require(out, "out");
    const SegmentMethod method = ParseSegmentMethod(ParseJson(spec_json));
    *out = new dc_segmentation{Segment(cloud->cloud, method)};
  });
}

void dc_segmentation_free(dc_segmentation* seg) { delete seg; }

size_t dc_segmentation_count(const dc_segmentation* seg) {
  return seg ? seg->seg.count : 0;
}

const size_t* dc_segmentation_assignment(const dc_segmentation* seg) {
  return seg ? seg->seg.assignment.data() : nullptr;
}

dc_status dc_segmentation_extract(const dc_segmentation* seg,
                                  const dc_cloud* cloud, size_t index,
                                  dc_cloud** out) {
  return Guard([&] {
    Require(seg, "segmentation");
    Require(cloud, "cloud");
    Require(out, "out");
    if (seg->seg.assignment.size() != cloud->cloud.size()) {
      ThrowUsage("segmentation does not match the cloud size");
    }
    if (index >= seg->seg.count) ThrowUsage("segment index out of range");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < seg->seg.assignment.size(); ++i) {
      if (seg->seg.assignment[i] == index) idx.push_back(i);
    }
    *out = new dc_cloud{Gather(cloud->cloud, idx)};
  });
}

dc_status dc_segmentation_write_preview(const dc_segmentation* seg,
                                        const dc_cloud* cloud, const char* path) {
  return Guard([&] {
    Require(seg, "segmentation");
    Require(cloud, "cloud");
    Require(path, "path");
    if (seg->seg.assignment.size() != cloud->cloud.size()) {
      ThrowUsage("segmentation does not match the cloud size");
    }
    std::vector<Rgb> colors;
    colors.reserve(cloud->cloud.size());
    for (std::size_t a : seg->seg.assignment) colors.push_back(kPalette[a % 18]);
    WriteColoredPly(cloud->cloud, colors, path);
  });
}

}  // extern "C"
