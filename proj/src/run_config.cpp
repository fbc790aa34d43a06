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

#include "dreamcloud/run_config.hpp"

#include <set>
#include <string>

#include "dreamcloud/error.hpp"
#include "dreamcloud/random.hpp"

namespace dreamcloud {
namespace {

using nlohmann::json;

void RejectUnknown(const json& j, const std::set<std::string>& allowed,
                   const std::string& where) {
  if (!j.is_object()) ThrowUsage(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) ThrowUsage("unknown " + where + " key '" + key + "'");
  }
}

template <typename T>
T Field(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    ThrowUsage(where + " key '" + key + "' has the wrong type");
  }
}

template <typename T>
void Maybe(const json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key) && !j.at(key).is_null()) out = Field<T>(j, key, where);
}

// Class references may be names or indices.
std::string TargetString(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return std::to_string(v.get<std::int64_t>());
  }
  ThrowUsage("targets must be class names or non-negative indices");
}

int AxisIndex(const json& v) {
  if (v.is_number_unsigned() && v.get<unsigned>() < 3) return v.get<int>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "x") return 0;
    if (s == "y") return 1;
    if (s == "z") return 2;
  }
  ThrowUsage("plane axis must be x, y, z or 0..2");
}

const char* AxisName(int axis) { return axis == 0 ? "x" : axis == 1 ? "y" : "z"; }

}  // namespace

SegmentMethod ParseSegmentMethod(const json& j) {
  if (!j.is_object() || !j.contains("method")) {
    ThrowUsage("segmentation needs a 'method'");
  }
  const auto method = Field<std::string>(j, "method", "segmentation");
  const std::string where = "segmentation";
  if (method == "kmeans") {
    RejectUnknown(j, {"method", "k", "max_iters", "tol", "restarts", "seed"}, where);
    KMeansSpec s;
    Maybe(j, "k", s.params.k, where);
    Maybe(j, "max_iters", s.params.max_iters, where);
    Maybe(j, "tol", s.params.tol, where);
    Maybe(j, "restarts", s.params.restarts, where);
    Maybe(j, "seed", s.params.seed, where);
    if (s.params.k < 1) ThrowUsage("k must be at least 1");
    return s;
  }
  if (method == "plane") {
    RejectUnknown(j, {"method", "axis", "offset"}, where);
    PlaneSpec s;
    if (j.contains("axis")) s.axis = AxisIndex(j.at("axis"));
    Maybe(j, "offset", s.offset_fraction, where);
    return s;
  }
  if (method == "grid") {
    RejectUnknown(j, {"method", "dims"}, where);
    const auto dims = Field<std::vector<std::size_t>>(j, "dims", where);
    if (dims.size() != 3) ThrowUsage("grid dims must have 3 entries");
    return GridSpec{dims[0], dims[1], dims[2]};
  }
  if (method == "manual") {
    RejectUnknown(j, {"method", "segments"}, where);
    return ManualSpec{Field<std::vector<std::vector<std::size_t>>>(j, "segments", where)};
  }
  ThrowUsage("unknown segmentation method '" + method + "'");
}

json ToJson(const SegmentMethod& method) {
  struct Visitor {
    json operator()(const KMeansSpec& s) const {
      return {{"method", "kmeans"},         {"k", s.params.k},
              {"max_iters", s.params.max_iters}, {"tol", s.params.tol},
              {"restarts", s.params.restarts},   {"seed", s.params.seed}};
    }
    json operator()(const PlaneSpec& s) const {
      return {{"method", "plane"}, {"axis", AxisName(s.axis)},
              {"offset", s.offset_fraction}};
    }
    json operator()(const GridSpec& s) const {
      return {{"method", "grid"}, {"dims", {s.nx, s.ny, s.nz}}};
    }
    json operator()(const ManualSpec& s) const {
      return {{"method", "manual"}, {"segments", s.lists}};
    }
  };
  return std::visit(Visitor{}, method);
}

RunConfig ParseRunConfig(const json& j) {
  const std::string where = "run config";
  RejectUnknown(j,
                {"mode", "target", "learning_rate", "iterations",
                 "amalgamation_period", "seed", "normalize_gradient",
                 "downsample", "threads", "standardize_input", "segmentation",
                 "targets", "inputs", "model", "output", "report", "format"},
                where);
  RunConfig cfg;
  Maybe(j, "mode", cfg.mode, where);
  if (cfg.mode != "naive" && cfg.mode != "add" && cfg.mode != "pdd") {
    ThrowUsage("mode must be naive, add or pdd");
  }
  if (j.contains("target") && !j.at("target").is_null()) {
    cfg.target = TargetString(j.at("target"));
  }
  Maybe(j, "learning_rate", cfg.dream.learning_rate, where);
  Maybe(j, "iterations", cfg.dream.iterations, where);
  Maybe(j, "amalgamation_period", cfg.dream.amalgamation_period, where);
  Maybe(j, "seed", cfg.dream.seed, where);
  Maybe(j, "normalize_gradient", cfg.dream.normalize_gradient, where);
  Maybe(j, "threads", cfg.dream.threads, where);
  if (j.contains("downsample")) {
    cfg.dream.downsample = ParseSampleMethod(Field<std::string>(j, "downsample", where));
    if (cfg.dream.downsample == SampleMethod::kUniformArea) {
      ThrowUsage("downsample must be random or blue-noise");
    }
  }
  Maybe(j, "standardize_input", cfg.standardize_input, where);
  if (j.contains("segmentation") && !j.at("segmentation").is_null()) {
    cfg.segmentation = ParseSegmentMethod(j.at("segmentation"));
  }
  if (j.contains("targets")) {
    const json& t = j.at("targets");
    if (t.is_array()) {
      for (const json& v : t) cfg.targets.push_back(TargetString(v));
    } else {
      cfg.targets.push_back(TargetString(t));
    }
  }
  Maybe(j, "inputs", cfg.inputs, where);
  Maybe(j, "model", cfg.model, where);
  Maybe(j, "output", cfg.output, where);
  Maybe(j, "report", cfg.report, where);
  Maybe(j, "format", cfg.format, where);

  if (!(cfg.dream.learning_rate > 0.0)) ThrowUsage("learning_rate must be positive");
  if (cfg.dream.iterations < 0) ThrowUsage("iterations must be >= 0");
  if (cfg.dream.amalgamation_period < 1) ThrowUsage("amalgamation_period must be >= 1");
  return cfg;
}

RunConfig ParseRunConfig(const json& base, const json& overrides) {
  json merged = base.is_null() ? json::object() : base;
  if (!merged.is_object()) ThrowUsage("run config must be a JSON object");
  if (!overrides.is_null()) {
    for (const auto& [key, value] : overrides.items()) merged[key] = value;
  }
  return ParseRunConfig(merged);
}

json ToJson(const RunConfig& cfg) {
  json j = {{"mode", cfg.mode},
            {"target", cfg.target},
            {"learning_rate", cfg.dream.learning_rate},
            {"iterations", cfg.dream.iterations},
            {"amalgamation_period", cfg.dream.amalgamation_period},
            {"seed", cfg.dream.seed},
            {"normalize_gradient", cfg.dream.normalize_gradient},
            {"downsample", SampleMethodName(cfg.dream.downsample)},
            {"threads", cfg.dream.threads},
            {"standardize_input", cfg.standardize_input},
            {"segmentation", nullptr},
            {"targets", cfg.targets},
            {"inputs", cfg.inputs},
            {"model", cfg.model},
            {"output", cfg.output},
            {"report", cfg.report},
            {"format", cfg.format}};
  if (cfg.segmentation) j["segmentation"] = ToJson(*cfg.segmentation);
  return j;
}

TrainRequest ParseTrainRequest(const json& j) {
  const std::string where = "train config";
  TrainRequest req;
  if (j.is_null()) return req;
  RejectUnknown(j,
                {"epochs", "batch_size", "learning_rate", "cosine_decay", "beta1",
                 "beta2", "epsilon", "seed", "heldout_fraction"},
                where);
  Maybe(j, "epochs", req.train.epochs, where);
  Maybe(j, "batch_size", req.train.batch_size, where);
  Maybe(j, "learning_rate", req.train.learning_rate, where);
  Maybe(j, "cosine_decay", req.train.cosine_decay, where);
  Maybe(j, "beta1", req.train.beta1, where);
  Maybe(j, "beta2", req.train.beta2, where);
  Maybe(j, "epsilon", req.train.epsilon, where);
  Maybe(j, "seed", req.train.seed, where);
  Maybe(j, "heldout_fraction", req.heldout_fraction, where);
  return req;
}

json ToJson(const TrainRequest& req) {
  return {{"epochs", req.train.epochs},       {"batch_size", req.train.batch_size},
          {"learning_rate", req.train.learning_rate},
          {"cosine_decay", req.train.cosine_decay},
          {"beta1", req.train.beta1},         {"beta2", req.train.beta2},
          {"epsilon", req.train.epsilon},     {"seed", req.train.seed},
          {"heldout_fraction", req.heldout_fraction}};
}

json ToJson(const SparsityReport& r) {
  return {{"k", r.k}, {"count", r.count}, {"mean_knn", r.mean_knn},
          {"max_knn", r.max_knn}};
}

TrainOutcome TrainOnDataset(const SyntheticDataset& data, std::size_t capacity,
                            const TrainRequest& req) {
  const DatasetSplit split = SplitDataset(data, req.heldout_fraction,
                                          DeriveSeed(req.train.seed, 1));
  const SetNetModel init = SetNetModel::Initialized(capacity, data.class_names,
                                                    DeriveSeed(req.train.seed, 2));
  TrainOutcome out;
  out.result = Train(init, split.train, req.train,
                     split.heldout.samples.empty() ? nullptr : &split.heldout);
  json epochs = json::array();
  for (const EpochStats& e : out.result.trace) {
    json row = {{"epoch", e.epoch},
                {"loss", e.loss},
                {"train_accuracy", e.train_accuracy}};
    row["heldout_accuracy"] =
        e.heldout_accuracy < 0.0 ? json(nullptr) : json(e.heldout_accuracy);
    epochs.push_back(row);
  }
  out.metrics = {{"format", "dreamcloud-metrics"},
                 {"version", 1},
                 {"config", ToJson(req)},
                 {"capacity", capacity},
                 {"classes", data.class_names},
                 {"train_count", split.train.samples.size()},
                 {"heldout_count", split.heldout.samples.size()},
                 {"epochs", epochs}};
  if (split.heldout.samples.empty()) {
    out.metrics["final_heldout_accuracy"] = nullptr;
  } else {
    out.metrics["final_heldout_accuracy"] = Accuracy(out.result.model, split.heldout);
  }
  return out;
}

std::size_t ResolveClass(const SetNetModel& model, const std::string& name) {
  if (name.empty()) ThrowUsage("no target class given");
  const auto& names = model.class_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  if (name.find_first_not_of("0123456789") == std::string::npos) {
    const auto index = std::stoull(name);
    if (index < model.num_classes()) return index;
  }
  ThrowUsage("unknown target class '" + name + "'");
}

SegmentTarget ResolveSegmentTarget(const SetNetModel& model,
                                   const std::string& name) {
  if (name == "keep") return SegmentTarget::Keep();
  if (name == "random") return SegmentTarget::Random();
  return SegmentTarget::Class(ResolveClass(model, name));
}

RunOutcome ExecuteDream(const SetNetModel& model,
                        std::span<const PointCloud> inputs,
                        const RunConfig& cfg) {
  if (inputs.empty()) ThrowUsage("no input clouds");
  const PointCloud x = Union(inputs);
  if (x.empty()) ThrowNumeric("empty input");

  DreamConfig dream = cfg.dream;
  RunOutcome out;
  json& report = out.report;
  report = {{"format", "dreamcloud-report"}, {"version", 1},
            {"config", ToJson(cfg)},         {"mode", cfg.mode},
            {"input_count", x.size()},       {"input_clouds", inputs.size()},
            {"capacity", model.capacity()}};

  auto subsets_json = [](const std::vector<SubsetTrace>& traces) {
    json arr = json::array();
    for (const SubsetTrace& t : traces) {
      arr.push_back({{"initial_logit", t.initial_logit},
                     {"final_logit", t.final_logit}});
    }
    return arr;
  };

  if (cfg.mode == "naive" || cfg.mode == "add") {
    dream.target = ResolveClass(model, cfg.target);
    report["target"] = {{"index", dream.target},
                        {"name", model.class_names()[dream.target]}};
    std::optional<StandardizedCloud> std_x;
    if (cfg.standardize_input) std_x = Standardize(x);
    const PointCloud& work = std_x ? std_x->cloud : x;
    DreamResult r = cfg.mode == "naive" ? NaiveDream(model, work, dream)
                                        : Add(model, work, dream);
    out.cloud = std_x ? Recover(r.cloud, std_x->transform) : std::move(r.cloud);
    report["subsets"] = subsets_json(r.subsets);
    if (std_x) {
      report["standardization"] = {{"centroid", std_x->transform.centroid},
                                   {"scale", std_x->transform.scale}};
    }
  } else {
    if (!cfg.segmentation) ThrowUsage("pdd mode needs a segmentation");
    std::vector<std::string> names = cfg.targets;
    if (names.empty()) names.push_back(cfg.target);
    std::vector<SegmentTarget> targets;
    for (const std::string& n : names) targets.push_back(ResolveSegmentTarget(model, n));
    PddResult r = Pdd(model, x, *cfg.segmentation, targets, dream);
    json segments = json::array();
    for (const SegmentOutcome& s : r.segments) {
      json row = {{"input_count", s.input_count},
                  {"output_count", s.output_count},
                  {"kept", s.kept}};
      if (!s.kept) {
        row["target"] = {{"index", s.target}, {"name", model.class_names()[s.target]}};
        row["standardization"] = {{"centroid", s.transform.centroid},
                                  {"scale", s.transform.scale}};
        row["subsets"] = subsets_json(s.subsets);
      }
      segments.push_back(row);
    }
    report["segments"] = segments;
    out.cloud = std::move(r.cloud);
  }

  report["output_count"] = out.cloud.size();
  constexpr std::size_t kNeighbors = 8;
  report["sparsity"] = {
      {"before", x.size() > kNeighbors ? ToJson(Sparsity(x, kNeighbors)) : json(nullptr)},
      {"after", out.cloud.size() > kNeighbors ? ToJson(Sparsity(out.cloud, kNeighbors))
                                              : json(nullptr)}};
  return out;
}

}  // namespace dreamcloud
