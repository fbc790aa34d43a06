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

// dreamcloud command-line front end. Talks to the library only through the
// C API in dreamcloud.h.
//
// Exit codes: 0 success, 1 usage, 2 I/O, 3 numeric/shape. Failures print one
// line to stderr: "dreamcloud: error[<kind>]: <message>".

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dreamcloud/dreamcloud.h"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Carries a status out of a command body.
struct Failure {
  dc_status status;
  std::string message;
};

void Check(dc_status status) {
  if (status != DC_OK) throw Failure{status, dc_last_error()};
}

[[noreturn]] void Usage(const std::string& message) {
  throw Failure{DC_ERR_USAGE, message};
}

struct CloudDeleter {
  void operator()(dc_cloud* c) const { dc_cloud_free(c); }
};
struct ModelDeleter {
  void operator()(dc_model* m) const { dc_model_free(m); }
};
struct MeshDeleter {
  void operator()(dc_mesh* m) const { dc_mesh_free(m); }
};
struct SegDeleter {
  void operator()(dc_segmentation* s) const { dc_segmentation_free(s); }
};
using Cloud = std::unique_ptr<dc_cloud, CloudDeleter>;
using Model = std::unique_ptr<dc_model, ModelDeleter>;
using Mesh = std::unique_ptr<dc_mesh, MeshDeleter>;
using Seg = std::unique_ptr<dc_segmentation, SegDeleter>;

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { dc_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

Cloud ReadCloud(const std::string& path) {
  dc_cloud* c = nullptr;
  Check(dc_cloud_read(path.c_str(), nullptr, &c));
  return Cloud(c);
}

Model LoadModel(const std::string& path) {
  dc_model* m = nullptr;
  Check(dc_model_load(path.c_str(), &m));
  return Model(m);
}

void WriteCloud(const dc_cloud* c, const std::string& path,
                const std::string& format) {
  Check(dc_cloud_write(c, path.c_str(), format.empty() ? nullptr : format.c_str()));
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{DC_ERR_IO, "cannot open '" + path + "' for writing"};
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
  if (!out) throw Failure{DC_ERR_IO, "failed writing '" + path + "'"};
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{DC_ERR_IO, "cannot open '" + path + "'"};
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    Usage(path + ": " + e.what());
  }
}

void MakeDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{DC_ERR_IO, "cannot create '" + dir + "': " + ec.message()};
}

// "3x3x2" or "3,3,2".
std::vector<std::size_t> ParseGrid(const std::string& text) {
  std::vector<std::size_t> dims;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == 'x' || ch == 'X' || ch == ',') {
      if (cur.empty() || cur.find_first_not_of("0123456789") != std::string::npos) {
        Usage("--grid expects NXxNYxNZ, got '" + text + "'");
      }
      dims.push_back(std::stoul(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (dims.size() != 3) Usage("--grid expects three dimensions");
  return dims;
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Segmentation spec from --k / --grid / --plane-* flags, if any were given.
struct SegmentFlags {
  std::size_t k = 4;
  std::string grid;
  std::string plane_axis = "z";
  double plane_offset = 0.5;
  std::uint64_t seed = 0;
  CLI::Option* k_opt = nullptr;
  CLI::Option* grid_opt = nullptr;
  CLI::Option* axis_opt = nullptr;
  CLI::Option* offset_opt = nullptr;

  void Add(CLI::App* cmd) {
    k_opt = cmd->add_option("--k", k, "k-means segment count");
    grid_opt = cmd->add_option("--grid", grid, "block grid, e.g. 3x3x2");
    axis_opt = cmd->add_option("--plane-axis", plane_axis, "plane split axis (x|y|z)");
    offset_opt = cmd->add_option("--plane-offset", plane_offset,
                                 "plane position as a fraction of the extent");
  }

  std::optional<json> Spec() const {
    const int given = (k_opt->count() > 0) + (grid_opt->count() > 0) +
                      (axis_opt->count() > 0 || offset_opt->count() > 0);
    if (given > 1) Usage("choose one of --k, --grid or --plane-*");
    if (k_opt->count()) return json{{"method", "kmeans"}, {"k", k}, {"seed", seed}};
    if (grid_opt->count()) return json{{"method", "grid"}, {"dims", ParseGrid(grid)}};
    if (axis_opt->count() || offset_opt->count()) {
      return json{{"method", "plane"}, {"axis", plane_axis}, {"offset", plane_offset}};
    }
    return std::nullopt;
  }
};

std::string FormatReal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-cloud dreaming against a permutation-invariant classifier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dc_version()));

  // dataset
  std::string ds_out;
  std::size_t ds_per_class = 200, ds_capacity = 1000;
  std::uint64_t ds_seed = 0;
  auto* dataset = app.add_subcommand("dataset", "Write the synthetic 8-class dataset");
  dataset->add_option("--out", ds_out, "output directory")->required();
  dataset->add_option("--per-class,--count", ds_per_class, "clouds per class");
  dataset->add_option("--capacity", ds_capacity, "points per cloud");
  dataset->add_option("--seed", ds_seed, "RNG seed");

  // train
  std::string tr_input, tr_out, tr_metrics, tr_config;
  int tr_epochs = 20;
  std::uint64_t tr_seed = 0;
  std::size_t tr_batch = 16;
  double tr_lr = 1e-3, tr_heldout = 0.2;
  auto* train = app.add_subcommand("train", "Train a classifier on a dataset directory");
  train->add_option("--input", tr_input, "dataset directory")->required();
  train->add_option("--out,--model", tr_out, "model file to write")->required();
  auto* tr_epochs_opt = train->add_option("--epochs", tr_epochs, "training epochs");
  auto* tr_seed_opt = train->add_option("--seed", tr_seed, "RNG seed");
  auto* tr_batch_opt = train->add_option("--batch-size", tr_batch, "minibatch size");
  auto* tr_lr_opt = train->add_option("--lr", tr_lr, "Adam step size");
  auto* tr_heldout_opt = train->add_option("--heldout", tr_heldout, "held-out fraction");
  train->add_option("--config", tr_config, "JSON training config");
  train->add_option("--metrics", tr_metrics, "metrics JSON (default <out>.metrics.json)");

  // classify
  std::string cl_model, cl_input;
  std::uint64_t cl_seed = 0;
  auto* classify = app.add_subcommand("classify", "Classify a point cloud");
  classify->add_option("--model", cl_model, "model file")->required();
  classify->add_option("--input", cl_input, "cloud file")->required();
  classify->add_option("--seed", cl_seed, "seed for fitting the cloud to capacity");

  // dream
  std::string dr_model, dr_config, dr_mode, dr_target, dr_out, dr_format, dr_report,
      dr_targets, dr_downsample;
  std::vector<std::string> dr_inputs;
  std::uint64_t dr_seed = 0;
  int dr_iterations = 100, dr_period = 10;
  double dr_lr = 1.0;
  bool dr_normalize = false, dr_timing = false;
  SegmentFlags dr_seg;
  auto* dream = app.add_subcommand("dream", "Dream a cloud with naive, ADD or PDD");
  auto* dr_model_opt = dream->add_option("--model", dr_model, "model file");
  auto* dr_inputs_opt = dream->add_option("--input", dr_inputs, "input cloud (repeatable)");
  dream->add_option("--config", dr_config, "JSON run config");
  auto* dr_mode_opt = dream->add_option("--mode", dr_mode, "naive | add | pdd");
  auto* dr_target_opt = dream->add_option("--target", dr_target, "target class");
  auto* dr_targets_opt =
      dream->add_option("--targets", dr_targets, "per-segment targets, comma separated");
  auto* dr_seed_opt = dream->add_option("--seed", dr_seed, "RNG seed");
  auto* dr_out_opt = dream->add_option("--out", dr_out, "output cloud file");
  auto* dr_format_opt = dream->add_option("--format", dr_format, "ply | xyz");
  auto* dr_report_opt = dream->add_option("--report", dr_report, "report JSON path");
  auto* dr_iter_opt = dream->add_option("--iterations", dr_iterations, "gradient steps");
  auto* dr_lr_opt = dream->add_option("--lr", dr_lr, "gradient step size");
  auto* dr_period_opt = dream->add_option("--period", dr_period, "amalgamation period");
  auto* dr_norm_opt = dream->add_flag("--normalize", dr_normalize, "normalize gradients");
  auto* dr_ds_opt =
      dream->add_option("--downsample", dr_downsample, "in-loop reduction: random | blue-noise");
  dream->add_flag("--timing", dr_timing, "record wall time in the report");
  dr_seg.Add(dream);

  // segment
  std::string sg_input, sg_out, sg_config, sg_format = "xyz";
  SegmentFlags sg_seg;
  auto* segment = app.add_subcommand("segment", "Split a cloud into segments");
  segment->add_option("--input", sg_input, "cloud file")->required();
  segment->add_option("--out", sg_out, "output directory")->required();
  segment->add_option("--config", sg_config, "JSON segmentation spec");
  segment->add_option("--format", sg_format, "segment file format: ply | xyz");
  segment->add_option("--seed", sg_seg.seed, "k-means seed");
  sg_seg.Add(segment);

  // sample
  std::string sa_input, sa_out, sa_format;
  std::size_t sa_count = 10000;
  std::uint64_t sa_seed = 0;
  auto* sample = app.add_subcommand("sample", "Sample points from a mesh surface");
  sample->add_option("--input", sa_input, "OFF or PLY mesh")->required();
  sample->add_option("--out", sa_out, "output cloud")->required();
  sample->add_option("--count", sa_count, "point count");
  sample->add_option("--seed", sa_seed, "RNG seed");
  sample->add_option("--format", sa_format, "ply | xyz");
  sample->add_option("--method", "uniform-area only; accepted for symmetry")
      ->check(CLI::IsMember({"uniform-area"}));

  // downsample
  std::string dn_input, dn_out, dn_format, dn_method = "blue-noise";
  std::size_t dn_count = 10000;
  std::uint64_t dn_seed = 0;
  auto* downsample = app.add_subcommand("downsample", "Reduce a cloud to a point budget");
  downsample->add_option("--input", dn_input, "cloud file")->required();
  downsample->add_option("--out", dn_out, "output cloud")->required();
  downsample->add_option("--count", dn_count, "point count");
  downsample->add_option("--method", dn_method, "random | blue-noise")
      ->check(CLI::IsMember({"random", "blue-noise"}));
  downsample->add_option("--seed", dn_seed, "RNG seed");
  downsample->add_option("--format", dn_format, "ply | xyz");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    std::cerr << "dreamcloud: error[usage]: " << msg << "\n";
    return DC_ERR_USAGE;
  }

  try {
    if (*dataset) {
      Check(dc_dataset_write(ds_out.c_str(), ds_per_class, ds_capacity, ds_seed));
      std::cout << "wrote " << ds_per_class * 8 << " clouds to " << ds_out << "\n";
    } else if (*train) {
      json cfg = tr_config.empty() ? json::object() : ReadJsonFile(tr_config);
      if (tr_epochs_opt->count()) cfg["epochs"] = tr_epochs;
      if (tr_seed_opt->count()) cfg["seed"] = tr_seed;
      if (tr_batch_opt->count()) cfg["batch_size"] = tr_batch;
      if (tr_lr_opt->count()) cfg["learning_rate"] = tr_lr;
      if (tr_heldout_opt->count()) cfg["heldout_fraction"] = tr_heldout;
      dc_model* raw = nullptr;
      OwnedString metrics;
      Check(dc_model_train(tr_input.c_str(), cfg.dump().c_str(), &raw, &metrics.ptr));
      Model model(raw);
      Check(dc_model_save(model.get(), tr_out.c_str()));
      WriteText(tr_metrics.empty() ? tr_out + ".metrics.json" : tr_metrics, metrics.str());
      const json m = json::parse(metrics.str());
      std::cout << "heldout_accuracy " << m["final_heldout_accuracy"].dump() << "\n";
    } else if (*classify) {
      Model model = LoadModel(cl_model);
      Cloud cloud = ReadCloud(cl_input);
      std::vector<double> logits(dc_model_class_count(model.get()));
      std::size_t label = 0;
      Check(dc_model_classify(model.get(), cloud.get(), cl_seed, logits.data(), &label));
      std::cout << "label " << dc_model_class_name(model.get(), label) << " " << label << "\n";
      for (std::size_t i = 0; i < logits.size(); ++i) {
        std::cout << "logit " << dc_model_class_name(model.get(), i) << " "
                  << FormatReal(logits[i]) << "\n";
      }
    } else if (*dream) {
      const auto start = std::chrono::steady_clock::now();
      json cfg = dr_config.empty() ? json::object() : ReadJsonFile(dr_config);
      if (!cfg.is_object()) Usage("run config must be a JSON object");
      if (dr_mode_opt->count()) cfg["mode"] = dr_mode;
      if (dr_target_opt->count()) cfg["target"] = dr_target;
      if (dr_targets_opt->count()) cfg["targets"] = SplitList(dr_targets);
      if (dr_seed_opt->count()) cfg["seed"] = dr_seed;
      if (dr_iter_opt->count()) cfg["iterations"] = dr_iterations;
      if (dr_lr_opt->count()) cfg["learning_rate"] = dr_lr;
      if (dr_period_opt->count()) cfg["amalgamation_period"] = dr_period;
      if (dr_norm_opt->count()) cfg["normalize_gradient"] = dr_normalize;
      if (dr_ds_opt->count()) cfg["downsample"] = dr_downsample;
      if (dr_inputs_opt->count()) cfg["inputs"] = dr_inputs;
      if (dr_model_opt->count()) cfg["model"] = dr_model;
      if (dr_out_opt->count()) cfg["output"] = dr_out;
      if (dr_format_opt->count()) cfg["format"] = dr_format;
      if (dr_report_opt->count()) cfg["report"] = dr_report;
      dr_seg.seed = cfg.value("seed", std::uint64_t{0});
      if (auto spec = dr_seg.Spec()) cfg["segmentation"] = *spec;

      const auto inputs = cfg.value("inputs", std::vector<std::string>{});
      const auto model_path = cfg.value("model", std::string{});
      const auto out_path = cfg.value("output", std::string{});
      if (inputs.empty()) Usage("dream needs at least one --input");
      if (model_path.empty()) Usage("dream needs --model");
      if (out_path.empty()) Usage("dream needs --out");
      std::string report_path = cfg.value("report", std::string{});
      if (report_path.empty()) report_path = out_path + ".report.json";

      Model model = LoadModel(model_path);
      std::vector<Cloud> clouds;
      std::vector<const dc_cloud*> handles;
      for (const auto& p : inputs) {
        clouds.push_back(ReadCloud(p));
        handles.push_back(clouds.back().get());
      }
      dc_cloud* raw = nullptr;
      OwnedString report;
      Check(dc_dream(model.get(), handles.data(), handles.size(), cfg.dump().c_str(), &raw,
                     &report.ptr));
      Cloud result(raw);
      WriteCloud(result.get(), out_path, cfg.value("format", std::string{}));
      json rep = json::parse(report.str());
      if (dr_timing) rep["timing_seconds"] = Seconds(start);
      WriteText(report_path, rep.dump(2));
      std::cout << "wrote " << dc_cloud_size(result.get()) << " points to " << out_path << "\n";
    } else if (*segment) {
      json spec;
      if (!sg_config.empty()) spec = ReadJsonFile(sg_config);
      if (auto flags = sg_seg.Spec()) {
        if (!spec.is_null()) Usage("give either --config or segmentation flags");
        spec = *flags;
      }
      if (spec.is_null()) Usage("segment needs --k, --grid, --plane-* or --config");
      Cloud cloud = ReadCloud(sg_input);
      dc_segmentation* raw = nullptr;
      Check(dc_segment(cloud.get(), spec.dump().c_str(), &raw));
      Seg seg(raw);
      MakeDir(sg_out);
      const std::size_t count = dc_segmentation_count(seg.get());
      for (std::size_t i = 0; i < count; ++i) {
        dc_cloud* part = nullptr;
        Check(dc_segmentation_extract(seg.get(), cloud.get(), i, &part));
        Cloud owned(part);
        char name[32];
        std::snprintf(name, sizeof name, "segment_%02zu.%s", i, sg_format.c_str());
        WriteCloud(owned.get(), (fs::path(sg_out) / name).string(), sg_format);
      }
      Check(dc_segmentation_write_preview(seg.get(), cloud.get(),
                                          (fs::path(sg_out) / "preview.ply").string().c_str()));
      std::cout << "wrote " << count << " segments to " << sg_out << "\n";
    } else if (*sample) {
      dc_mesh* raw_mesh = nullptr;
      Check(dc_mesh_read(sa_input.c_str(), &raw_mesh));
      Mesh mesh(raw_mesh);
      dc_cloud* raw = nullptr;
      Check(dc_mesh_sample(mesh.get(), sa_count, sa_seed, &raw));
      Cloud cloud(raw);
      WriteCloud(cloud.get(), sa_out, sa_format);
      std::cout << "wrote " << sa_count << " points to " << sa_out << "\n";
    } else if (*downsample) {
      Cloud cloud = ReadCloud(dn_input);
      dc_cloud* raw = nullptr;
      Check(dc_cloud_downsample(cloud.get(), dn_count, dn_method.c_str(), dn_seed, &raw));
      Cloud result(raw);
      WriteCloud(result.get(), dn_out, dn_format);
      std::cout << "wrote " << dn_count << " points to " << dn_out << "\n";
    }
  } catch (const Failure& f) {
    static const char* kinds[] = {"ok", "usage", "io", "numeric"};
    std::string msg = f.message;
    for (char& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    std::cerr << "dreamcloud: error[" << kinds[f.status] << "]: " << msg << "\n";
    return f.status;
  } catch (const json::exception& e) {
    std::cerr << "dreamcloud: error[usage]: " << e.what() << "\n";
    return DC_ERR_USAGE;
  }
  return 0;
}
