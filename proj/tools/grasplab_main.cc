/*
 * Copyright 2026 The Grasplab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// grasplab: annotate objects and scenes, simplify annotations, corrupt and
// repair depth, maintain the feature bank, propose and evaluate grasps.
//
// Every subcommand prints one JSON line to stdout. Exit status is 0 on
// success, 2 for unreadable or malformed input and 3 when an input file
// parses but breaks an invariant.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "grasplab/config.h"
#include "grasplab/depth_repair.h"
#include "grasplab/evaluator.h"
#include "grasplab/feature_enhancer.h"
#include "grasplab/gann_io.h"
#include "grasplab/image_io.h"
#include "grasplab/io_util.h"
#include "grasplab/object_annotator.h"
#include "grasplab/ply_io.h"
#include "grasplab/scene_annotator.h"
#include "grasplab/simplifier.h"
#include "json.hpp"
#include "scene_file.h"

namespace grasplab {
namespace {

using Json = nlohmann::ordered_json;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::vector<std::string> overrides;
  std::string dump_config;
};

void AddCommon(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Configuration file");
  cmd->add_option("--seed", o.seed, "Root seed (overrides the config)");
  cmd->add_option("--output,-o", o.output, "Output path");
  cmd->add_option("--set", o.overrides, "Override a config value: section.key=value");
  cmd->add_option("--dump-config", o.dump_config,
                  "Write the effective configuration to this path");
}

PipelineConfig BaseConfig(const CommonOptions& o) {
  PipelineConfig config = o.config.empty() ? PipelineConfig{} : LoadConfig(o.config);
  for (const std::string& kv : o.overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    }
    ApplyOverride(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) config.seed = *o.seed;
  return config;
}

void Finish(PipelineConfig& config, const CommonOptions& o) {
  config.Validate();
  if (!o.dump_config.empty()) WriteFileBytes(o.dump_config, SerializeConfig(config));
}

Json Header(const std::string& command, const PipelineConfig& config) {
  Json j;
  j["command"] = command;
  j["status"] = "ok";
  j["seed"] = config.seed;
  j["stage_seed"] = StageSeed(config.seed, command);
  return j;
}

std::string RequireOutput(const CommonOptions& o, const char* command) {
  if (o.output.empty()) {
    throw std::invalid_argument(std::string(command) + ": --output is required");
  }
  return o.output;
}

std::string Number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Json MuKeyed(std::span<const double> mu, std::span<const double> values) {
  Json j = Json::object();
  for (std::size_t i = 0; i < mu.size(); ++i) j[Number(mu[i])] = values[i];
  return j;
}

CameraIntrinsics LoadIntrinsics(const std::string& path) {
  try {
    return IntrinsicsFromJson(nlohmann::json::parse(ReadFileBytes(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("intrinsics '" + path + "': " + e.what());
  }
}

// PGM depth carries no intrinsics; without a file a centred unit-focal
// camera is assumed, which only matters for back-projection.
DepthMap LoadDepth(const std::string& path, const std::string& intrinsics_path) {
  const bool pgm = path.size() >= 4 && path.compare(path.size() - 4, 4, ".pgm") == 0;
  if (!pgm) return ReadDepthRaw(path);
  if (!intrinsics_path.empty()) {
    DepthMap d = ReadDepthPgm(path, LoadIntrinsics(intrinsics_path));
    if (d.width != d.intrinsics.width || d.height != d.intrinsics.height) {
      throw FormatError("depth '" + path + "': size differs from the intrinsics");
    }
    return d;
  }
  DepthMap d = ReadDepthPgm(path, CameraIntrinsics{});
  d.intrinsics = {1.0, 1.0, 0.5 * d.width, 0.5 * d.height, d.width, d.height};
  return d;
}

std::size_t ValidPixels(const DepthMap& d) {
  return static_cast<std::size_t>(
      std::count_if(d.values.begin(), d.values.end(), [](float v) { return v > 0.0f; }));
}

// ---------------------------------------------------------------- annotate

struct AnnotateOptions {
  CommonOptions common;
  std::string input;
  std::optional<int> views;
  std::optional<int> angles;
  std::optional<int> depths;
  std::optional<double> voxel;
  std::string id;
};

Json RunAnnotate(const AnnotateOptions& o) {
  PipelineConfig config = BaseConfig(o.common);
  if (o.views) config.view_count = *o.views;
  if (o.angles) config.gripper.angle_count = *o.angles;
  if (o.depths) {
    if (*o.depths < 1 || *o.depths > config.gripper.depth_count()) {
      throw std::invalid_argument("--depths must be in [1, " +
                                  std::to_string(config.gripper.depth_count()) + "]");
    }
    config.gripper.depth_grid.resize(*o.depths);
  }
  if (o.voxel) config.voxel = *o.voxel;
  Finish(config, o.common);
  const std::string output = RequireOutput(o.common, "annotate");

  ObjectModel model;
  model.id = o.id.empty() ? std::filesystem::path(o.input).stem().string() : o.id;
  model.surface = ReadPly(o.input);
  model.Validate();

  const auto start = std::chrono::steady_clock::now();
  const AnnotationTensor tensor = AnnotateObject(model, config.Annotation());
  const double elapsed = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start).count();
  WriteGann(output, tensor);

  const std::size_t positives = static_cast<std::size_t>(std::count_if(
      tensor.scores.begin(), tensor.scores.end(), [](float s) { return s > 0.0f; }));
  Json j = Header("annotate", config);
  j["input"] = o.input;
  j["output"] = output;
  j["id"] = model.id;
  j["surface_points"] = model.surface.size();
  j["points"] = tensor.point_count();
  j["views"] = tensor.view_count();
  j["angles"] = tensor.angle_count();
  j["depths"] = tensor.depth_count();
  j["candidates_per_point"] = tensor.candidates_per_point();
  j["candidates"] = tensor.scores.size();
  j["positives"] = positives;
  j["elapsed_ms"] = elapsed;
  return j;
}

// ------------------------------------------------------------------- scene

struct SceneOptions {
  CommonOptions common;
  std::string input;
  int limit = kTopGrasps;
  double min_score = 0.0;
};

std::string ViewGraspnessCsv(const SceneGroundTruth& gt,
                             const SupervisionTargets& targets) {
  std::string out = "point,object,x,y,z,graspness";
  for (int v = 0; v < targets.view_count; ++v) out += ",v" + std::to_string(v);
  out += "\n";
  std::size_t row = 0;
  for (const ObjectCandidates& c : gt.annotations) {
    for (int i = 0; i < c.tensor.point_count(); ++i, ++row) {
      const Vec3& p = targets.grasp_points[row];
      out += std::to_string(row) + "," + c.pose.object_id + "," + Number(p.x()) +
             "," + Number(p.y()) + "," + Number(p.z()) + "," +
             Number(targets.point_graspness[row]);
      for (int v = 0; v < targets.view_count; ++v) {
        out += "," + Number(targets.view_graspness[row * targets.view_count + v]);
      }
      out += "\n";
    }
  }
  return out;
}

Json RunScene(const SceneOptions& o) {
  PipelineConfig config = BaseConfig(o.common);
  Finish(config, o.common);
  const std::filesystem::path dir = RequireOutput(o.common, "scene");
  if (o.limit < 0) throw std::invalid_argument("--limit must be >= 0");

  const SceneFile scene = ParseSceneFile(o.input);
  const LoadedScene loaded = LoadScene(scene, true, config.gripper);
  const SceneGroundTruth& gt = loaded.ground_truth;
  const DepthMap depth = SceneDepth(scene, gt);
  const SupervisionTargets targets = RenderSupervision(gt, depth);

  std::filesystem::create_directories(dir / "annotations");
  Json objects = Json::array();
  std::size_t candidates = 0, collided = 0, positives = 0;
  for (const ObjectCandidates& c : gt.annotations) {
    const std::string file = "annotations/" + c.pose.object_id + ".gann";
    WriteGann((dir / file).string(), c.tensor);
    const std::size_t hit = static_cast<std::size_t>(
        std::count(c.collided.begin(), c.collided.end(), std::uint8_t{1}));
    const std::size_t pos = static_cast<std::size_t>(std::count_if(
        c.tensor.scores.begin(), c.tensor.scores.end(), [](float s) { return s > 0.0f; }));
    candidates += c.tensor.scores.size();
    collided += hit;
    positives += pos;
    Json jo;
    jo["id"] = c.pose.object_id;
    jo["annotation"] = file;
    jo["points"] = c.tensor.point_count();
    jo["candidates"] = c.tensor.scores.size();
    jo["collided"] = hit;
    jo["positives"] = pos;
    const nlohmann::json pose = TransformToJson(c.pose.transform);
    jo["rotation"] = pose["rotation"];
    jo["translation"] = pose["translation"];
    objects.push_back(std::move(jo));
  }
  WriteHeatmapPgm((dir / "heatmap.pgm").string(), targets.width, targets.height,
                  targets.graspness_heatmap);
  WriteMaskPgm((dir / "mask.pgm").string(), targets.width, targets.height,
               targets.object_mask);
  WriteFileBytes((dir / "view_graspness.csv").string(), ViewGraspnessCsv(gt, targets));
  WritePly((dir / "scene_cloud.ply").string(), gt.scene_cloud);
  WriteDepthRaw((dir / "depth.raw").string(), depth);
  const PredictionSet top = MakePredictionSet(
      gt.scene_id, GroundTruthGrasps(gt, o.min_score, static_cast<std::size_t>(o.limit)));
  WriteFileBytes((dir / "gt_grasps.csv").string(),
                 PredictionsToCsv(std::span<const PredictionSet>(&top, 1)));

  const std::size_t mask_pixels = static_cast<std::size_t>(
      std::count(targets.object_mask.begin(), targets.object_mask.end(), std::uint8_t{1}));
  Json bundle;
  bundle["scene_id"] = gt.scene_id;
  bundle["objects"] = objects;
  bundle["gripper"] = GripperToJson(gt.gripper);
  bundle["camera"] = SceneFileToJson(scene)["camera"];
  bundle["scene_cloud_points"] = gt.scene_cloud.size();
  bundle["static_points"] = loaded.static_geometry.size();
  bundle["image"] = {{"width", targets.width}, {"height", targets.height}};
  bundle["view_count"] = targets.view_count;
  bundle["files"] = {{"heatmap", "heatmap.pgm"},
                     {"mask", "mask.pgm"},
                     {"view_graspness", "view_graspness.csv"},
                     {"scene_cloud", "scene_cloud.ply"},
                     {"depth", "depth.raw"},
                     {"gt_grasps", "gt_grasps.csv"}};
  WriteFileBytes((dir / "scene_gt.json").string(), bundle.dump(2) + "\n");

  Json j = Header("scene", config);
  j["input"] = o.input;
  j["output"] = dir.string();
  j["scene_id"] = gt.scene_id;
  j["objects"] = gt.objects.size();
  j["grasp_points"] = targets.grasp_points.size();
  j["candidates"] = candidates;
  j["collided"] = collided;
  j["positives"] = positives;
  j["mask_pixels"] = mask_pixels;
  j["gt_grasps"] = top.grasps.size();
  return j;
}

// ---------------------------------------------------------------- simplify

struct SimplifyOptions {
  CommonOptions common;
  std::string input;
  std::optional<int> top_views;
};

Json RunSimplify(const SimplifyOptions& o) {
  PipelineConfig config = BaseConfig(o.common);
  if (o.top_views) config.top_views = *o.top_views;
  Finish(config, o.common);
  const std::string output = RequireOutput(o.common, "simplify");

  const GannContents contents = ReadGann(o.input);
  Json j = Header("simplify", config);
  j["input"] = o.input;
  j["output"] = output;
  j["top_views"] = config.top_views;
  if (const auto* dense = std::get_if<AnnotationTensor>(&contents)) {
    const SimplifiedAnnotation s = Simplify(*dense, config.top_views);
    WriteGann(output, s);
    const CompressionStats stats = ComputeCompressionStats(*dense, s);
    j["source"] = "dense";
    j["points_before"] = dense->point_count();
    j["points_after"] = s.point_count();
    j["kept_views"] = s.kept_views();
    j["candidates_before"] = stats.candidates_before;
    j["candidates_after"] = stats.candidates_after;
    j["positives_before"] = stats.positives_before;
    j["positive_ratio_before"] = stats.positive_ratio_before;
    j["bytes_before"] = stats.bytes_before;
    j["bytes_after"] = stats.bytes_after;
    j["candidate_reduction"] = stats.candidate_reduction;
    j["storage_reduction"] = stats.storage_reduction;
  } else {
    const auto& before = std::get<SimplifiedAnnotation>(contents);
    const SimplifiedAnnotation s = Simplify(before, config.top_views);
    WriteGann(output, s);
    j["source"] = "simplified";
    j["points_before"] = before.point_count();
    j["points_after"] = s.point_count();
    j["kept_views"] = s.kept_views();
    j["candidates_before"] = before.candidate_count();
    j["candidates_after"] = s.candidate_count();
    j["candidate_reduction"] =
        before.candidate_count() == 0
            ? 0.0
            : 1.0 - static_cast<double>(s.candidate_count()) / before.candidate_count();
  }
  return j;
}

// ----------------------------------------------------------------- corrupt

struct CorruptOptions {
  CommonOptions common;
  std::string input;
  std::string intrinsics;
};

Json RunCorrupt(const CorruptOptions& o) {
  PipelineConfig config = BaseConfig(o.common);
  Finish(config, o.common);
  const std::string output = RequireOutput(o.common, "corrupt");

  const DepthMap sim = LoadDepth(o.input, o.intrinsics);
  sim.Validate();
  NoiseModel noise = config.noise;
  noise.seed = StageSeed(config.seed, "corrupt");
  const DepthMap real = Corrupt(sim, noise);
  WriteDepth(output, real);

  Json j = Header("corrupt", config);
  j["input"] = o.input;
  j["output"] = output;
  j["noise_seed"] = noise.seed;
  j["width"] = real.width;
  j["height"] = real.height;
  j["valid_before"] = ValidPixels(sim);
  j["valid_after"] = ValidPixels(real);
  j["rmse"] = ValidPixels(real) > 0 ? Json(Rmse(real, sim)) : Json(nullptr);
  return j;
}

// ------------------------------------------------------------------ repair

struct RepairOptions {
  CommonOptions common;
  std::string input;
  std::string predictor = "smoothing";
  std::string sim;
  std::string intrinsics;
};

Json RunRepair(const RepairOptions& o) {
  PipelineConfig config = BaseConfig(o.common);
  Finish(config, o.common);
  const std::string output = RequireOutput(o.common, "repair");

  const DepthMap real = LoadDepth(o.input, o.intrinsics);
  real.Validate();
  std::optional<DepthMap> sim;
  if (!o.sim.empty()) {
    sim = LoadDepth(o.sim, o.intrinsics);
    sim->Validate();
    if (o.predictor == "oracle") sim->intrinsics = real.intrinsics;
  }
  ResidualMap residual;
  if (o.predictor == "oracle") {
    if (!sim) throw std::invalid_argument("repair: --predictor oracle needs --sim");
    residual = OracleRepairer(*sim).Predict(real);
  } else if (o.predictor == "smoothing") {
    residual = SmoothingRepairer().Predict(real);
  } else {
    throw std::invalid_argument("repair: unknown predictor '" + o.predictor + "'");
  }
  const RepairResult result = ApplyRepair(real, residual);
  WriteDepth(output, result.depth);

  Json j = Header("repair", config);
  j["input"] = o.input;
  j["output"] = output;
  j["predictor"] = o.predictor;
  j["repaired_pixels"] = static_cast<std::size_t>(
      std::count(residual.valid.begin(), residual.valid.end(), std::uint8_t{1}));
  j["clamped"] = result.clamped;
  if (sim) {
    j["rmse_before"] = Rmse(real, *sim);
    j["rmse"] = Rmse(result.depth, *sim);
  }
  return j;
}

// -------------------------------------------------------------------- bank

struct BankOptions {
  CommonOptions common;
  std::vector<std::string> clouds;
  std::string init;
  int batch_size = 64;
  std::optional<int> max_features;
};

Json RunBank(const BankOptions& o) {
  PipelineConfig config = BaseConfig(o.common);
  Finish(config, o.common);
  const std::string output = RequireOutput(o.common, "bank");
  if (o.clouds.empty()) throw std::invalid_argument("bank: at least one --cloud");
  if (o.batch_size < 1) throw std::invalid_argument("bank: --batch-size < 1");
  if (o.max_features && *o.max_features < 1) {
    throw std::invalid_argument("bank: --max-features < 1");
  }

  std::vector<LocalFeature> features;
  for (const std::string& path : o.clouds) {
    const PointCloud cloud = ReadPly(path);
    cloud.Validate();
    if (!cloud.HasNormals()) {
      throw FormatError("bank: '" + path + "' has no normals");
    }
    const PointCloud sites = VoxelDownsample(cloud, config.voxel);
    for (std::size_t i = 0; i < sites.size(); ++i) {
      features.push_back(ExtractDescriptor(cloud, sites.points[i], -sites.normals[i],
                                           config.gripper, config.bank.feature_dim));
    }
  }
  std::mt19937_64 engine(StageSeed(config.seed, "bank"));
  std::shuffle(features.begin(), features.end(), engine);
  if (o.max_features && features.size() > static_cast<std::size_t>(*o.max_features)) {
    features.resize(*o.max_features);
  }

  MemoryBank bank;
  if (o.init.empty()) {
    bank = MemoryBank::Random(config.bank.size, config.bank.feature_dim,
                              config.bank.alpha, StageSeed(config.seed, "bank-init"));
  } else {
    bank = ReadBank(o.init);
    if (bank.dim() != config.bank.feature_dim) {
      throw std::invalid_argument("bank: --init dimension " + std::to_string(bank.dim()) +
                                  " differs from bank.feature_dim");
    }
    bank.alpha = config.bank.alpha;
  }

  std::size_t batches = 0, skipped = 0;
  std::vector<int> assigned(bank.size(), 0);
  for (std::size_t begin = 0; begin < features.size(); begin += o.batch_size) {
    const std::size_t end = std::min(features.size(), begin + o.batch_size);
    const BankUpdateStats stats = BankUpdate(
        bank, std::span<const LocalFeature>(features.data() + begin, end - begin));
    for (int k = 0; k < bank.size(); ++k) assigned[k] += stats.assigned[k];
    skipped += stats.skipped_zero_norm;
    ++batches;
  }
  WriteBank(output, bank);

  Json j = Header("bank", config);
  j["output"] = output;
  j["clouds"] = o.clouds.size();
  j["features"] = features.size();
  j["batches"] = batches;
  j["skipped_zero_norm"] = skipped;
  j["entries"] = bank.size();
  j["dim"] = bank.dim();
  j["entries_touched"] = static_cast<std::size_t>(
      std::count_if(assigned.begin(), assigned.end(), [](int n) { return n > 0; }));
  j["update_count"] = bank.update_count;
  return j;
}

// ----------------------------------------------------------------- propose

struct ProposeOptions {
  CommonOptions common;
  std::string scene;
  std::string depth;
  std::string heatmap;
  std::string bank;
  double normal_radius = 0.01;
};

Json RunPropose(const ProposeOptions& o) {
  PipelineConfig config = BaseConfig(o.common);
  Finish(config, o.common);
  const std::string output = RequireOutput(o.common, "propose");
  if (o.scene.empty() || o.heatmap.empty()) {
    throw std::invalid_argument("propose: --scene and --heatmap are required");
  }
  if (!(o.normal_radius > 0.0)) throw std::invalid_argument("propose: --normal-radius <= 0");

  SceneFile scene = ParseSceneFile(o.scene);
  if (!o.depth.empty()) scene.depth = std::filesystem::absolute(o.depth).string();
  if (scene.depth.empty()) {
    throw std::invalid_argument("propose: no depth (pass --depth or set it in the scene)");
  }
  const DepthMap depth = SceneDepth(scene, SceneGroundTruth{});
  depth.Validate();
  const GrayImage heat = DecodePgm(ReadFileBytes(o.heatmap));
  if (heat.width != depth.width || heat.height != depth.height) {
    throw FormatError("propose: heatmap size differs from the depth image");
  }

  std::vector<std::size_t> pixels;
  PointCloud cloud = DepthToCloud(depth, scene.camera.pose, &pixels);
  std::vector<double> graspness(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    graspness[i] = static_cast<double>(heat.pixels[pixels[i]]) / heat.max_value;
  }
  EstimateNormals(cloud, o.normal_radius, scene.camera.pose.translation);

  ProposalOptions options;
  options.top_m = config.top_m;
  options.gripper = config.gripper;
  options.scene_id = scene.scene_id;
  std::optional<MemoryBank> bank;
  std::optional<AttentionWeights> weights;
  if (!o.bank.empty()) {
    bank = ReadBank(o.bank);
    weights = AttentionWeights::Random(bank->dim(), config.bank.model_dim,
                                       config.bank.heads,
                                       StageSeed(config.seed, "attention"));
    options.bank = &*bank;
    options.weights = &*weights;
  }
  const ProposalResult result = cloud.empty()
                                    ? ProposalResult{{scene.scene_id, {}}, true}
                                    : ProposeGrasps(cloud, graspness, options);
  WriteFileBytes(output, PredictionsToCsv(
                             std::span<const PredictionSet>(&result.predictions, 1)));

  Json j = Header("propose", config);
  j["scene_id"] = scene.scene_id;
  j["output"] = output;
  j["points"] = cloud.size();
  j["graspable_points"] = static_cast<std::size_t>(
      std::count_if(graspness.begin(), graspness.end(), [](double g) { return g > 0.0; }));
  j["proposals"] = result.predictions.grasps.size();
  j["no_graspable_points"] = result.no_graspable_points;
  j["enhanced"] = bank.has_value();
  return j;
}

// -------------------------------------------------------------------- eval

struct EvalOptions {
  CommonOptions common;
  std::vector<std::string> scenes;
  std::string predictions;
  std::string csv;
};

Json RunEval(const EvalOptions& o) {
  PipelineConfig config = BaseConfig(o.common);
  Finish(config, o.common);
  if (o.scenes.empty() || o.predictions.empty()) {
    throw std::invalid_argument("eval: --scene and --predictions are required");
  }
  std::vector<PredictionSet> sets;
  try {
    sets = PredictionsFromCsv(ReadFileBytes(o.predictions));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("predictions: ") + e.what());
  }
  std::map<std::string, const PredictionSet*> by_scene;
  for (const PredictionSet& s : sets) by_scene[s.scene_id] = &s;

  std::vector<SceneAP> results;
  std::size_t matched = 0;
  for (const std::string& path : o.scenes) {
    const SceneFile scene = ParseSceneFile(path);
    const LoadedScene loaded = LoadScene(scene, false, config.gripper);
    const auto it = by_scene.find(scene.scene_id);
    if (it == by_scene.end() || it->second->grasps.empty()) {
      // Nothing predicted: every precision term is zero.
      results.push_back({scene.scene_id, std::vector<double>(config.mu_grid.size(), 0.0), 0.0});
      continue;
    }
    ++matched;
    results.push_back(EvaluateScene(*it->second, loaded.ground_truth, config.mu_grid));
  }
  const APReport report = AggregateReport(config.mu_grid, std::move(results));
  if (!o.common.output.empty()) {
    WriteFileBytes(o.common.output, ReportToJson(report).dump(2) + "\n");
  }
  if (!o.csv.empty()) WriteFileBytes(o.csv, ReportToCsv(report));

  Json j = Header("eval", config);
  j["scenes"] = o.scenes.size();
  j["matched_prediction_sets"] = matched;
  j["unmatched_prediction_sets"] = sets.size() - std::min(sets.size(), matched);
  j["AP"] = report.ap;
  j["AP_mu"] = MuKeyed(report.mu_grid, report.ap_per_mu);
  if (!o.common.output.empty()) j["output"] = o.common.output;
  return j;
}

Json ErrorLine(const std::string& command, const char* code, const std::string& what) {
  Json j;
  j["command"] = command;
  j["status"] = "error";
  j["error_code"] = code;
  j["message"] = what;
  return j;
}

int Main(int argc, char** argv) {
  CLI::App app{"Grasp annotation, depth repair and evaluation toolkit", "grasplab"};
  app.require_subcommand(1);

  AnnotateOptions annotate;
  CLI::App* annotate_cmd = app.add_subcommand("annotate", "Annotate an object model (PLY with normals)");
  AddCommon(annotate_cmd, annotate.common);
  annotate_cmd->add_option("object", annotate.input, "Object PLY")->required();
  annotate_cmd->add_option("--views", annotate.views, "Approach views V");
  annotate_cmd->add_option("--angles", annotate.angles, "In-plane angles A");
  annotate_cmd->add_option("--depths", annotate.depths, "Use the first N grid depths");
  annotate_cmd->add_option("--voxel", annotate.voxel, "Grasp point voxel size (m)");
  annotate_cmd->add_option("--id", annotate.id, "Object id (default: file stem)");

  SceneOptions scene;
  CLI::App* scene_cmd = app.add_subcommand("scene", "Project and cull annotations into a scene");
  AddCommon(scene_cmd, scene.common);
  scene_cmd->add_option("scene", scene.input, "scene.json")->required();
  scene_cmd->add_option("--limit", scene.limit, "Ground-truth grasps written to gt_grasps.csv");
  scene_cmd->add_option("--min-score", scene.min_score, "Lowest score listed in gt_grasps.csv");

  SimplifyOptions simplify;
  CLI::App* simplify_cmd = app.add_subcommand("simplify", "Keep graspable points and their best views");
  AddCommon(simplify_cmd, simplify.common);
  simplify_cmd->add_option("annotation", simplify.input, "GANN file")->required();
  simplify_cmd->add_option("--top-views", simplify.top_views, "Views kept per point");

  CorruptOptions corrupt;
  CLI::App* corrupt_cmd = app.add_subcommand("corrupt", "Apply the sensor noise model to a depth map");
  AddCommon(corrupt_cmd, corrupt.common);
  corrupt_cmd->add_option("depth", corrupt.input, "Depth (.pgm or raw float32)")->required();
  corrupt_cmd->add_option("--intrinsics", corrupt.intrinsics, "Intrinsics JSON for PGM input");

  RepairOptions repair;
  CLI::App* repair_cmd = app.add_subcommand("repair", "Repair a depth map with a residual predictor");
  AddCommon(repair_cmd, repair.common);
  repair_cmd->add_option("depth", repair.input, "Captured depth")->required();
  repair_cmd->add_option("--predictor", repair.predictor, "oracle or smoothing")
      ->check(CLI::IsMember({"oracle", "smoothing"}));
  repair_cmd->add_option("--sim", repair.sim, "Clean depth (oracle target, RMSE reference)");
  repair_cmd->add_option("--intrinsics", repair.intrinsics, "Intrinsics JSON for PGM input");

  BankOptions bank;
  CLI::App* bank_cmd = app.add_subcommand("bank", "Update the memory bank from point clouds");
  AddCommon(bank_cmd, bank.common);
  bank_cmd->add_option("--cloud", bank.clouds, "PLY with normals (repeatable)");
  bank_cmd->add_option("--init", bank.init, "Existing bank checkpoint");
  bank_cmd->add_option("--batch-size", bank.batch_size, "Features per update");
  bank_cmd->add_option("--max-features", bank.max_features, "Cap on shuffled features");

  ProposeOptions propose;
  CLI::App* propose_cmd = app.add_subcommand("propose", "Propose grasps from depth and graspness");
  AddCommon(propose_cmd, propose.common);
  propose_cmd->add_option("--scene", propose.scene, "scene.json (camera)");
  propose_cmd->add_option("--depth", propose.depth, "Depth map (default: the scene's)");
  propose_cmd->add_option("--heatmap", propose.heatmap, "Graspness heatmap PGM");
  propose_cmd->add_option("--bank", propose.bank, "Bank checkpoint for re-weighting");
  propose_cmd->add_option("--normal-radius", propose.normal_radius, "Normal estimation radius (m)");

  EvalOptions eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Average precision over friction coefficients");
  AddCommon(eval_cmd, eval.common);
  eval_cmd->add_option("--scene", eval.scenes, "scene.json (repeatable)");
  eval_cmd->add_option("--predictions", eval.predictions, "Predictions CSV");
  eval_cmd->add_option("--csv", eval.csv, "Also write the report as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout << ErrorLine("", "usage_error", e.what()).dump() << "\n";
    std::cerr << "grasplab: " << e.what() << "\n";
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Json summary;
    if (command == "annotate") summary = RunAnnotate(annotate);
    else if (command == "scene") summary = RunScene(scene);
    else if (command == "simplify") summary = RunSimplify(simplify);
    else if (command == "corrupt") summary = RunCorrupt(corrupt);
    else if (command == "repair") summary = RunRepair(repair);
    else if (command == "bank") summary = RunBank(bank);
    else if (command == "propose") summary = RunPropose(propose);
    else summary = RunEval(eval);
    std::cout << summary.dump() << "\n";
    return 0;
  } catch (const InvariantViolation& e) {
    std::cout << ErrorLine(command, "invariant_violation", e.what()).dump() << "\n";
    std::cerr << "grasplab " << command << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cout << ErrorLine(command, "input_error", e.what()).dump() << "\n";
    std::cerr << "grasplab " << command << ": " << e.what() << "\n";
    return 2;
  }
}

}  // namespace
}  // namespace grasplab

int main(int argc, char** argv) { return grasplab::Main(argc, argv); }
