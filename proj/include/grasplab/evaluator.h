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

#ifndef GRASPLAB_EVALUATOR_H_
#define GRASPLAB_EVALUATOR_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grasplab/feature_enhancer.h"
#include "grasplab/geometry.h"
#include "grasplab/scene_annotator.h"
#include "grasplab/spatial_hash.h"
#include "json.hpp"

namespace grasplab {

inline constexpr int kTopGrasps = 50;

struct ScoredGrasp {
  GraspPose pose;
  double confidence = 0.0;
};

// Grasps for one scene in descending confidence; equal confidences keep
// their insertion order.
struct PredictionSet {
  std::string scene_id;
  std::vector<ScoredGrasp> grasps;
};

// Validates confidences and stable-sorts. Throws std::invalid_argument on a
// non-finite confidence.
PredictionSet MakePredictionSet(std::string scene_id,
                                std::vector<ScoredGrasp> grasps);

// Spatial indices over a scene, reused across judgments. The scene must
// outlive the judge.
class SceneJudge {
 public:
  explicit SceneJudge(const SceneGroundTruth& scene);

  // Collision-free against the scene cloud and antipodal at `mu` against
  // the object nearest to the closing-region centre.
  bool Judge(const GraspPose& grasp, double mu) const;
  bool Collides(const GraspPose& grasp) const;
  // Object whose surface holds the point nearest to `query`.
  std::optional<int> NearestObject(const Vec3& query) const;

 private:
  const SceneGroundTruth& scene_;
  std::vector<Vec3> surface_points_;
  std::vector<int> surface_object_;
  std::vector<std::uint32_t> surface_local_;
  std::optional<SpatialHash> cloud_grid_;
  std::optional<SpatialHash> surface_grid_;
  Vec3 box_center_ = Vec3::Zero();
  double extent_ = 0.0;
};

// Throws std::invalid_argument unless mu > 0. Empty scenes judge false.
bool JudgeGrasp(const GraspPose& grasp, const SceneGroundTruth& scene,
                double mu);

// Mean of Precision@k over k = 1..top_k, missing judgments count false.
double MeanPrecision(std::span<const std::uint8_t> judgments,
                     int top_k = kTopGrasps);

struct SceneAP {
  std::string scene_id;
  std::vector<double> ap_per_mu;
  double ap = 0.0;
};

struct APReport {
  std::vector<double> mu_grid;
  std::vector<double> ap_per_mu;  // mean over scenes
  double ap = 0.0;                // mean of ap_per_mu
  std::vector<SceneAP> per_scene;

  std::optional<double> ApAt(double mu) const;
};

// AP_mu over the top_k most confident predictions for every mu. Judging is
// parallel over (prediction, mu). Throws std::invalid_argument for an empty
// prediction set.
SceneAP EvaluateScene(const PredictionSet& predictions,
                      const SceneGroundTruth& scene,
                      std::span<const double> mu_grid, int top_k = kTopGrasps);

APReport AggregateReport(std::span<const double> mu_grid,
                         std::vector<SceneAP> scenes);

nlohmann::json ReportToJson(const APReport& report);
// Columns scene, AP, AP_0.8, AP_0.4; a final "mean" row.
std::string ReportToCsv(const APReport& report);

// Columns scene_id, px, py, pz, vx, vy, vz, theta, depth, width, confidence.
std::string PredictionsToCsv(std::span<const PredictionSet> sets);
// Groups rows by scene_id in first-seen order. Throws FormatError.
std::vector<PredictionSet> PredictionsFromCsv(const std::string& text);

// Annotated scene grasps with score >= min_score (compared in float, the
// stored precision), best first (ties in object, point, view, angle, depth
// order), at most `limit`.
std::vector<ScoredGrasp> GroundTruthGrasps(const SceneGroundTruth& scene,
                                           double min_score,
                                           std::size_t limit);

struct ProposalOptions {
  int top_m = 64;
  GripperModel gripper;
  std::string scene_id;
  // Optional re-weighting through the enhancer; both or neither.
  const MemoryBank* bank = nullptr;
  const AttentionWeights* weights = nullptr;
};

struct ProposalResult {
  PredictionSet predictions;
  bool no_graspable_points = false;
};

// Geometric proposer: the top_m points by graspness (> 0), approach along
// the inward normal, all angles and depths of the gripper grid. Width
// spans the cloud inside the closing slab plus clearance; confidence is
// graspness times the fraction of nearby gripper-volume points that are
// not inside a finger or the base.
ProposalResult ProposeGrasps(const PointCloud& cloud,
                             std::span<const double> graspness,
                             const ProposalOptions& options);

}  // namespace grasplab

#endif  // GRASPLAB_EVALUATOR_H_
