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

#include "grasplab/object_annotator.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "grasplab/io_util.h"
#include "grasplab/spatial_hash.h"

namespace grasplab {
namespace {

// Slack for the coarse pre-filters; the exact region tests run afterwards.
constexpr double kFilterSlack = 1e-9;

Vec3 RoundToFloat(const Vec3& p) {
  return Vec3(static_cast<float>(p.x()), static_cast<float>(p.y()),
              static_cast<float>(p.z()));
}

double MuMin(const ContactPair& contacts, std::span<const double> mu_grid,
             bool* found) {
  for (const double mu : mu_grid) {
    if (IsAntipodal(contacts, mu)) {
      *found = true;
      return mu;
    }
  }
  *found = false;
  return 0.0;
}

GraspScore ScoreSamples(std::span<const LocalSample> samples,
                        const ObjectModel& object, const GripperModel& gripper,
                        double depth, double width,
                        std::span<const double> mu_grid) {
  GraspScore result;
  result.contacts = FindContacts(samples, object.surface.points,
                                 object.surface.normals, gripper, depth, width);
  if (!result.contacts) return result;
  bool found = false;
  const double mu = MuMin(*result.contacts, mu_grid, &found);
  if (found) result.score = ScoreFromMu(mu);
  return result;
}

void ValidateMuGrid(std::span<const double> mu_grid) {
  if (mu_grid.empty()) throw std::invalid_argument("empty friction grid");
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    if (!(mu_grid[i] > 0.0) || (i > 0 && !(mu_grid[i] > mu_grid[i - 1]))) {
      throw std::invalid_argument(
          "friction grid must be positive and strictly increasing");
    }
  }
}

}  // namespace

void ObjectModel::Validate() const {
  if (surface.empty()) {
    throw std::invalid_argument("ObjectModel '" + id + "': empty surface");
  }
  if (!surface.HasNormals()) {
    throw std::invalid_argument("ObjectModel '" + id + "': missing normals");
  }
  surface.Validate();
}

void AnnotationConfig::Validate() const {
  if (view_count < 1) throw std::invalid_argument("view_count < 1");
  gripper.Validate();
  ValidateMuGrid(mu_grid);
  if (!(voxel > 0.0)) throw std::invalid_argument("voxel <= 0");
}

GraspPose AnnotationTensor::Candidate(int point, int view, int angle,
                                      int depth) const {
  const std::size_t idx = Index(point, view, angle, depth);
  GraspPose pose;
  pose.point = grasp_points[point];
  pose.view = view_sphere.views[view];
  pose.angle = gripper.AngleAt(angle);
  pose.depth = gripper.depth_grid[depth];
  pose.width = widths[idx];
  pose.score = scores[idx];
  return pose;
}

void AnnotationTensor::Validate() const {
  const std::size_t expected = grasp_points.size() * candidates_per_point();
  if (scores.size() != expected || widths.size() != expected) {
    throw InvariantViolation("annotation '" + id + "': payload size mismatch");
  }
  for (std::size_t i = 0; i < expected; ++i) {
    if (!(scores[i] >= 0.0f && scores[i] <= 1.0f)) {
      throw InvariantViolation("annotation '" + id + "': score out of [0,1]");
    }
    if (!(widths[i] >= 0.0f && widths[i] <= static_cast<float>(gripper.max_width))) {
      throw InvariantViolation("annotation '" + id + "': width out of range");
    }
  }
}

double ScoreFromMu(double mu) { return std::clamp(1.1 - mu, 0.0, 1.0); }

std::vector<Vec3> SampleGraspPoints(const ObjectModel& object, double voxel) {
  if (object.surface.empty()) {
    throw std::invalid_argument("SampleGraspPoints: empty surface");
  }
  const PointCloud centroids = VoxelDownsample(object.surface, voxel);
  std::unordered_map<VoxelKey, std::size_t, VoxelKeyHash> best;
  std::unordered_map<VoxelKey, std::size_t, VoxelKeyHash> cell_of;
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    cell_of[KeyOf(centroids.points[c], voxel)] = c;
  }
  for (std::size_t i = 0; i < object.surface.size(); ++i) {
    const VoxelKey key = KeyOf(object.surface.points[i], voxel);
    const Vec3& centroid = centroids.points[cell_of.at(key)];
    auto [it, inserted] = best.try_emplace(key, i);
    if (!inserted &&
        (object.surface.points[i] - centroid).squaredNorm() <
            (object.surface.points[it->second] - centroid).squaredNorm()) {
      it->second = i;
    }
  }
  std::vector<Vec3> out;
  out.reserve(centroids.size());
  for (const Vec3& c : centroids.points) {
    out.push_back(object.surface.points[best.at(KeyOf(c, voxel))]);
  }
  return out;
}

std::vector<LocalSample> ToLocalSamples(std::span<const Vec3> points,
                                        const GraspFrame& frame) {
  std::vector<LocalSample> out;
  out.reserve(points.size());
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    out.push_back({frame.ToLocal(points[i]), i});
  }
  return out;
}

GraspScore ScoreGrasp(const ObjectModel& object, const GraspFrame& frame,
                      const GripperModel& gripper,
                      std::span<const double> mu_grid) {
  ValidateMuGrid(mu_grid);
  const auto samples = ToLocalSamples(object.surface.points, frame);
  return ScoreSamples(samples, object, gripper, frame.depth, frame.width,
                      mu_grid);
}

GraspScore ScoreGrasp(const ObjectModel& object, const GraspPose& pose,
                      const GripperModel& gripper,
                      std::span<const double> mu_grid) {
  return ScoreGrasp(object, FrameFromPose(pose), gripper, mu_grid);
}

std::optional<double> AdjustWidth(const ObjectModel& object,
                                  const GraspFrame& frame,
                                  const GripperModel& gripper) {
  const auto samples = ToLocalSamples(object.surface.points, frame);
  return FitWidth(samples, gripper, frame.depth);
}

std::optional<double> AdjustWidth(const ObjectModel& object,
                                  const GraspPose& pose,
                                  const GripperModel& gripper) {
  if (pose.width > gripper.max_width) {
    throw std::invalid_argument("AdjustWidth: width exceeds max_width");
  }
  return AdjustWidth(object, FrameFromPose(pose), gripper);
}

AnnotationTensor AnnotateObject(const ObjectModel& object,
                                const AnnotationConfig& config) {
  object.Validate();
  config.Validate();
  const std::vector<Vec3> points = SampleGraspPoints(object, config.voxel);
  return AnnotatePoints(object, points, config);
}

AnnotationTensor AnnotatePoints(const ObjectModel& object,
                                std::span<const Vec3> grasp_points,
                                const AnnotationConfig& config) {
  object.Validate();
  config.Validate();
  const GripperModel& gripper = config.gripper;

  AnnotationTensor tensor;
  tensor.id = object.id;
  tensor.view_sphere = SampleViewSphere(config.view_count);
  tensor.gripper = gripper;
  tensor.mu_grid = config.mu_grid;
  for (const Vec3& p : grasp_points) tensor.grasp_points.push_back(RoundToFloat(p));
  tensor.scores.assign(tensor.grasp_points.size() * tensor.candidates_per_point(),
                       0.0f);
  tensor.widths.assign(tensor.scores.size(), 0.0f);

  const double radius = gripper.BoundingRadius();
  const SpatialHash grid(object.surface.points, radius);
  const double z_lo = gripper.depth_grid.front() - gripper.finger_length -
                      gripper.base_depth - kFilterSlack;
  const double z_hi = gripper.depth_grid.back() + kFilterSlack;
  const double y_half = 0.5 * gripper.finger_thickness + kFilterSlack;
  const int views = tensor.view_count();
  const int angles = tensor.angle_count();
  const int depths = tensor.depth_count();

#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < tensor.point_count(); ++i) {
    const Vec3& p = tensor.grasp_points[i];
    const std::vector<std::uint32_t> near = grid.RadiusSearch(p, radius);
    std::vector<std::uint32_t> band;
    std::vector<LocalSample> slab;
    for (int j = 0; j < views; ++j) {
      const Vec3& v = tensor.view_sphere.views[j];
      band.clear();
      for (const std::uint32_t n : near) {
        const double z = v.dot(object.surface.points[n] - p);
        if (z >= z_lo && z <= z_hi) band.push_back(n);
      }
      for (int a = 0; a < angles; ++a) {
        const GraspFrame frame{p, RotationFromViewAngle(v, gripper.AngleAt(a)),
                               0.0, 0.0};
        slab.clear();
        for (const std::uint32_t n : band) {
          const Vec3 local = frame.ToLocal(object.surface.points[n]);
          if (std::abs(local.y()) <= y_half) slab.push_back({local, n});
        }
        for (int k = 0; k < depths; ++k) {
          const double depth = gripper.depth_grid[k];
          const std::optional<double> width = FitWidth(slab, gripper, depth);
          if (!width) continue;
          // Score with the stored (float) width so re-scoring a tensor entry
          // reproduces it exactly.
          const float stored_width = static_cast<float>(*width);
          const GraspScore s = ScoreSamples(slab, object, gripper, depth,
                                            stored_width, config.mu_grid);
          const std::size_t idx = tensor.Index(i, j, a, k);
          tensor.widths[idx] = stored_width;
          tensor.scores[idx] = static_cast<float>(s.score);
        }
      }
    }
  }
  return tensor;
}

}  // namespace grasplab
