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

#ifndef GRASPLAB_OBJECT_ANNOTATOR_H_
#define GRASPLAB_OBJECT_ANNOTATOR_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grasplab/geometry.h"
#include "grasplab/gripper.h"

namespace grasplab {

struct ObjectModel {
  std::string id;
  // Dense surface sample with outward unit normals.
  PointCloud surface;

  void Validate() const;
};

inline const std::vector<double> kDefaultMuGrid = {0.2, 0.4, 0.6,
                                                   0.8, 1.0, 1.2};

struct AnnotationConfig {
  int view_count = 300;
  GripperModel gripper;
  std::vector<double> mu_grid = kDefaultMuGrid;
  double voxel = 0.005;

  void Validate() const;
  bool operator==(const AnnotationConfig&) const = default;
};

// Dense candidate grid over grasp points x views x angles x depths, stored
// row-major in that order. Grasp points are rounded to float precision so
// the on-disk form is lossless.
struct AnnotationTensor {
  std::string id;
  std::vector<Vec3> grasp_points;
  ViewSphere view_sphere;
  GripperModel gripper;
  std::vector<double> mu_grid;
  std::vector<float> scores;
  std::vector<float> widths;

  int point_count() const { return static_cast<int>(grasp_points.size()); }
  int view_count() const { return view_sphere.size(); }
  int angle_count() const { return gripper.angle_count; }
  int depth_count() const { return gripper.depth_count(); }
  std::size_t candidates_per_view() const {
    return static_cast<std::size_t>(angle_count()) * depth_count();
  }
  std::size_t candidates_per_point() const {
    return candidates_per_view() * view_count();
  }
  std::size_t Index(int point, int view, int angle, int depth) const {
    return ((static_cast<std::size_t>(point) * view_count() + view) *
                angle_count() +
            angle) *
               depth_count() +
           depth;
  }
  // Object-frame pose of one candidate, carrying its width and score.
  GraspPose Candidate(int point, int view, int angle, int depth) const;

  // Throws InvariantViolation on shape or range errors.
  void Validate() const;
  bool operator==(const AnnotationTensor&) const = default;
};

// 1.1 - mu clamped to [0, 1].
double ScoreFromMu(double mu);

// One surface sample per occupied voxel: the sample nearest to the voxel's
// centroid.
std::vector<Vec3> SampleGraspPoints(const ObjectModel& object, double voxel);

struct GraspScore {
  double score = 0.0;
  std::optional<ContactPair> contacts;
};

// Force-closure score over a friction sweep. Brute force over the surface.
GraspScore ScoreGrasp(const ObjectModel& object, const GraspPose& pose,
                      const GripperModel& gripper,
                      std::span<const double> mu_grid);
GraspScore ScoreGrasp(const ObjectModel& object, const GraspFrame& frame,
                      const GripperModel& gripper,
                      std::span<const double> mu_grid);

// Smallest collision-free width covering the contacts plus clearance, or
// nullopt for empty or colliding grasps. Ignores pose.width.
std::optional<double> AdjustWidth(const ObjectModel& object,
                                  const GraspPose& pose,
                                  const GripperModel& gripper);
std::optional<double> AdjustWidth(const ObjectModel& object,
                                  const GraspFrame& frame,
                                  const GripperModel& gripper);

// Samples grasp points and annotates them. Parallel over grasp points.
AnnotationTensor AnnotateObject(const ObjectModel& object,
                                const AnnotationConfig& config);

// Annotates caller-chosen grasp points (object frame).
AnnotationTensor AnnotatePoints(const ObjectModel& object,
                                std::span<const Vec3> grasp_points,
                                const AnnotationConfig& config);

// Expresses every surface sample in the gripper frame.
std::vector<LocalSample> ToLocalSamples(std::span<const Vec3> points,
                                        const GraspFrame& frame);

}  // namespace grasplab

#endif  // GRASPLAB_OBJECT_ANNOTATOR_H_
