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

#ifndef GRASPLAB_SCENE_ANNOTATOR_H_
#define GRASPLAB_SCENE_ANNOTATOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "grasplab/depth_repair.h"
#include "grasplab/geometry.h"
#include "grasplab/gripper.h"
#include "grasplab/object_annotator.h"

namespace grasplab {

struct ScenePose {
  std::string object_id;
  RigidTransform transform;  // object -> world
};

struct SceneObject {
  ObjectModel model;
  ScenePose pose;
};

// One object's candidate grid placed in the world. The tensor keeps its
// object-frame geometry; scores and widths are the scene-level values.
struct ObjectCandidates {
  ScenePose pose;
  AnnotationTensor tensor;
  std::vector<Vec3> world_points;
  std::vector<Vec3> world_views;
  // One flag per candidate, same layout as tensor.scores.
  std::vector<std::uint8_t> collided;

  // Exact world gripper rotation: pose rotation times the object-frame
  // (view, angle) rotation.
  Mat3 WorldRotation(int view, int angle) const;
  GraspFrame WorldFrame(int point, int view, int angle, int depth) const;
  // World-frame pose; the angle is re-derived so that
  // RotationFromViewAngle(view', angle') reproduces WorldRotation.
  GraspPose WorldGrasp(int point, int view, int angle, int depth) const;
};

using CandidateSet = std::vector<ObjectCandidates>;

// Maps each scene object's annotation (matched by id) into the world.
// Throws std::invalid_argument for an object without an annotation.
CandidateSet ProjectAnnotations(std::span<const SceneObject> scene,
                                std::span<const AnnotationTensor> annotations);

// Zeroes the score of every candidate whose fingers or base contain a scene
// point and records the collision flag. Parallel over grasp points.
CandidateSet CullCollisions(CandidateSet candidates,
                            const PointCloud& scene_cloud,
                            const GripperModel& gripper);

struct Graspness {
  std::vector<double> point;  // per grasp point
  std::vector<double> view;   // per grasp point x view, row-major
};

// Success rates over the full grid (collided candidates count in the
// denominator).
Graspness ComputeGraspness(const AnnotationTensor& tensor);

struct SceneCamera {
  CameraIntrinsics intrinsics;
  RigidTransform pose;  // camera -> world, camera looks along +z
};

struct SceneGroundTruth {
  std::string scene_id;
  std::vector<SceneObject> objects;
  std::vector<PointCloud> world_surfaces;  // per object
  CandidateSet annotations;                // culled
  SceneCamera camera;
  PointCloud scene_cloud;  // object surfaces plus static geometry
  GripperModel gripper;
};

// Projects and culls the annotations against all object surfaces plus
// `static_geometry` (e.g. a table sample). `annotations` may be empty for
// evaluation-only scenes.
SceneGroundTruth BuildSceneGroundTruth(
    std::string scene_id, std::vector<SceneObject> objects,
    std::span<const AnnotationTensor> annotations, const SceneCamera& camera,
    const PointCloud& static_geometry, const GripperModel& gripper);

inline constexpr double kHeatmapMatchRadius = 0.005;
inline constexpr double kObjectMaskRadius = 0.003;

struct SupervisionTargets {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> object_mask;
  std::vector<float> graspness_heatmap;
  // Scene grasp points in annotation order (object by object).
  std::vector<Vec3> grasp_points;
  std::vector<float> point_graspness;
  int view_count = 0;
  std::vector<float> view_graspness;  // grasp point x view
};

// Back-projects `depth` through the scene camera, assigns each pixel the
// graspness of its nearest scene grasp point within kHeatmapMatchRadius and
// marks pixels within kObjectMaskRadius of an object surface. Heatmap
// values outside the object mask are zero.
SupervisionTargets RenderSupervision(const SceneGroundTruth& scene,
                                     const DepthMap& depth);

// Z-buffer splat of a world cloud into the scene camera (millimetres).
DepthMap RenderDepthFromCloud(const PointCloud& cloud,
                              const SceneCamera& camera, int splat_radius = 1);

}  // namespace grasplab

#endif  // GRASPLAB_SCENE_ANNOTATOR_H_
