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

#include "grasplab/scene_annotator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "grasplab/spatial_hash.h"

namespace grasplab {
namespace {

constexpr double kFilterSlack = 1e-9;

}  // namespace

Mat3 ObjectCandidates::WorldRotation(int view, int angle) const {
  return pose.transform.rotation *
         RotationFromViewAngle(tensor.view_sphere.views[view],
                               tensor.gripper.AngleAt(angle));
}

GraspFrame ObjectCandidates::WorldFrame(int point, int view, int angle,
                                        int depth) const {
  return {world_points[point], WorldRotation(view, angle),
          tensor.gripper.depth_grid[depth],
          tensor.widths[tensor.Index(point, view, angle, depth)]};
}

GraspPose ObjectCandidates::WorldGrasp(int point, int view, int angle,
                                       int depth) const {
  const std::size_t idx = tensor.Index(point, view, angle, depth);
  const ViewAngle va = DecomposeRotation(WorldRotation(view, angle));
  GraspPose pose;
  pose.point = world_points[point];
  pose.view = va.view;
  pose.angle = va.angle;
  pose.depth = tensor.gripper.depth_grid[depth];
  pose.width = tensor.widths[idx];
  pose.score = tensor.scores[idx];
  return pose;
}

CandidateSet ProjectAnnotations(std::span<const SceneObject> scene,
                                std::span<const AnnotationTensor> annotations) {
  CandidateSet out;
  out.reserve(scene.size());
  for (const SceneObject& object : scene) {
    object.pose.transform.Validate();
    const auto it = std::find_if(
        annotations.begin(), annotations.end(),
        [&](const AnnotationTensor& t) { return t.id == object.pose.object_id; });
    if (it == annotations.end()) {
      throw std::invalid_argument("ProjectAnnotations: no annotation for '" +
                                  object.pose.object_id + "'");
    }
    ObjectCandidates c;
    c.pose = object.pose;
    c.tensor = *it;
    for (const Vec3& p : c.tensor.grasp_points) {
      c.world_points.push_back(object.pose.transform * p);
    }
    for (const Vec3& v : c.tensor.view_sphere.views) {
      c.world_views.push_back(object.pose.transform.rotation * v);
    }
    c.collided.assign(c.tensor.scores.size(), 0);
    out.push_back(std::move(c));
  }
  return out;
}

CandidateSet CullCollisions(CandidateSet candidates,
                            const PointCloud& scene_cloud,
                            const GripperModel& gripper) {
  if (scene_cloud.empty()) {
    throw std::invalid_argument("CullCollisions: empty scene cloud");
  }
  gripper.Validate();
  const double radius = gripper.BoundingRadius();
  const SpatialHash grid(scene_cloud.points, radius);
  const double z_lo = gripper.depth_grid.front() - gripper.finger_length -
                      gripper.base_depth - kFilterSlack;
  const double z_hi = gripper.depth_grid.back() + kFilterSlack;
  const double y_half = 0.5 * gripper.finger_thickness + kFilterSlack;

  for (ObjectCandidates& c : candidates) {
    if (!(c.tensor.gripper == gripper)) {
      throw std::invalid_argument(
          "CullCollisions: annotation gripper differs from the scene gripper");
    }
    const int views = c.tensor.view_count();
    const int angles = c.tensor.angle_count();
    const int depths = c.tensor.depth_count();
    std::vector<Mat3> rotations(static_cast<std::size_t>(views) * angles);
    for (int j = 0; j < views; ++j) {
      for (int a = 0; a < angles; ++a) rotations[j * angles + a] = c.WorldRotation(j, a);
    }
    c.collided.assign(c.tensor.scores.size(), 0);

#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < c.tensor.point_count(); ++i) {
      const Vec3& p = c.world_points[i];
      const std::vector<std::uint32_t> near = grid.RadiusSearch(p, radius);
      std::vector<std::uint32_t> band;
      std::vector<LocalSample> slab;
      for (int j = 0; j < views; ++j) {
        const Vec3& v = c.world_views[j];
        band.clear();
        for (const std::uint32_t n : near) {
          const double z = v.dot(scene_cloud.points[n] - p);
          if (z >= z_lo - kFilterSlack && z <= z_hi + kFilterSlack) {
            band.push_back(n);
          }
        }
        for (int a = 0; a < angles; ++a) {
          const GraspFrame frame{p, rotations[j * angles + a], 0.0, 0.0};
          slab.clear();
          for (const std::uint32_t n : band) {
            const Vec3 local = frame.ToLocal(scene_cloud.points[n]);
            if (std::abs(local.y()) <= y_half) slab.push_back({local, n});
          }
          for (int k = 0; k < depths; ++k) {
            const std::size_t idx = c.tensor.Index(i, j, a, k);
            if (AnyInGripper(slab, gripper, gripper.depth_grid[k],
                             c.tensor.widths[idx])) {
              c.collided[idx] = 1;
              c.tensor.scores[idx] = 0.0f;
            }
          }
        }
      }
    }
  }
  return candidates;
}

Graspness ComputeGraspness(const AnnotationTensor& tensor) {
  const int points = tensor.point_count();
  const int views = tensor.view_count();
  const std::size_t per_view = tensor.candidates_per_view();
  Graspness g;
  g.point.assign(points, 0.0);
  g.view.assign(static_cast<std::size_t>(points) * views, 0.0);
  for (int i = 0; i < points; ++i) {
    std::size_t total = 0;
    for (int j = 0; j < views; ++j) {
      const std::size_t base = tensor.Index(i, j, 0, 0);
      std::size_t positive = 0;
      for (std::size_t k = 0; k < per_view; ++k) {
        if (tensor.scores[base + k] > 0.0f) ++positive;
      }
      g.view[static_cast<std::size_t>(i) * views + j] =
          static_cast<double>(positive) / static_cast<double>(per_view);
      total += positive;
    }
    g.point[i] = static_cast<double>(total) /
                 static_cast<double>(tensor.candidates_per_point());
  }
  return g;
}

SceneGroundTruth BuildSceneGroundTruth(
    std::string scene_id, std::vector<SceneObject> objects,
    std::span<const AnnotationTensor> annotations, const SceneCamera& camera,
    const PointCloud& static_geometry, const GripperModel& gripper) {
  SceneGroundTruth gt;
  gt.scene_id = std::move(scene_id);
  gt.camera = camera;
  gt.gripper = gripper;
  for (const SceneObject& o : objects) {
    o.model.Validate();
    o.pose.transform.Validate();
    gt.world_surfaces.push_back(TransformCloud(o.model.surface, o.pose.transform));
    const auto& pts = gt.world_surfaces.back().points;
    gt.scene_cloud.points.insert(gt.scene_cloud.points.end(), pts.begin(),
                                 pts.end());
  }
  gt.scene_cloud.points.insert(gt.scene_cloud.points.end(),
                               static_geometry.points.begin(),
                               static_geometry.points.end());
  gt.objects = std::move(objects);
  if (!annotations.empty() && !gt.objects.empty()) {
    gt.annotations = CullCollisions(ProjectAnnotations(gt.objects, annotations),
                                    gt.scene_cloud, gripper);
  }
  return gt;
}

SupervisionTargets RenderSupervision(const SceneGroundTruth& scene,
                                     const DepthMap& depth) {
  depth.intrinsics.Validate();
  depth.Validate();
  SupervisionTargets out;
  out.width = depth.width;
  out.height = depth.height;
  out.object_mask.assign(depth.size(), 0);
  out.graspness_heatmap.assign(depth.size(), 0.0f);

  for (const ObjectCandidates& c : scene.annotations) {
    const Graspness g = ComputeGraspness(c.tensor);
    if (out.view_count == 0) out.view_count = c.tensor.view_count();
    if (out.view_count != c.tensor.view_count()) {
      throw std::invalid_argument("RenderSupervision: mixed view counts");
    }
    out.grasp_points.insert(out.grasp_points.end(), c.world_points.begin(),
                            c.world_points.end());
    for (const double v : g.point) out.point_graspness.push_back(static_cast<float>(v));
    for (const double v : g.view) out.view_graspness.push_back(static_cast<float>(v));
  }
  std::vector<Vec3> surface;
  for (const PointCloud& s : scene.world_surfaces) {
    surface.insert(surface.end(), s.points.begin(), s.points.end());
  }
  if (surface.empty()) return out;

  std::vector<std::size_t> pixels;
  const PointCloud cloud = DepthToCloud(depth, scene.camera.pose, &pixels);
  const SpatialHash surface_grid(surface, kObjectMaskRadius);
  const SpatialHash grasp_grid(out.grasp_points, kHeatmapMatchRadius);

#pragma omp parallel for schedule(static)
  for (std::int64_t n = 0; n < static_cast<std::int64_t>(cloud.size()); ++n) {
    const Vec3& q = cloud.points[n];
    if (!surface_grid.Nearest(q, kObjectMaskRadius)) continue;
    out.object_mask[pixels[n]] = 1;
    if (out.grasp_points.empty()) continue;
    if (const auto nn = grasp_grid.Nearest(q, kHeatmapMatchRadius)) {
      out.graspness_heatmap[pixels[n]] = out.point_graspness[*nn];
    }
  }
  return out;
}

DepthMap RenderDepthFromCloud(const PointCloud& cloud,
                              const SceneCamera& camera, int splat_radius) {
  const CameraIntrinsics& k = camera.intrinsics;
  k.Validate();
  DepthMap depth(k.width, k.height, k);
  const RigidTransform world_to_camera = camera.pose.Inverse();
  for (const Vec3& p : cloud.points) {
    const Vec3 q = world_to_camera * p;
    if (!(q.z() > 0.0)) continue;
    const int u = static_cast<int>(std::lround(k.fx * q.x() / q.z() + k.cx));
    const int v = static_cast<int>(std::lround(k.fy * q.y() / q.z() + k.cy));
    const float mm = static_cast<float>(q.z() * 1e3);
    for (int dv = -splat_radius; dv <= splat_radius; ++dv) {
      for (int du = -splat_radius; du <= splat_radius; ++du) {
        const int r = v + dv, c = u + du;
        if (r < 0 || r >= k.height || c < 0 || c >= k.width) continue;
        float& z = depth.at(r, c);
        if (z == 0.0f || mm < z) z = mm;
      }
    }
  }
  return depth;
}

}  // namespace grasplab
