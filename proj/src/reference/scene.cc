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

#include <limits>

#include "grasplab/reference.h"

namespace grasplab::reference {

CandidateSet CullCollisions(CandidateSet candidates,
                            const PointCloud& scene_cloud,
                            const GripperModel& gripper) {
  for (ObjectCandidates& c : candidates) {
    const AnnotationTensor& t = c.tensor;
    c.collided.assign(t.scores.size(), 0);
    for (int i = 0; i < t.point_count(); ++i) {
      for (int j = 0; j < t.view_count(); ++j) {
        for (int a = 0; a < t.angle_count(); ++a) {
          for (int k = 0; k < t.depth_count(); ++k) {
            const GraspFrame frame = c.WorldFrame(i, j, a, k);
            const auto samples = ToLocalSamples(scene_cloud.points, frame);
            if (AnyInGripper(samples, gripper, frame.depth, frame.width)) {
              const std::size_t idx = t.Index(i, j, a, k);
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

SupervisionTargets RenderSupervision(const SceneGroundTruth& scene,
                                     const DepthMap& depth) {
  SupervisionTargets out;
  out.width = depth.width;
  out.height = depth.height;
  out.object_mask.assign(depth.size(), 0);
  out.graspness_heatmap.assign(depth.size(), 0.0f);
  for (const ObjectCandidates& c : scene.annotations) {
    const Graspness g = ComputeGraspness(c.tensor);
    out.view_count = c.tensor.view_count();
    out.grasp_points.insert(out.grasp_points.end(), c.world_points.begin(),
                            c.world_points.end());
    for (const double v : g.point) out.point_graspness.push_back(static_cast<float>(v));
    for (const double v : g.view) out.view_graspness.push_back(static_cast<float>(v));
  }
  std::vector<std::size_t> pixels;
  const PointCloud cloud = DepthToCloud(depth, scene.camera.pose, &pixels);
  const double mask_r2 = kObjectMaskRadius * kObjectMaskRadius;
  const double match_r2 = kHeatmapMatchRadius * kHeatmapMatchRadius;
  for (std::size_t n = 0; n < cloud.size(); ++n) {
    const Vec3& q = cloud.points[n];
    bool on_object = false;
    for (const PointCloud& s : scene.world_surfaces) {
      for (const Vec3& p : s.points) {
        if ((p - q).squaredNorm() <= mask_r2) {
          on_object = true;
          break;
        }
      }
      if (on_object) break;
    }
    if (!on_object) continue;
    out.object_mask[pixels[n]] = 1;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    for (std::size_t g = 0; g < out.grasp_points.size(); ++g) {
      const double d2 = (out.grasp_points[g] - q).squaredNorm();
      if (d2 < best) {
        best = d2;
        best_index = g;
      }
    }
    if (best <= match_r2) {
      out.graspness_heatmap[pixels[n]] = out.point_graspness[best_index];
    }
  }
  return out;
}

}  // namespace grasplab::reference
