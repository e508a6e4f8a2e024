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

#include <optional>

#include "grasplab/reference.h"

namespace grasplab::reference {

AnnotationTensor AnnotatePoints(const ObjectModel& object,
                                std::span<const Vec3> grasp_points,
                                const AnnotationConfig& config) {
  object.Validate();
  config.Validate();
  const GripperModel& gripper = config.gripper;
  AnnotationTensor t;
  t.id = object.id;
  t.view_sphere = SampleViewSphere(config.view_count);
  t.gripper = gripper;
  t.mu_grid = config.mu_grid;
  for (const Vec3& p : grasp_points) {
    t.grasp_points.emplace_back(static_cast<float>(p.x()),
                                static_cast<float>(p.y()),
                                static_cast<float>(p.z()));
  }
  t.scores.assign(t.grasp_points.size() * t.candidates_per_point(), 0.0f);
  t.widths.assign(t.scores.size(), 0.0f);
  for (int i = 0; i < t.point_count(); ++i) {
    for (int j = 0; j < t.view_count(); ++j) {
      for (int a = 0; a < t.angle_count(); ++a) {
        for (int k = 0; k < t.depth_count(); ++k) {
          GraspFrame frame{
              t.grasp_points[i],
              RotationFromViewAngle(t.view_sphere.views[j], gripper.AngleAt(a)),
              gripper.depth_grid[k], 0.0};
          const std::optional<double> width =
              AdjustWidth(object, frame, gripper);
          if (!width) continue;
          frame.width = static_cast<float>(*width);
          const std::size_t idx = t.Index(i, j, a, k);
          t.widths[idx] = static_cast<float>(frame.width);
          t.scores[idx] = static_cast<float>(
              ScoreGrasp(object, frame, gripper, config.mu_grid).score);
        }
      }
    }
  }
  return t;
}

}  // namespace grasplab::reference
