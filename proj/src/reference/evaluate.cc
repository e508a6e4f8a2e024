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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "grasplab/reference.h"

namespace grasplab::reference {

bool JudgeGrasp(const GraspPose& grasp, const SceneGroundTruth& scene,
                double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("JudgeGrasp: mu must be > 0");
  if (scene.scene_cloud.empty() || scene.world_surfaces.empty()) return false;
  const double max_width = std::max(
      scene.gripper.max_width,
      static_cast<double>(static_cast<float>(scene.gripper.max_width)));
  if (!(grasp.width >= 0.0 && grasp.width <= max_width)) {
    return false;
  }
  const GraspFrame frame = FrameFromPose(grasp);
  if (AnyInGripper(ToLocalSamples(scene.scene_cloud.points, frame),
                   scene.gripper, grasp.depth, grasp.width)) {
    return false;
  }
  const Vec3 center = frame.ClosingCenter(scene.gripper);
  double best = std::numeric_limits<double>::infinity();
  int object = -1;
  for (std::size_t o = 0; o < scene.world_surfaces.size(); ++o) {
    for (const Vec3& p : scene.world_surfaces[o].points) {
      const double d2 = (p - center).squaredNorm();
      if (d2 < best) {
        best = d2;
        object = static_cast<int>(o);
      }
    }
  }
  if (object < 0) return false;
  const PointCloud& surface = scene.world_surfaces[object];
  const auto contacts =
      FindContacts(ToLocalSamples(surface.points, frame), surface.points,
                   surface.normals, scene.gripper, grasp.depth, grasp.width);
  return contacts && IsAntipodal(*contacts, mu);
}

}  // namespace grasplab::reference
