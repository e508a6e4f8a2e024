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

#ifndef GRASPLAB_GRIPPER_H_
#define GRASPLAB_GRIPPER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "grasplab/geometry.h"

namespace grasplab {

// Parallel-jaw gripper. In the gripper frame (x = closing axis,
// y = finger thickness axis, z = approach) with the grasp point at the
// origin and fingertips at z = depth:
//   closing region  |x| <= w/2,            z in [depth - L, depth]
//   fingers         w/2 < |x| <= w/2 + t,  z in [depth - L, depth]
//   base            |x| <= w/2 + t,        z in [depth - L - B, depth - L)
// and every part spans |y| <= t/2. L = finger_length, t = finger_thickness,
// B = base_depth.
struct GripperModel {
  double max_width = 0.10;
  double finger_length = 0.06;
  double finger_thickness = 0.004;
  double base_depth = 0.02;
  std::vector<double> depth_grid = {0.01, 0.02, 0.03, 0.04};
  int angle_count = 12;

  void Validate() const;
  int depth_count() const { return static_cast<int>(depth_grid.size()); }
  // In-plane angles cover [0, pi); a parallel jaw is symmetric under pi.
  double AngleAt(int index) const { return index * kPi / angle_count; }
  // Radius of a sphere around the grasp point that encloses the whole
  // gripper for any depth in the grid and width <= max_width.
  double BoundingRadius() const;

  bool operator==(const GripperModel&) const = default;
};

// Width clearance added to the contact span.
inline constexpr double kWidthClearance = 0.002;

enum class GripperRegion { kOutside, kClosing, kFinger, kBase };

GripperRegion ClassifyLocal(const Vec3& local, const GripperModel& gripper,
                            double depth, double width);

// Gripper placed in a parent frame.
struct GraspFrame {
  Vec3 point = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  double depth = 0.0;
  double width = 0.0;

  Vec3 ToLocal(const Vec3& p) const { return rotation.transpose() * (p - point); }
  Vec3 ClosingCenter(const GripperModel& gripper) const {
    return point + (depth - 0.5 * gripper.finger_length) * rotation.col(2);
  }
};

GraspFrame FrameFromPose(const GraspPose& pose);

struct ContactPair {
  Vec3 first;  // on the -x side of the closing region
  Vec3 second;
  Vec3 first_normal;
  Vec3 second_normal;
};

// A surface sample expressed in the gripper frame; `index` points back into
// the parent-frame point and normal arrays.
struct LocalSample {
  Vec3 local;
  std::uint32_t index;
};

// Per-finger extremal contact among samples in the closing region.
// Candidates within 1e-6 m of the extremal closing coordinate are treated
// as tied and resolved by distance to the closing line, then lowest index.
// Returned positions and normals are in the parent frame.
std::optional<ContactPair> FindContacts(std::span<const LocalSample> samples,
                                        std::span<const Vec3> points,
                                        std::span<const Vec3> normals,
                                        const GripperModel& gripper,
                                        double depth, double width);

// Two-contact friction-cone test with outward normals: the squeeze
// direction at each contact must lie within atan(mu) of the inward normal.
bool IsAntipodal(const ContactPair& contacts, double mu);

// Smallest collision-free width >= contact span + clearance. Samples are
// in the gripper frame; only local coordinates are used.
std::optional<double> FitWidth(std::span<const LocalSample> samples,
                               const GripperModel& gripper, double depth);

// True if any sample lies inside a finger or the base.
bool AnyInGripper(std::span<const LocalSample> samples,
                  const GripperModel& gripper, double depth, double width);

}  // namespace grasplab

#endif  // GRASPLAB_GRIPPER_H_
