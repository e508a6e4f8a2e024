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

#include "grasplab/gripper.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grasplab {
namespace {

constexpr double kTieTolerance = 1e-6;
constexpr double kConeTolerance = 1e-9;

bool InSlab(const Vec3& local, const GripperModel& g, double depth) {
  return std::abs(local.y()) <= 0.5 * g.finger_thickness &&
         local.z() <= depth && local.z() >= depth - g.finger_length;
}

bool InBaseSlab(const Vec3& local, const GripperModel& g, double depth) {
  const double top = depth - g.finger_length;
  return std::abs(local.y()) <= 0.5 * g.finger_thickness && local.z() < top &&
         local.z() >= top - g.base_depth;
}

// Best sample so far inside the extremal tie band.
struct ContactChoice {
  const LocalSample* sample = nullptr;
  double line_distance = 0.0;
};

}  // namespace

void GripperModel::Validate() const {
  if (!(max_width > 0.0 && finger_length > 0.0 && finger_thickness > 0.0 &&
        base_depth > 0.0)) {
    throw std::invalid_argument("GripperModel: dimensions must be > 0");
  }
  if (depth_grid.empty()) {
    throw std::invalid_argument("GripperModel: empty depth grid");
  }
  for (std::size_t i = 1; i < depth_grid.size(); ++i) {
    if (!(depth_grid[i] > depth_grid[i - 1])) {
      throw std::invalid_argument(
          "GripperModel: depth grid must be strictly increasing");
    }
  }
  if (angle_count < 1) {
    throw std::invalid_argument("GripperModel: angle_count < 1");
  }
}

double GripperModel::BoundingRadius() const {
  const double half_x = 0.5 * max_width + finger_thickness;
  const double half_y = 0.5 * finger_thickness;
  double z = 0.0;
  for (const double d : depth_grid) {
    z = std::max({z, std::abs(d), std::abs(d - finger_length - base_depth)});
  }
  return std::sqrt(half_x * half_x + half_y * half_y + z * z);
}

GripperRegion ClassifyLocal(const Vec3& local, const GripperModel& gripper,
                            double depth, double width) {
  const double half = 0.5 * width;
  const double ax = std::abs(local.x());
  if (InSlab(local, gripper, depth)) {
    if (ax <= half) return GripperRegion::kClosing;
    if (ax <= half + gripper.finger_thickness) return GripperRegion::kFinger;
    return GripperRegion::kOutside;
  }
  if (InBaseSlab(local, gripper, depth) &&
      ax <= half + gripper.finger_thickness) {
    return GripperRegion::kBase;
  }
  return GripperRegion::kOutside;
}

GraspFrame FrameFromPose(const GraspPose& pose) {
  return {pose.point, RotationFromViewAngle(pose.view, pose.angle), pose.depth,
          pose.width};
}

std::optional<ContactPair> FindContacts(std::span<const LocalSample> samples,
                                        std::span<const Vec3> points,
                                        std::span<const Vec3> normals,
                                        const GripperModel& gripper,
                                        double depth, double width) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  const double half = 0.5 * width;
  for (const LocalSample& s : samples) {
    if (!InSlab(s.local, gripper, depth) || std::abs(s.local.x()) > half) {
      continue;
    }
    lo = std::min(lo, s.local.x());
    hi = std::max(hi, s.local.x());
  }
  if (!(lo <= hi)) return std::nullopt;

  const double z_mid = depth - 0.5 * gripper.finger_length;
  ContactChoice left, right;
  auto consider = [](ContactChoice& c, const LocalSample& s, double dist) {
    if (c.sample == nullptr || dist < c.line_distance ||
        (dist == c.line_distance && s.index < c.sample->index)) {
      c.sample = &s;
      c.line_distance = dist;
    }
  };
  for (const LocalSample& s : samples) {
    if (!InSlab(s.local, gripper, depth) || std::abs(s.local.x()) > half) {
      continue;
    }
    const double dy = s.local.y();
    const double dz = s.local.z() - z_mid;
    const double dist = dy * dy + dz * dz;
    if (s.local.x() <= lo + kTieTolerance) consider(left, s, dist);
    if (s.local.x() >= hi - kTieTolerance) consider(right, s, dist);
  }
  if (left.sample->index == right.sample->index) return std::nullopt;
  return ContactPair{points[left.sample->index], points[right.sample->index],
                     normals[left.sample->index],
                     normals[right.sample->index]};
}

bool IsAntipodal(const ContactPair& contacts, double mu) {
  const Vec3 axis = contacts.first - contacts.second;
  const double span = axis.norm();
  if (!(span > 0.0)) return false;
  const Vec3 dir = axis / span;
  const double cos_limit = 1.0 / std::sqrt(1.0 + mu * mu);
  const double cos_first = dir.dot(contacts.first_normal.normalized());
  const double cos_second = -dir.dot(contacts.second_normal.normalized());
  return cos_first >= cos_limit - kConeTolerance &&
         cos_second >= cos_limit - kConeTolerance;
}

std::optional<double> FitWidth(std::span<const LocalSample> samples,
                               const GripperModel& gripper, double depth) {
  const double max_half = 0.5 * gripper.max_width;
  double reach = -1.0;
  for (const LocalSample& s : samples) {
    if (InSlab(s.local, gripper, depth) && std::abs(s.local.x()) <= max_half) {
      reach = std::max(reach, std::abs(s.local.x()));
    }
  }
  if (reach < 0.0) return std::nullopt;
  const double width = 2.0 * reach + kWidthClearance;
  if (width > gripper.max_width) return std::nullopt;
  if (AnyInGripper(samples, gripper, depth, width)) return std::nullopt;
  return width;
}

bool AnyInGripper(std::span<const LocalSample> samples,
                  const GripperModel& gripper, double depth, double width) {
  for (const LocalSample& s : samples) {
    const GripperRegion r = ClassifyLocal(s.local, gripper, depth, width);
    if (r == GripperRegion::kFinger || r == GripperRegion::kBase) return true;
  }
  return false;
}

}  // namespace grasplab
