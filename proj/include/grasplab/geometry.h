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

#ifndef GRASPLAB_GEOMETRY_H_
#define GRASPLAB_GEOMETRY_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "Eigen/Core"

namespace grasplab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

// Decoupled 6-DoF grasp. The gripper frame is built from (view, angle) by
// RotationFromViewAngle; the fingertips sit at point + depth * view.
struct GraspPose {
  Vec3 point = Vec3::Zero();
  Vec3 view = Vec3::UnitZ();
  double angle = 0.0;
  double depth = 0.0;
  double width = 0.0;
  double score = 0.0;
};

// Throws std::invalid_argument when the pose breaks its invariants.
void ValidateGraspPose(const GraspPose& pose);

struct PointCloud {
  std::vector<Vec3> points;
  // Optional; when present, same size as points and unit length.
  std::vector<Vec3> normals;
  std::vector<std::array<std::uint8_t, 3>> colors;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool HasNormals() const { return !normals.empty(); }
  bool HasColors() const { return !colors.empty(); }

  void Validate() const;
  void Append(const PointCloud& other);
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void Validate() const;
  bool operator==(const CameraIntrinsics&) const = default;
};

// Rigid transform x' = rotation * x + translation.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform operator*(const RigidTransform& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }
  RigidTransform Inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }
  // Throws std::invalid_argument unless rotation is orthonormal with det +1.
  void Validate(double tolerance = 1e-9) const;
};

PointCloud TransformCloud(const PointCloud& cloud, const RigidTransform& t);

struct ViewSphere {
  std::vector<Vec3> views;
  int size() const { return static_cast<int>(views.size()); }
  bool operator==(const ViewSphere&) const = default;
};

// Fibonacci lattice on the unit sphere. count == 1 yields the +z pole.
ViewSphere SampleViewSphere(int count);

// Columns of the returned matrix are (closing axis, finger-thickness axis,
// approach axis). The approach column equals `view`.
Mat3 RotationFromViewAngle(const Vec3& view, double angle);

struct ViewAngle {
  Vec3 view;
  double angle;  // [0, 2*pi)
};

// Inverse of RotationFromViewAngle for any proper rotation.
ViewAngle DecomposeRotation(const Mat3& rotation);

// Tangent used as the angle == 0 closing axis for `view`.
Vec3 CanonicalTangent(const Vec3& view);

inline constexpr std::size_t kUnlimited =
    std::numeric_limits<std::size_t>::max();

// Indices (ascending) of points inside the cylinder centred at `center` with
// axis `axis`, |axial offset| <= height / 2 and radial distance <= radius.
// At most `max_points` of the lowest indices are kept.
std::vector<std::size_t> CylinderGroup(const PointCloud& cloud,
                                       const Vec3& center, const Vec3& axis,
                                       double radius, double height,
                                       std::size_t max_points = kUnlimited);

// One centroid per occupied voxel, in first-occupied order. Normals are
// averaged and renormalised, colors averaged.
PointCloud VoxelDownsample(const PointCloud& cloud, double voxel);

// PCA normals over a radius neighbourhood, flipped to face `viewpoint`.
// Points with fewer than three neighbours get the viewpoint direction.
void EstimateNormals(PointCloud& cloud, double radius, const Vec3& viewpoint);

}  // namespace grasplab

#endif  // GRASPLAB_GEOMETRY_H_
