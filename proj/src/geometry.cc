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

#include "grasplab/geometry.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "Eigen/Eigenvalues"
#include "grasplab/spatial_hash.h"

namespace grasplab {
namespace {

constexpr double kUnitTolerance = 1e-6;

void RequireUnit(const Vec3& v, const char* what) {
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > kUnitTolerance) {
    throw std::invalid_argument(std::string(what) + ": expected a unit vector");
  }
}

}  // namespace

void ValidateGraspPose(const GraspPose& pose) {
  if (!pose.point.allFinite()) {
    throw std::invalid_argument("GraspPose: non-finite point");
  }
  RequireUnit(pose.view, "GraspPose.view");
  if (!std::isfinite(pose.angle) || !std::isfinite(pose.depth)) {
    throw std::invalid_argument("GraspPose: non-finite angle or depth");
  }
  if (!(pose.width >= 0.0)) {
    throw std::invalid_argument("GraspPose: negative width");
  }
  if (!(pose.score >= 0.0 && pose.score <= 1.0)) {
    throw std::invalid_argument("GraspPose: score outside [0, 1]");
  }
}

void PointCloud::Validate() const {
  if (!normals.empty()) {
    if (normals.size() != points.size()) {
      throw std::invalid_argument("PointCloud: normals/points size mismatch");
    }
    for (const Vec3& n : normals) RequireUnit(n, "PointCloud.normals");
  }
  if (!colors.empty() && colors.size() != points.size()) {
    throw std::invalid_argument("PointCloud: colors/points size mismatch");
  }
}

void PointCloud::Append(const PointCloud& other) {
  if (!empty() && (HasNormals() != other.HasNormals() ||
                   HasColors() != other.HasColors())) {
    throw std::invalid_argument("PointCloud::Append: attribute mismatch");
  }
  const bool was_empty = empty();
  points.insert(points.end(), other.points.begin(), other.points.end());
  if (was_empty || HasNormals()) {
    normals.insert(normals.end(), other.normals.begin(), other.normals.end());
  }
  if (was_empty || HasColors()) {
    colors.insert(colors.end(), other.colors.begin(), other.colors.end());
  }
}

void CameraIntrinsics::Validate() const {
  if (!(fx > 0.0 && fy > 0.0)) {
    throw std::invalid_argument("CameraIntrinsics: focal lengths must be > 0");
  }
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("CameraIntrinsics: empty image size");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw std::invalid_argument("CameraIntrinsics: principal point outside");
  }
}

void RigidTransform::Validate(double tolerance) const {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw std::invalid_argument("RigidTransform: non-finite entries");
  }
  const double ortho =
      (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > tolerance || std::abs(rotation.determinant() - 1.0) > tolerance) {
    throw std::invalid_argument("RigidTransform: rotation is not proper");
  }
}

PointCloud TransformCloud(const PointCloud& cloud, const RigidTransform& t) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const Vec3& p : cloud.points) out.points.push_back(t * p);
  out.normals.reserve(cloud.normals.size());
  for (const Vec3& n : cloud.normals) out.normals.push_back(t.rotation * n);
  out.colors = cloud.colors;
  return out;
}

ViewSphere SampleViewSphere(int count) {
  if (count < 1) throw std::invalid_argument("SampleViewSphere: count < 1");
  ViewSphere sphere;
  sphere.views.reserve(count);
  if (count == 1) {
    sphere.views.push_back(Vec3::UnitZ());
    return sphere;
  }
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * kPi * i * golden;
    sphere.views.push_back(Vec3(r * std::cos(phi), r * std::sin(phi), z));
  }
  return sphere;
}

Vec3 CanonicalTangent(const Vec3& view) {
  Vec3 e = Vec3::UnitX();
  if (std::abs(view.dot(e)) > 0.99) e = Vec3::UnitY();
  return (e - e.dot(view) * view).normalized();
}

Mat3 RotationFromViewAngle(const Vec3& view, double angle) {
  RequireUnit(view, "RotationFromViewAngle");
  const Vec3 tangent = CanonicalTangent(view);
  const Vec3 bitangent = view.cross(tangent);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r;
  r.col(0) = c * tangent + s * bitangent;
  r.col(1) = -s * tangent + c * bitangent;
  r.col(2) = view;
  return r;
}

ViewAngle DecomposeRotation(const Mat3& rotation) {
  const Vec3 view = rotation.col(2).normalized();
  const Vec3 tangent = CanonicalTangent(view);
  const Vec3 bitangent = view.cross(tangent);
  const Vec3 closing = rotation.col(0);
  double angle = std::atan2(closing.dot(bitangent), closing.dot(tangent));
  if (angle < 0.0) angle += 2.0 * kPi;
  if (angle >= 2.0 * kPi) angle -= 2.0 * kPi;
  return {view, angle};
}

std::vector<std::size_t> CylinderGroup(const PointCloud& cloud,
                                       const Vec3& center, const Vec3& axis,
                                       double radius, double height,
                                       std::size_t max_points) {
  if (!(radius > 0.0) || !(height > 0.0)) {
    throw std::invalid_argument("CylinderGroup: radius and height must be > 0");
  }
  RequireUnit(axis, "CylinderGroup.axis");
  const double half = 0.5 * height;
  const double r2 = radius * radius;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cloud.size() && out.size() < max_points; ++i) {
    const Vec3 d = cloud.points[i] - center;
    const double axial = d.dot(axis);
    if (std::abs(axial) > half) continue;
    if ((d - axial * axis).squaredNorm() <= r2) out.push_back(i);
  }
  return out;
}

PointCloud VoxelDownsample(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0.0)) throw std::invalid_argument("VoxelDownsample: voxel <= 0");
  cloud.Validate();

  struct Cell {
    Vec3 sum = Vec3::Zero();
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 normal_sum = Vec3::Zero();
    Eigen::Vector3d color_sum = Eigen::Vector3d::Zero();
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::unordered_map<VoxelKey, std::size_t, VoxelKeyHash> slot;
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    auto [it, inserted] = slot.try_emplace(KeyOf(p, voxel), cells.size());
    if (inserted) {
      cells.emplace_back();
      cells.back().first = i;
    }
    Cell& c = cells[it->second];
    c.sum += p;
    c.lo = c.lo.cwiseMin(p);
    c.hi = c.hi.cwiseMax(p);
    if (cloud.HasNormals()) c.normal_sum += cloud.normals[i];
    if (cloud.HasColors()) {
      for (int k = 0; k < 3; ++k) c.color_sum[k] += cloud.colors[i][k];
    }
    ++c.count;
  }

  PointCloud out;
  out.points.reserve(cells.size());
  for (const Cell& c : cells) {
    if (c.count == 1) {
      // Copy verbatim so repeated downsampling is a fixed point.
      out.points.push_back(cloud.points[c.first]);
      if (cloud.HasNormals()) out.normals.push_back(cloud.normals[c.first]);
      if (cloud.HasColors()) out.colors.push_back(cloud.colors[c.first]);
      continue;
    }
    // Clamp keeps the centroid inside its own cell despite rounding.
    out.points.push_back((c.sum / static_cast<double>(c.count))
                             .cwiseMax(c.lo)
                             .cwiseMin(c.hi));
    if (cloud.HasNormals()) {
      const double n = c.normal_sum.norm();
      out.normals.push_back(n > 0.0 ? Vec3(c.normal_sum / n)
                                    : cloud.normals[c.first]);
    }
    if (cloud.HasColors()) {
      std::array<std::uint8_t, 3> rgb{};
      for (int k = 0; k < 3; ++k) {
        rgb[k] = static_cast<std::uint8_t>(
            std::lround(c.color_sum[k] / static_cast<double>(c.count)));
      }
      out.colors.push_back(rgb);
    }
  }
  return out;
}

void EstimateNormals(PointCloud& cloud, double radius, const Vec3& viewpoint) {
  if (!(radius > 0.0)) throw std::invalid_argument("EstimateNormals: radius");
  const SpatialHash grid(cloud.points, radius);
  std::vector<Vec3> normals(cloud.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(cloud.size()); ++i) {
    const Vec3& p = cloud.points[i];
    Vec3 mean = Vec3::Zero();
    Mat3 second = Mat3::Zero();
    int count = 0;
    grid.ForEachInRadius(p, radius, [&](std::uint32_t j) {
      const Vec3 d = cloud.points[j] - p;
      mean += d;
      second += d * d.transpose();
      ++count;
    });
    Vec3 n = (viewpoint - p).normalized();
    if (count >= 3) {
      mean /= count;
      const Mat3 cov = second / count - mean * mean.transpose();
      Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
      const Vec3 smallest = solver.eigenvectors().col(0);
      if (smallest.allFinite() && smallest.norm() > 0.0) {
        n = smallest.normalized();
        if (n.dot(viewpoint - p) < 0.0) n = -n;
      }
    }
    normals[i] = n;
  }
  cloud.normals = std::move(normals);
}

}  // namespace grasplab
