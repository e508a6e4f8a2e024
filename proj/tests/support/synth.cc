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

#include "synth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "Eigen/Geometry"

namespace grasplab::synth {
namespace {

int Cells(double extent, double spacing) {
  return std::max(1, static_cast<int>(std::ceil(extent / spacing - 1e-9)));
}

// Cell-centred grid on the rectangle origin + s*u + t*v, s in [0, a],
// t in [0, b].
void AddFace(PointCloud& cloud, const Vec3& origin, const Vec3& u, double a,
             const Vec3& v, double b, const Vec3& normal, double spacing) {
  const int na = Cells(a, spacing), nb = Cells(b, spacing);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      cloud.points.push_back(origin + (i + 0.5) * a / na * u +
                             (j + 0.5) * b / nb * v);
      cloud.normals.push_back(normal);
    }
  }
}

}  // namespace

PointCloud BoxSurface(const Vec3& size, double spacing) {
  PointCloud cloud;
  const Vec3 h = 0.5 * size;
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
    for (const double sign : {-1.0, 1.0}) {
      Vec3 origin = -h;
      origin[axis] = sign * h[axis];
      Vec3 normal = Vec3::Zero();
      normal[axis] = sign;
      AddFace(cloud, origin, Vec3::Unit(u), size[u], Vec3::Unit(v), size[v],
              normal, spacing);
    }
  }
  return cloud;
}

PointCloud PlaneSurface(double half_extent, double spacing, double height) {
  PointCloud cloud;
  AddFace(cloud, Vec3(-half_extent, -half_extent, height), Vec3::UnitX(),
          2 * half_extent, Vec3::UnitY(), 2 * half_extent, Vec3::UnitZ(),
          spacing);
  return cloud;
}

PointCloud SphereSurface(double radius, int count) {
  PointCloud cloud;
  for (const Vec3& v : SampleViewSphere(count).views) {
    cloud.points.push_back(radius * v);
    cloud.normals.push_back(v);
  }
  return cloud;
}

PointCloud WedgeSurface(double half_base, double length, double spacing) {
  PointCloud cloud;
  const double slant = std::sqrt(2.0) * half_base;
  const Vec3 apex(0.0, -0.5 * length, half_base);
  const Vec3 down_right = Vec3(1.0, 0.0, -1.0).normalized();
  const Vec3 down_left = Vec3(-1.0, 0.0, -1.0).normalized();
  AddFace(cloud, apex, down_right, slant, Vec3::UnitY(), length,
          Vec3(1.0, 0.0, 1.0).normalized(), spacing);
  AddFace(cloud, apex, down_left, slant, Vec3::UnitY(), length,
          Vec3(-1.0, 0.0, 1.0).normalized(), spacing);
  AddFace(cloud, Vec3(-half_base, -0.5 * length, 0.0), Vec3::UnitX(),
          2 * half_base, Vec3::UnitY(), length, -Vec3::UnitZ(), spacing);
  return cloud;
}

PointCloud ParallelPlates(double gap, double half_extent, double spacing) {
  PointCloud cloud;
  for (const double sign : {-1.0, 1.0}) {
    AddFace(cloud, Vec3(sign * 0.5 * gap, -half_extent, -half_extent),
            Vec3::UnitY(), 2 * half_extent, Vec3::UnitZ(), 2 * half_extent,
            Vec3(sign, 0.0, 0.0), spacing);
  }
  return cloud;
}

ObjectModel MakeObject(const std::string& id, PointCloud surface) {
  return {id, std::move(surface)};
}

DepthMap RaycastDepth(const SceneCamera& camera,
                      const std::vector<SynthBox>& boxes, bool table) {
  const CameraIntrinsics& k = camera.intrinsics;
  DepthMap depth(k.width, k.height, k);
  for (int r = 0; r < k.height; ++r) {
    for (int c = 0; c < k.width; ++c) {
      const Vec3 dir_cam((c - k.cx) / k.fx, (r - k.cy) / k.fy, 1.0);
      const Vec3 origin = camera.pose.translation;
      const Vec3 dir = camera.pose.rotation * dir_cam;
      // Ray parameter t equals camera-frame z because dir_cam.z == 1.
      double best = std::numeric_limits<double>::infinity();
      if (table && std::abs(dir.z()) > 1e-12) {
        const double t = -origin.z() / dir.z();
        if (t > 0.0) best = t;
      }
      for (const SynthBox& box : boxes) {
        const RigidTransform inv = box.pose.Inverse();
        const Vec3 o = inv * origin;
        const Vec3 d = inv.rotation * dir;
        double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
        bool hit = true;
        for (int a = 0; a < 3 && hit; ++a) {
          const double h = 0.5 * box.size[a];
          if (std::abs(d[a]) < 1e-15) {
            hit = std::abs(o[a]) <= h;
            continue;
          }
          double lo = (-h - o[a]) / d[a], hi = (h - o[a]) / d[a];
          if (lo > hi) std::swap(lo, hi);
          t0 = std::max(t0, lo);
          t1 = std::min(t1, hi);
          hit = t0 <= t1;
        }
        if (hit && t0 > 0.0) best = std::min(best, t0);
      }
      if (std::isfinite(best)) depth.at(r, c) = static_cast<float>(best * 1e3);
    }
  }
  return depth;
}

SceneCamera TopDownCamera(int width, int height, double focal,
                          double camera_height) {
  SceneCamera camera;
  camera.intrinsics = {focal, focal, 0.5 * width, 0.5 * height, width, height};
  // Camera z looks down the world -z; camera x stays world x.
  Mat3 r;
  r << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  camera.pose = {r, Vec3(0.0, 0.0, camera_height)};
  return camera;
}

BoxScene RandomBoxScene(std::uint64_t seed, double spacing, int image_width,
                        int image_height) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BoxScene scene;
  scene.camera = TopDownCamera(image_width, image_height, 1.25 * image_width, 0.6);
  const int count = 1 + static_cast<int>(unit(engine) * 3.0) % 3;
  const Vec3 slots[3] = {Vec3(-0.08, 0.0, 0.0), Vec3(0.08, 0.0, 0.0),
                         Vec3(0.0, 0.07, 0.0)};
  for (int b = 0; b < count; ++b) {
    SynthBox box;
    box.size = Vec3(0.03 + 0.03 * unit(engine), 0.03 + 0.03 * unit(engine),
                    0.03 + 0.03 * unit(engine));
    const double yaw = kPi * unit(engine);
    box.pose.rotation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
    box.pose.translation =
        slots[b] + Vec3(0.01 * (unit(engine) - 0.5), 0.01 * (unit(engine) - 0.5),
                        0.5 * box.size.z());
    scene.boxes.push_back(box);
    SceneObject object;
    object.model = MakeObject("box" + std::to_string(b),
                              BoxSurface(box.size, spacing));
    object.pose = {object.model.id, box.pose};
    scene.objects.push_back(std::move(object));
  }
  scene.table = PlaneSurface(0.2, spacing);
  return scene;
}

}  // namespace grasplab::synth
