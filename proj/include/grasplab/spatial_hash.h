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

#ifndef GRASPLAB_SPATIAL_HASH_H_
#define GRASPLAB_SPATIAL_HASH_H_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "grasplab/geometry.h"

namespace grasplab {

struct VoxelKey {
  std::int64_t x, y, z;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 73856093ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 19349663ULL;
    h ^= static_cast<std::uint64_t>(k.z) * 83492791ULL;
    return static_cast<std::size_t>(h);
  }
};

inline VoxelKey KeyOf(const Vec3& p, double cell) {
  return {static_cast<std::int64_t>(std::floor(p.x() / cell)),
          static_cast<std::int64_t>(std::floor(p.y() / cell)),
          static_cast<std::int64_t>(std::floor(p.z() / cell))};
}

// Uniform hash grid over a borrowed point array. The points must outlive the
// grid. Read-only after construction, so concurrent queries are safe.
class SpatialHash {
 public:
  SpatialHash(std::span<const Vec3> points, double cell);

  double cell() const { return cell_; }
  std::span<const Vec3> points() const { return points_; }

  // Calls fn(index) for every point with |p - center| <= radius. Visit order
  // is unspecified.
  template <typename Fn>
  void ForEachInRadius(const Vec3& center, double radius, Fn&& fn) const {
    const double r2 = radius * radius;
    const VoxelKey lo = KeyOf(center - Vec3::Constant(radius), cell_);
    const VoxelKey hi = KeyOf(center + Vec3::Constant(radius), cell_);
    for (std::int64_t x = lo.x; x <= hi.x; ++x) {
      for (std::int64_t y = lo.y; y <= hi.y; ++y) {
        for (std::int64_t z = lo.z; z <= hi.z; ++z) {
          const auto it = cells_.find({x, y, z});
          if (it == cells_.end()) continue;
          for (const std::uint32_t i : it->second) {
            if ((points_[i] - center).squaredNorm() <= r2) fn(i);
          }
        }
      }
    }
  }

  // Indices within `radius`, sorted ascending.
  std::vector<std::uint32_t> RadiusSearch(const Vec3& center,
                                          double radius) const;

  // Nearest point within max_distance; ties resolve to the lowest index.
  std::optional<std::uint32_t> Nearest(const Vec3& query,
                                       double max_distance) const;

 private:
  std::span<const Vec3> points_;
  double cell_;
  std::unordered_map<VoxelKey, std::vector<std::uint32_t>, VoxelKeyHash>
      cells_;
};

}  // namespace grasplab

#endif  // GRASPLAB_SPATIAL_HASH_H_
