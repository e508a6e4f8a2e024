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

#include "grasplab/spatial_hash.h"

#include <algorithm>
#include <stdexcept>

namespace grasplab {

SpatialHash::SpatialHash(std::span<const Vec3> points, double cell)
    : points_(points), cell_(cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("SpatialHash: cell <= 0");
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    cells_[KeyOf(points[i], cell_)].push_back(i);
  }
}

std::vector<std::uint32_t> SpatialHash::RadiusSearch(const Vec3& center,
                                                     double radius) const {
  std::vector<std::uint32_t> out;
  ForEachInRadius(center, radius, [&](std::uint32_t i) { out.push_back(i); });
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::uint32_t> SpatialHash::Nearest(const Vec3& query,
                                                   double max_distance) const {
  std::optional<std::uint32_t> best;
  double best_d2 = max_distance * max_distance;
  ForEachInRadius(query, max_distance, [&](std::uint32_t i) {
    const double d2 = (points_[i] - query).squaredNorm();
    if (!best || d2 < best_d2 || (d2 == best_d2 && i < *best)) {
      best = i;
      best_d2 = d2;
    }
  });
  return best;
}

}  // namespace grasplab
