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

#ifndef GRASPLAB_SIMPLIFIER_H_
#define GRASPLAB_SIMPLIFIER_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "grasplab/object_annotator.h"

namespace grasplab {

inline constexpr int kDefaultTopViews = 60;

// Sparse form of an AnnotationTensor: barren grasp points dropped and only
// the best views kept per surviving point.
struct SimplifiedAnnotation {
  std::string source_id;
  int source_point_count = 0;
  int top_views = kDefaultTopViews;
  ViewSphere view_sphere;  // the full source sphere
  GripperModel gripper;
  std::vector<double> mu_grid;

  std::vector<std::uint32_t> retained_points;  // ascending source indices
  std::vector<Vec3> grasp_points;              // one per retained point
  // kept_views() entries per retained point, best first.
  std::vector<std::uint32_t> retained_views;
  // [retained point][kept view][angle][depth]
  std::vector<float> scores;
  std::vector<float> widths;

  int point_count() const { return static_cast<int>(retained_points.size()); }
  int kept_views() const { return std::min(top_views, view_sphere.size()); }
  std::size_t candidates_per_view() const {
    return static_cast<std::size_t>(gripper.angle_count) * gripper.depth_count();
  }
  std::size_t candidate_count() const {
    return retained_points.size() * kept_views() * candidates_per_view();
  }
  std::uint32_t View(int point, int rank) const {
    return retained_views[static_cast<std::size_t>(point) * kept_views() + rank];
  }
  std::size_t Index(int point, int rank, int angle, int depth) const {
    return ((static_cast<std::size_t>(point) * kept_views() + rank) *
                gripper.angle_count +
            angle) *
               gripper.depth_count() +
           depth;
  }

  // Throws InvariantViolation unless every retained point has a positive
  // candidate, views are distinct and ranked, and values are in range.
  void Validate() const;
  bool operator==(const SimplifiedAnnotation&) const = default;
};

// Keeps points with at least one score > 0 and, per point, the top_views
// views by success rate (ties by ascending view index). Parallel over
// points.
SimplifiedAnnotation Simplify(const AnnotationTensor& tensor,
                              int top_views = kDefaultTopViews);
// Re-applies the same selection to an already simplified annotation.
SimplifiedAnnotation Simplify(const SimplifiedAnnotation& annotation,
                              int top_views = kDefaultTopViews);

struct CompressionStats {
  std::size_t candidates_before = 0;
  std::size_t candidates_after = 0;
  std::size_t positives_before = 0;
  std::size_t bytes_before = 0;
  std::size_t bytes_after = 0;
  double candidate_reduction = 0.0;
  double storage_reduction = 0.0;
  double positive_ratio_before = 0.0;
};

// Counts from the tensors; byte sizes from their GANN serialisations.
// Throws std::invalid_argument if `after` was not derived from `before`.
CompressionStats ComputeCompressionStats(const AnnotationTensor& before,
                                         const SimplifiedAnnotation& after);

}  // namespace grasplab

#endif  // GRASPLAB_SIMPLIFIER_H_
