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

#include "grasplab/simplifier.h"

#include <numeric>
#include <tuple>
#include <stdexcept>

#include "grasplab/gann_io.h"
#include "grasplab/io_util.h"

namespace grasplab {
namespace {

// Positive candidates in one view block.
int CountPositive(const float* block, std::size_t per_view) {
  int n = 0;
  for (std::size_t k = 0; k < per_view; ++k) n += block[k] > 0.0f;
  return n;
}

// Positions of the `keep` best views among `ids`, best first. `scores`
// points at the first view block of the grasp point.
std::vector<int> RankViews(const float* scores, std::size_t per_view,
                           std::span<const std::uint32_t> ids, int keep) {
  const int n = static_cast<int>(ids.size());
  std::vector<int> positive(n);
  for (int j = 0; j < n; ++j) {
    positive[j] = CountPositive(scores + j * per_view, per_view);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (positive[a] != positive[b]) return positive[a] > positive[b];
    return ids[a] < ids[b];
  });
  order.resize(std::min(keep, n));
  return order;
}

struct PointSelection {
  bool keep = false;
  std::vector<int> positions;
};

// Shared driver: `source(i)` yields (score block pointer, view ids, width
// block pointer) for input point i.
template <typename Source>
void SelectAndCopy(int points, std::size_t per_view, int top_views,
                   Source&& source, SimplifiedAnnotation& out,
                   std::span<const std::uint32_t> point_ids,
                   std::span<const Vec3> point_coords) {
  std::vector<PointSelection> selection(points);
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < points; ++i) {
    const auto [scores, ids, widths] = source(i);
    (void)widths;
    const std::size_t total = ids.size() * per_view;
    bool any = false;
    for (std::size_t k = 0; k < total && !any; ++k) any = scores[k] > 0.0f;
    if (!any) continue;
    selection[i].keep = true;
    selection[i].positions = RankViews(scores, per_view, ids, top_views);
  }
  for (int i = 0; i < points; ++i) {
    if (!selection[i].keep) continue;
    const auto [scores, ids, widths] = source(i);
    out.retained_points.push_back(point_ids[i]);
    out.grasp_points.push_back(point_coords[i]);
    for (const int pos : selection[i].positions) {
      out.retained_views.push_back(ids[pos]);
      out.scores.insert(out.scores.end(), scores + pos * per_view,
                        scores + (pos + 1) * per_view);
      out.widths.insert(out.widths.end(), widths + pos * per_view,
                        widths + (pos + 1) * per_view);
    }
  }
}

}  // namespace

void SimplifiedAnnotation::Validate() const {
  const auto fail = [&](const std::string& what) {
    throw InvariantViolation("simplified annotation '" + source_id + "': " +
                             what);
  };
  if (top_views < 1) fail("top_views must be >= 1");
  if (view_sphere.size() < 1) fail("empty view sphere");
  const std::size_t points = retained_points.size();
  const int kept = kept_views();
  const std::size_t per_view = candidates_per_view();
  if (grasp_points.size() != points ||
      retained_views.size() != points * kept ||
      scores.size() != candidate_count() || widths.size() != scores.size()) {
    fail("block size mismatch");
  }
  for (std::size_t i = 0; i < points; ++i) {
    if (retained_points[i] >= static_cast<std::uint32_t>(source_point_count) ||
        (i > 0 && retained_points[i] <= retained_points[i - 1])) {
      fail("retained point indices must be ascending and in range");
    }
    std::vector<std::uint32_t> ids(retained_views.begin() + i * kept,
                                   retained_views.begin() + (i + 1) * kept);
    int previous = -1;
    bool any = false;
    for (int r = 0; r < kept; ++r) {
      if (ids[r] >= static_cast<std::uint32_t>(view_sphere.size())) {
        fail("view index out of range");
      }
      const int positive =
          CountPositive(scores.data() + Index(static_cast<int>(i), r, 0, 0),
                        per_view);
      any = any || positive > 0;
      if (r > 0 && (positive > previous ||
                    (positive == previous && ids[r] <= ids[r - 1]))) {
        fail("views are not ranked by success rate");
      }
      previous = positive;
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      fail("duplicate view");
    }
    if (!any) fail("retained point without a positive candidate");
  }
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (!(scores[k] >= 0.0f && scores[k] <= 1.0f)) fail("score out of [0,1]");
    if (!(widths[k] >= 0.0f && widths[k] <= static_cast<float>(gripper.max_width))) {
      fail("width out of range");
    }
  }
}

SimplifiedAnnotation Simplify(const AnnotationTensor& tensor, int top_views) {
  if (top_views < 1) throw std::invalid_argument("Simplify: top_views < 1");
  tensor.Validate();
  SimplifiedAnnotation out;
  out.source_id = tensor.id;
  out.source_point_count = tensor.point_count();
  out.top_views = top_views;
  out.view_sphere = tensor.view_sphere;
  out.gripper = tensor.gripper;
  out.mu_grid = tensor.mu_grid;
  std::vector<std::uint32_t> all_views(tensor.view_count());
  std::iota(all_views.begin(), all_views.end(), 0u);
  std::vector<std::uint32_t> point_ids(tensor.point_count());
  std::iota(point_ids.begin(), point_ids.end(), 0u);
  const std::size_t per_point = tensor.candidates_per_point();
  SelectAndCopy(
      tensor.point_count(), tensor.candidates_per_view(), top_views,
      [&](int i) {
        return std::make_tuple(tensor.scores.data() + i * per_point,
                               std::span<const std::uint32_t>(all_views),
                               tensor.widths.data() + i * per_point);
      },
      out, point_ids, tensor.grasp_points);
  return out;
}

SimplifiedAnnotation Simplify(const SimplifiedAnnotation& annotation,
                              int top_views) {
  if (top_views < 1) throw std::invalid_argument("Simplify: top_views < 1");
  annotation.Validate();
  SimplifiedAnnotation out = annotation;
  out.top_views = std::min(top_views, annotation.kept_views());
  out.retained_points.clear();
  out.grasp_points.clear();
  out.retained_views.clear();
  out.scores.clear();
  out.widths.clear();
  const int kept = annotation.kept_views();
  const std::size_t per_point = kept * annotation.candidates_per_view();
  SelectAndCopy(
      annotation.point_count(), annotation.candidates_per_view(),
      out.top_views,
      [&](int i) {
        return std::make_tuple(
            annotation.scores.data() + i * per_point,
            std::span<const std::uint32_t>(
                annotation.retained_views.data() + i * kept, kept),
            annotation.widths.data() + i * per_point);
      },
      out, annotation.retained_points, annotation.grasp_points);
  if (out.top_views == kept) out.top_views = annotation.top_views;
  return out;
}

CompressionStats ComputeCompressionStats(const AnnotationTensor& before,
                                         const SimplifiedAnnotation& after) {
  if (after.source_id != before.id ||
      after.source_point_count != before.point_count() ||
      after.view_sphere.size() != before.view_count() ||
      !(after.gripper == before.gripper)) {
    throw std::invalid_argument(
        "ComputeCompressionStats: simplified annotation has a different source");
  }
  CompressionStats stats;
  stats.candidates_before = before.scores.size();
  stats.candidates_after = after.candidate_count();
  for (const float s : before.scores) stats.positives_before += s > 0.0f;
  stats.bytes_before = SerializeGann(before).size();
  stats.bytes_after = SerializeGann(after).size();
  if (stats.candidates_before > 0) {
    stats.candidate_reduction =
        1.0 - static_cast<double>(stats.candidates_after) /
                  static_cast<double>(stats.candidates_before);
    stats.positive_ratio_before =
        static_cast<double>(stats.positives_before) /
        static_cast<double>(stats.candidates_before);
  }
  stats.storage_reduction = 1.0 - static_cast<double>(stats.bytes_after) /
                                      static_cast<double>(stats.bytes_before);
  return stats;
}

}  // namespace grasplab
