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

#include "grasplab/evaluator.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "grasplab/io_util.h"

namespace grasplab {
namespace {

constexpr double kRadiusSlack = 1e-9;

// Radius around the grasp point enclosing the whole gripper at this pose.
double GripperReach(const GripperModel& g, double depth, double width) {
  const double half_x = 0.5 * width + g.finger_thickness;
  const double half_y = 0.5 * g.finger_thickness;
  const double z = std::max(std::abs(depth),
                            std::abs(depth - g.finger_length - g.base_depth));
  return std::sqrt(half_x * half_x + half_y * half_y + z * z) + kRadiusSlack;
}

void AppendNumber(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

double ParseNumber(std::string_view field) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw FormatError("predictions CSV: bad number '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

constexpr const char* kPredictionColumns =
    "scene_id,px,py,pz,vx,vy,vz,theta,depth,width,confidence";

}  // namespace

PredictionSet MakePredictionSet(std::string scene_id,
                                std::vector<ScoredGrasp> grasps) {
  for (const ScoredGrasp& g : grasps) {
    if (!std::isfinite(g.confidence)) {
      throw std::invalid_argument("prediction with non-finite confidence");
    }
  }
  std::stable_sort(grasps.begin(), grasps.end(),
                   [](const ScoredGrasp& a, const ScoredGrasp& b) {
                     return a.confidence > b.confidence;
                   });
  return {std::move(scene_id), std::move(grasps)};
}

SceneJudge::SceneJudge(const SceneGroundTruth& scene) : scene_(scene) {
  for (std::size_t o = 0; o < scene.world_surfaces.size(); ++o) {
    const PointCloud& s = scene.world_surfaces[o];
    for (std::size_t i = 0; i < s.size(); ++i) {
      surface_points_.push_back(s.points[i]);
      surface_object_.push_back(static_cast<int>(o));
      surface_local_.push_back(static_cast<std::uint32_t>(i));
    }
  }
  const double cell = scene.gripper.BoundingRadius();
  if (!scene.scene_cloud.empty()) cloud_grid_.emplace(scene.scene_cloud.points, cell);
  if (!surface_points_.empty()) {
    surface_grid_.emplace(surface_points_, cell);
    Vec3 lo = surface_points_.front(), hi = lo;
    for (const Vec3& p : surface_points_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    extent_ = (hi - lo).norm();
    box_center_ = 0.5 * (lo + hi);
  }
}

bool SceneJudge::Collides(const GraspPose& grasp) const {
  if (!cloud_grid_) return false;
  const GraspFrame frame = FrameFromPose(grasp);
  const double reach = GripperReach(scene_.gripper, grasp.depth, grasp.width);
  std::vector<LocalSample> samples;
  cloud_grid_->ForEachInRadius(grasp.point, reach, [&](std::uint32_t i) {
    samples.push_back({frame.ToLocal(scene_.scene_cloud.points[i]), i});
  });
  return AnyInGripper(samples, scene_.gripper, grasp.depth, grasp.width);
}

std::optional<int> SceneJudge::NearestObject(const Vec3& query) const {
  if (!surface_grid_) return std::nullopt;
  // Every surface point lies within this distance of the query.
  const double bound = (query - box_center_).norm() + 0.5 * extent_ + 1e-6;
  for (double r = surface_grid_->cell();; r *= 2.0) {
    const double radius = std::min(r, bound);
    if (const auto nn = surface_grid_->Nearest(query, radius)) {
      return surface_object_[*nn];
    }
    if (radius >= bound) return std::nullopt;
  }
}

bool SceneJudge::Judge(const GraspPose& grasp, double mu) const {
  if (!(mu > 0.0)) throw std::invalid_argument("Judge: mu must be > 0");
  if (!surface_grid_ || !cloud_grid_) return false;
  // Stored widths are float32, which may round just above max_width.
  const double max_width = std::max(
      scene_.gripper.max_width,
      static_cast<double>(static_cast<float>(scene_.gripper.max_width)));
  if (!(grasp.width >= 0.0 && grasp.width <= max_width)) {
    return false;
  }
  if (Collides(grasp)) return false;
  const GraspFrame frame = FrameFromPose(grasp);
  const std::optional<int> object =
      NearestObject(frame.ClosingCenter(scene_.gripper));
  if (!object) return false;
  const double reach = GripperReach(scene_.gripper, grasp.depth, grasp.width);
  std::vector<LocalSample> samples;
  surface_grid_->ForEachInRadius(grasp.point, reach, [&](std::uint32_t i) {
    if (surface_object_[i] == *object) {
      samples.push_back({frame.ToLocal(surface_points_[i]), surface_local_[i]});
    }
  });
  const PointCloud& surface = scene_.world_surfaces[*object];
  const auto contacts = FindContacts(samples, surface.points, surface.normals,
                                     scene_.gripper, grasp.depth, grasp.width);
  return contacts && IsAntipodal(*contacts, mu);
}

bool JudgeGrasp(const GraspPose& grasp, const SceneGroundTruth& scene,
                double mu) {
  return SceneJudge(scene).Judge(grasp, mu);
}

double MeanPrecision(std::span<const std::uint8_t> judgments, int top_k) {
  if (top_k < 1) throw std::invalid_argument("MeanPrecision: top_k < 1");
  double hits = 0.0, sum = 0.0;
  for (int k = 1; k <= top_k; ++k) {
    if (static_cast<std::size_t>(k) <= judgments.size() && judgments[k - 1]) {
      hits += 1.0;
    }
    sum += hits / k;
  }
  return sum / top_k;
}

std::optional<double> APReport::ApAt(double mu) const {
  for (std::size_t m = 0; m < mu_grid.size(); ++m) {
    if (std::abs(mu_grid[m] - mu) < 1e-9) return ap_per_mu[m];
  }
  return std::nullopt;
}

SceneAP EvaluateScene(const PredictionSet& predictions,
                      const SceneGroundTruth& scene,
                      std::span<const double> mu_grid, int top_k) {
  if (predictions.grasps.empty()) {
    throw std::invalid_argument("EvaluateScene: empty prediction set");
  }
  if (mu_grid.empty()) throw std::invalid_argument("EvaluateScene: empty mu grid");
  for (const double mu : mu_grid) {
    if (!(mu > 0.0)) throw std::invalid_argument("EvaluateScene: mu must be > 0");
  }
  const SceneJudge judge(scene);
  const std::size_t n =
      std::min(predictions.grasps.size(), static_cast<std::size_t>(top_k));
  const std::size_t m = mu_grid.size();
  std::vector<std::uint8_t> judged(n * m, 0);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(n * m); ++t) {
    judged[t] = judge.Judge(predictions.grasps[t / m].pose, mu_grid[t % m]);
  }
  SceneAP out;
  out.scene_id = predictions.scene_id;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::uint8_t> column(n);
    for (std::size_t i = 0; i < n; ++i) column[i] = judged[i * m + j];
    out.ap_per_mu.push_back(MeanPrecision(column, top_k));
  }
  out.ap = std::accumulate(out.ap_per_mu.begin(), out.ap_per_mu.end(), 0.0) /
           static_cast<double>(m);
  return out;
}

APReport AggregateReport(std::span<const double> mu_grid,
                         std::vector<SceneAP> scenes) {
  APReport report;
  report.mu_grid.assign(mu_grid.begin(), mu_grid.end());
  report.ap_per_mu.assign(mu_grid.size(), 0.0);
  for (const SceneAP& s : scenes) {
    if (s.ap_per_mu.size() != mu_grid.size()) {
      throw std::invalid_argument("AggregateReport: mu grid mismatch");
    }
    for (std::size_t j = 0; j < mu_grid.size(); ++j) {
      report.ap_per_mu[j] += s.ap_per_mu[j] / static_cast<double>(scenes.size());
    }
  }
  if (!mu_grid.empty()) {
    report.ap = std::accumulate(report.ap_per_mu.begin(),
                                report.ap_per_mu.end(), 0.0) /
                static_cast<double>(mu_grid.size());
  }
  report.per_scene = std::move(scenes);
  return report;
}

nlohmann::json ReportToJson(const APReport& report) {
  nlohmann::json per_mu = nlohmann::json::object();
  std::string key;
  auto mu_key = [&](double mu) {
    key.clear();
    AppendNumber(key, mu);
    return key;
  };
  for (std::size_t j = 0; j < report.mu_grid.size(); ++j) {
    per_mu[mu_key(report.mu_grid[j])] = report.ap_per_mu[j];
  }
  nlohmann::json scenes = nlohmann::json::array();
  for (const SceneAP& s : report.per_scene) {
    nlohmann::json row = {{"scene_id", s.scene_id}, {"ap", s.ap}};
    nlohmann::json sm = nlohmann::json::object();
    for (std::size_t j = 0; j < report.mu_grid.size(); ++j) {
      sm[mu_key(report.mu_grid[j])] = s.ap_per_mu[j];
    }
    row["ap_per_mu"] = std::move(sm);
    scenes.push_back(std::move(row));
  }
  return {{"ap", report.ap},
          {"mu_grid", report.mu_grid},
          {"ap_per_mu", std::move(per_mu)},
          {"per_scene", std::move(scenes)}};
}

std::string ReportToCsv(const APReport& report) {
  auto at = [&](const std::vector<double>& values, double mu) -> std::string {
    for (std::size_t j = 0; j < report.mu_grid.size(); ++j) {
      if (std::abs(report.mu_grid[j] - mu) < 1e-9) {
        std::string s;
        AppendNumber(s, values[j]);
        return s;
      }
    }
    return "";
  };
  std::string out = "scene,AP,AP_0.8,AP_0.4\n";
  auto row = [&](const std::string& name, double ap,
                 const std::vector<double>& per_mu) {
    out += name + ",";
    AppendNumber(out, ap);
    out += "," + at(per_mu, 0.8) + "," + at(per_mu, 0.4) + "\n";
  };
  for (const SceneAP& s : report.per_scene) row(s.scene_id, s.ap, s.ap_per_mu);
  row("mean", report.ap, report.ap_per_mu);
  return out;
}

std::string PredictionsToCsv(std::span<const PredictionSet> sets) {
  std::string out = std::string(kPredictionColumns) + "\n";
  for (const PredictionSet& set : sets) {
    for (const ScoredGrasp& g : set.grasps) {
      out += set.scene_id;
      const double fields[] = {g.pose.point.x(), g.pose.point.y(),
                               g.pose.point.z(), g.pose.view.x(),
                               g.pose.view.y(),  g.pose.view.z(),
                               g.pose.angle,     g.pose.depth,
                               g.pose.width,     g.confidence};
      for (const double f : fields) {
        out += ',';
        AppendNumber(out, f);
      }
      out += '\n';
    }
  }
  return out;
}

std::vector<PredictionSet> PredictionsFromCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("predictions CSV: empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kPredictionColumns) {
    throw FormatError("predictions CSV: expected header '" +
                      std::string(kPredictionColumns) + "'");
  }
  std::vector<std::string> order;
  std::map<std::string, std::vector<ScoredGrasp>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string_view> f = SplitCsv(line);
    if (f.size() != 11) {
      throw FormatError("predictions CSV: line " + std::to_string(line_no) +
                        " has " + std::to_string(f.size()) + " fields");
    }
    ScoredGrasp g;
    g.pose.point = Vec3(ParseNumber(f[1]), ParseNumber(f[2]), ParseNumber(f[3]));
    g.pose.view = Vec3(ParseNumber(f[4]), ParseNumber(f[5]), ParseNumber(f[6]));
    g.pose.angle = ParseNumber(f[7]);
    g.pose.depth = ParseNumber(f[8]);
    g.pose.width = ParseNumber(f[9]);
    g.confidence = ParseNumber(f[10]);
    const double norm = g.pose.view.norm();
    if (!(std::abs(norm - 1.0) < 1e-6)) {
      throw FormatError("predictions CSV: line " + std::to_string(line_no) +
                        " has a non-unit view");
    }
    g.pose.view /= norm;
    const std::string scene(f[0]);
    if (!rows.count(scene)) order.push_back(scene);
    rows[scene].push_back(g);
  }
  std::vector<PredictionSet> out;
  for (const std::string& scene : order) {
    out.push_back(MakePredictionSet(scene, std::move(rows[scene])));
  }
  return out;
}

std::vector<ScoredGrasp> GroundTruthGrasps(const SceneGroundTruth& scene,
                                           double min_score,
                                           std::size_t limit) {
  struct Ref {
    float score;
    int object;
    std::size_t index;
  };
  std::vector<Ref> refs;
  for (std::size_t o = 0; o < scene.annotations.size(); ++o) {
    const std::vector<float>& scores = scene.annotations[o].tensor.scores;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] > 0.0f && scores[i] >= static_cast<float>(min_score)) {
        refs.push_back({scores[i], static_cast<int>(o), i});
      }
    }
  }
  std::stable_sort(refs.begin(), refs.end(),
                   [](const Ref& a, const Ref& b) { return a.score > b.score; });
  if (refs.size() > limit) refs.resize(limit);
  std::vector<ScoredGrasp> out;
  for (const Ref& r : refs) {
    const ObjectCandidates& c = scene.annotations[r.object];
    const AnnotationTensor& t = c.tensor;
    std::size_t rest = r.index;
    const int k = static_cast<int>(rest % t.depth_count());
    rest /= t.depth_count();
    const int a = static_cast<int>(rest % t.angle_count());
    rest /= t.angle_count();
    const int j = static_cast<int>(rest % t.view_count());
    const int i = static_cast<int>(rest / t.view_count());
    const GraspPose pose = c.WorldGrasp(i, j, a, k);
    out.push_back({pose, pose.score});
  }
  return out;
}

ProposalResult ProposeGrasps(const PointCloud& cloud,
                             std::span<const double> graspness,
                             const ProposalOptions& options) {
  const GripperModel& gripper = options.gripper;
  gripper.Validate();
  if (options.top_m < 0) throw std::invalid_argument("ProposeGrasps: top_m < 0");
  if (graspness.size() != cloud.size()) {
    throw std::invalid_argument("ProposeGrasps: graspness size mismatch");
  }
  if (!cloud.HasNormals()) {
    throw std::invalid_argument("ProposeGrasps: cloud has no normals");
  }
  if ((options.bank == nullptr) != (options.weights == nullptr)) {
    throw std::invalid_argument("ProposeGrasps: bank and weights go together");
  }

  std::vector<std::uint32_t> order;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (graspness[i] > 0.0) order.push_back(static_cast<std::uint32_t>(i));
  }
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return graspness[a] > graspness[b];
  });
  if (order.size() > static_cast<std::size_t>(options.top_m)) {
    order.resize(options.top_m);
  }
  ProposalResult result;
  result.predictions.scene_id = options.scene_id;
  if (order.empty()) {
    result.no_graspable_points = true;
    return result;
  }

  const double radius = gripper.BoundingRadius();
  const SpatialHash grid(cloud.points, radius);
  const int angles = gripper.angle_count;
  const int depths = gripper.depth_count();
  const double half_y = 0.5 * gripper.finger_thickness;
  const double half_max = 0.5 * gripper.max_width;
  std::vector<std::vector<ScoredGrasp>> per_point(order.size());

  std::vector<double> affinity(order.size(), 1.0);
  if (options.bank != nullptr) {
    std::vector<LocalFeature> features;
    for (const std::uint32_t i : order) {
      features.push_back(ExtractDescriptor(cloud, cloud.points[i],
                                           -cloud.normals[i], gripper,
                                           options.bank->dim()));
    }
    const std::vector<LocalFeature> enhanced =
        Enhance(features, *options.bank, *options.weights);
    for (std::size_t m = 0; m < order.size(); ++m) {
      const Eigen::VectorXd& f = enhanced[m].vector;
      double best = -1.0;
      for (int k = 0; k < options.bank->size(); ++k) {
        const double denom = f.norm() * options.bank->entries.row(k).norm();
        if (denom > 0.0) {
          best = std::max(best, options.bank->entries.row(k).dot(f) / denom);
        }
      }
      affinity[m] = 0.5 + 0.5 * std::clamp(best, -1.0, 1.0);
    }
  }

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t m = 0; m < static_cast<std::int64_t>(order.size()); ++m) {
    const std::uint32_t index = order[m];
    const Vec3& p = cloud.points[index];
    const Vec3 view = -cloud.normals[index];
    const std::vector<std::uint32_t> near = grid.RadiusSearch(p, radius);
    std::vector<Vec3> local(near.size());
    for (int a = 0; a < angles; ++a) {
      const double angle = gripper.AngleAt(a);
      const GraspFrame frame{p, RotationFromViewAngle(view, angle), 0.0, 0.0};
      for (std::size_t n = 0; n < near.size(); ++n) {
        local[n] = frame.ToLocal(cloud.points[near[n]]);
      }
      for (int k = 0; k < depths; ++k) {
        const double depth = gripper.depth_grid[k];
        double span = -1.0;
        for (const Vec3& q : local) {
          if (std::abs(q.y()) <= half_y && q.z() <= depth &&
              q.z() >= depth - gripper.finger_length &&
              std::abs(q.x()) <= half_max) {
            span = std::max(span, std::abs(q.x()));
          }
        }
        if (span < 0.0) continue;
        const double width =
            std::min(2.0 * span + kWidthClearance, gripper.max_width);
        int inside = 0, blocked = 0;
        for (const Vec3& q : local) {
          switch (ClassifyLocal(q, gripper, depth, width)) {
            case GripperRegion::kClosing: ++inside; break;
            case GripperRegion::kFinger:
            case GripperRegion::kBase: ++blocked; break;
            case GripperRegion::kOutside: break;
          }
        }
        const double free_fraction =
            1.0 - static_cast<double>(blocked) / (inside + blocked);
        ScoredGrasp g;
        g.pose.point = p;
        g.pose.view = view;
        g.pose.angle = angle;
        g.pose.depth = depth;
        g.pose.width = width;
        g.confidence = graspness[index] * free_fraction * affinity[m];
        per_point[m].push_back(g);
      }
    }
  }
  std::vector<ScoredGrasp> all;
  for (auto& v : per_point) all.insert(all.end(), v.begin(), v.end());
  result.predictions = MakePredictionSet(options.scene_id, std::move(all));
  result.no_graspable_points = result.predictions.grasps.empty();
  return result;
}

}  // namespace grasplab
