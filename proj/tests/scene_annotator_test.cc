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

#include <omp.h>

#include <cmath>
#include <random>

#include "Eigen/Geometry"
#include "grasplab/reference.h"
#include "grasplab/scene_annotator.h"
#include "gtest/gtest.h"
#include "synth.h"

namespace grasplab {
namespace {

AnnotationConfig SmallConfig() {
  AnnotationConfig cfg;
  cfg.view_count = 12;
  cfg.gripper.angle_count = 4;
  cfg.gripper.depth_grid = {0.01, 0.03};
  cfg.voxel = 0.02;
  return cfg;
}

std::vector<AnnotationTensor> AnnotateAll(const std::vector<SceneObject>& objects,
                                          const AnnotationConfig& cfg) {
  std::vector<AnnotationTensor> out;
  for (const SceneObject& o : objects) out.push_back(AnnotateObject(o.model, cfg));
  return out;
}

// Independent containment check straight from the region classifier.
bool BruteCollides(const GraspFrame& frame, const PointCloud& cloud,
                   const GripperModel& gripper) {
  for (const Vec3& q : cloud.points) {
    const GripperRegion r =
        ClassifyLocal(frame.ToLocal(q), gripper, frame.depth, frame.width);
    if (r == GripperRegion::kFinger || r == GripperRegion::kBase) return true;
  }
  return false;
}

TEST(ProjectAnnotationsTest, UnknownObjectThrows) {
  const AnnotationConfig cfg = SmallConfig();
  const ObjectModel box =
      synth::MakeObject("box", synth::BoxSurface(Vec3(0.04, 0.04, 0.04), 0.004));
  const std::vector<AnnotationTensor> ann = {AnnotateObject(box, cfg)};
  const std::vector<SceneObject> scene = {{box, {"other", RigidTransform{}}}};
  EXPECT_THROW(ProjectAnnotations(scene, ann), std::invalid_argument);
}

TEST(ProjectAnnotationsTest, WorldGraspReproducesWorldRotation) {
  const AnnotationConfig cfg = SmallConfig();
  const ObjectModel box =
      synth::MakeObject("box", synth::BoxSurface(Vec3(0.04, 0.04, 0.04), 0.004));
  RigidTransform pose;
  pose.rotation = Eigen::AngleAxisd(2.1, Vec3(-1, 0.5, 2).normalized()).toRotationMatrix();
  pose.translation = Vec3(0.1, 0.2, 0.3);
  const std::vector<AnnotationTensor> ann = {AnnotateObject(box, cfg)};
  const std::vector<SceneObject> scene = {{box, {"box", pose}}};
  const ObjectCandidates c = ProjectAnnotations(scene, ann)[0];
  for (int j = 0; j < c.tensor.view_count(); ++j) {
    for (int a = 0; a < c.tensor.angle_count(); ++a) {
      const GraspPose g = c.WorldGrasp(0, j, a, 1);
      EXPECT_NEAR(g.view.dot(c.world_views[j]), 1.0, 1e-12);
      EXPECT_LT((RotationFromViewAngle(g.view, g.angle) - c.WorldRotation(j, a))
                    .cwiseAbs()
                    .maxCoeff(),
                1e-12);
      EXPECT_EQ(g.point, c.world_points[0]);
    }
  }
}

TEST(CullCollisionsTest, LoneObjectKeepsItsScores) {
  const AnnotationConfig cfg = SmallConfig();
  const ObjectModel box =
      synth::MakeObject("box", synth::BoxSurface(Vec3(0.04, 0.05, 0.03), 0.003));
  const std::vector<AnnotationTensor> ann = {AnnotateObject(box, cfg)};
  const std::vector<SceneObject> scene = {{box, {"box", RigidTransform{}}}};
  const SceneGroundTruth gt = BuildSceneGroundTruth(
      "lone", scene, ann, SceneCamera{}, PointCloud{}, cfg.gripper);
  ASSERT_EQ(gt.annotations.size(), 1u);
  EXPECT_EQ(gt.annotations[0].tensor.scores, ann[0].scores);
}

class ClutterTest : public ::testing::Test {
 protected:
  void SetUp() override {
    scene_ = synth::RandomBoxScene(3, 0.004, 80, 60);
    // Pull the boxes together so that some grasps reach a neighbour.
    for (std::size_t b = 0; b < scene_.objects.size(); ++b) {
      scene_.objects[b].pose.transform.translation.x() *= 0.7;
      scene_.boxes[b].pose.translation.x() *= 0.7;
    }
    cfg_ = SmallConfig();
    annotations_ = AnnotateAll(scene_.objects, cfg_);
  }

  synth::BoxScene scene_;
  AnnotationConfig cfg_;
  std::vector<AnnotationTensor> annotations_;
};

TEST_F(ClutterTest, CullingMatchesBruteForce) {
  const SceneGroundTruth gt =
      BuildSceneGroundTruth("clutter", scene_.objects, annotations_,
                            scene_.camera, scene_.table, cfg_.gripper);
  std::size_t collided = 0, survivors = 0;
  for (std::size_t o = 0; o < gt.annotations.size(); ++o) {
    const ObjectCandidates& c = gt.annotations[o];
    const AnnotationTensor& t = c.tensor;
    for (int i = 0; i < t.point_count(); ++i) {
      for (int j = 0; j < t.view_count(); ++j) {
        for (int a = 0; a < t.angle_count(); ++a) {
          for (int k = 0; k < t.depth_count(); ++k) {
            const std::size_t idx = t.Index(i, j, a, k);
            const bool hit =
                BruteCollides(c.WorldFrame(i, j, a, k), gt.scene_cloud, cfg_.gripper);
            EXPECT_EQ(c.collided[idx] != 0, hit);
            if (hit) {
              EXPECT_EQ(t.scores[idx], 0.0f);
            } else {
              EXPECT_EQ(t.scores[idx], annotations_[o].scores[idx]);
            }
            collided += hit;
            survivors += !hit && t.scores[idx] > 0.0f;
          }
        }
      }
    }
  }
  EXPECT_GT(collided, 0u);
  EXPECT_GT(survivors, 0u);
}

TEST_F(ClutterTest, FastCullEqualsReferenceAcrossThreadCounts) {
  PointCloud cloud;
  cloud.points = scene_.table.points;
  for (const SceneObject& o : scene_.objects) {
    const PointCloud world = TransformCloud(o.model.surface, o.pose.transform);
    cloud.points.insert(cloud.points.end(), world.points.begin(), world.points.end());
  }
  const CandidateSet projected = ProjectAnnotations(scene_.objects, annotations_);
  const CandidateSet slow = reference::CullCollisions(projected, cloud, cfg_.gripper);
  const int saved = omp_get_max_threads();
  for (const int threads : {1, 3}) {
    omp_set_num_threads(threads);
    const CandidateSet fast = CullCollisions(projected, cloud, cfg_.gripper);
    ASSERT_EQ(fast.size(), slow.size());
    for (std::size_t o = 0; o < fast.size(); ++o) {
      EXPECT_EQ(fast[o].collided, slow[o].collided);
      EXPECT_EQ(fast[o].tensor.scores, slow[o].tensor.scores);
    }
  }
  omp_set_num_threads(saved);
}

TEST_F(ClutterTest, SupervisionMatchesReferenceAndOracles) {
  const SceneGroundTruth gt =
      BuildSceneGroundTruth("clutter", scene_.objects, annotations_,
                            scene_.camera, scene_.table, cfg_.gripper);
  const DepthMap depth = synth::RaycastDepth(scene_.camera, scene_.boxes);
  const SupervisionTargets fast = RenderSupervision(gt, depth);
  const SupervisionTargets slow = reference::RenderSupervision(gt, depth);
  EXPECT_EQ(fast.object_mask, slow.object_mask);
  EXPECT_EQ(fast.graspness_heatmap, slow.graspness_heatmap);
  EXPECT_EQ(fast.point_graspness, slow.point_graspness);
  EXPECT_EQ(fast.view_graspness, slow.view_graspness);

  std::vector<Vec3> surface;
  for (const PointCloud& s : gt.world_surfaces) {
    surface.insert(surface.end(), s.points.begin(), s.points.end());
  }
  std::size_t masked = 0;
  for (int r = 0; r < depth.height; r += 3) {
    for (int c = 0; c < depth.width; c += 3) {
      const std::size_t px = depth.Offset(r, c);
      if (!(depth.values[px] > 0.0f)) {
        EXPECT_EQ(fast.object_mask[px], 0);
        continue;
      }
      const Vec3 q = scene_.camera.pose *
                     UnprojectPixel(depth.intrinsics, r, c, depth.values[px]);
      double best = 1e9;
      for (const Vec3& s : surface) best = std::min(best, (s - q).norm());
      EXPECT_EQ(fast.object_mask[px] != 0, best <= kObjectMaskRadius);
      masked += fast.object_mask[px];
      if (!fast.object_mask[px]) {
        EXPECT_EQ(fast.graspness_heatmap[px], 0.0f);
        continue;
      }
      double nn = 1e9;
      float expected = 0.0f;
      for (std::size_t g = 0; g < fast.grasp_points.size(); ++g) {
        const double d = (fast.grasp_points[g] - q).norm();
        if (d < nn) {
          nn = d;
          expected = fast.point_graspness[g];
        }
      }
      EXPECT_EQ(fast.graspness_heatmap[px], nn <= kHeatmapMatchRadius ? expected : 0.0f);
    }
  }
  EXPECT_GT(masked, 0u);
  for (std::size_t i = 0; i < fast.object_mask.size(); ++i) {
    if (!fast.object_mask[i]) EXPECT_EQ(fast.graspness_heatmap[i], 0.0f);
  }
}

TEST(GraspnessTest, MatchesCountingOracle) {
  AnnotationTensor t;
  t.id = "x";
  t.grasp_points = {Vec3::Zero(), Vec3::UnitX()};
  t.view_sphere = SampleViewSphere(5);
  t.gripper.angle_count = 3;
  t.gripper.depth_grid = {0.01, 0.02};
  t.mu_grid = kDefaultMuGrid;
  std::mt19937 engine(4);
  std::bernoulli_distribution positive(0.3);
  for (std::size_t i = 0; i < 2 * 5 * 3 * 2; ++i) {
    t.scores.push_back(positive(engine) ? 0.5f : 0.0f);
    t.widths.push_back(0.02f);
  }
  const Graspness g = ComputeGraspness(t);
  for (int i = 0; i < 2; ++i) {
    int total = 0;
    double view_sum = 0.0;
    for (int j = 0; j < 5; ++j) {
      int count = 0;
      for (int a = 0; a < 3; ++a) {
        for (int k = 0; k < 2; ++k) count += t.scores[t.Index(i, j, a, k)] > 0.0f;
      }
      EXPECT_DOUBLE_EQ(g.view[i * 5 + j], count / 6.0);
      view_sum += g.view[i * 5 + j];
      total += count;
    }
    EXPECT_DOUBLE_EQ(g.point[i], total / 30.0);
    EXPECT_NEAR(g.point[i], view_sum / 5.0, 1e-12);
    EXPECT_GE(g.point[i], 0.0);
    EXPECT_LE(g.point[i], 1.0);
  }
  std::fill(t.scores.begin(), t.scores.end(), 0.0f);
  for (const double v : ComputeGraspness(t).point) EXPECT_EQ(v, 0.0);
}

TEST(RenderDepthFromCloudTest, SplatsNearestDepth) {
  const SceneCamera camera = synth::TopDownCamera(40, 30, 50.0, 0.6);
  PointCloud cloud;
  cloud.points = {Vec3(0, 0, 0.1), Vec3(0, 0, 0.2)};
  const DepthMap d = RenderDepthFromCloud(cloud, camera, 0);
  const int r = static_cast<int>(std::lround(camera.intrinsics.cy));
  const int c = static_cast<int>(std::lround(camera.intrinsics.cx));
  EXPECT_NEAR(d.at(r, c), 400.0f, 1e-3);
  int filled = 0;
  for (const float v : d.values) filled += v > 0.0f;
  EXPECT_EQ(filled, 1);
}

}  // namespace
}  // namespace grasplab
