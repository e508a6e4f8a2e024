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
#include <set>
#include <tuple>

#include "Eigen/Geometry"
#include "grasplab/object_annotator.h"
#include "grasplab/reference.h"
#include "grasplab/scene_annotator.h"
#include "gtest/gtest.h"
#include "synth.h"

namespace grasplab {
namespace {

GraspPose TopDown(const Vec3& point, double depth, double angle = 0.0) {
  GraspPose g;
  g.point = point;
  g.view = -Vec3::UnitZ();
  g.angle = angle;
  g.depth = depth;
  return g;
}

TEST(ScoreGraspTest, ParallelPlatesScoreNineTenths) {
  const ObjectModel plates =
      synth::MakeObject("plates", synth::ParallelPlates(0.03, 0.02, 0.001));
  const GripperModel gripper;
  GraspPose g = TopDown(Vec3(0, 0, 0.02), 0.02);
  const auto width = AdjustWidth(plates, g, gripper);
  ASSERT_TRUE(width.has_value());
  g.width = *width;
  const GraspScore s = ScoreGrasp(plates, g, gripper, kDefaultMuGrid);
  ASSERT_TRUE(s.contacts.has_value());
  EXPECT_NEAR(s.score, 0.9, 1e-12);
}

TEST(ScoreGraspTest, RightAngleWedgeScoresOneTenth) {
  const ObjectModel wedge =
      synth::MakeObject("wedge", synth::WedgeSurface(0.03, 0.04, 0.001));
  const GripperModel gripper;
  GraspPose g = TopDown(Vec3(0, 0, 0.03), 0.01);
  const auto width = AdjustWidth(wedge, g, gripper);
  ASSERT_TRUE(width.has_value());
  g.width = *width;
  const GraspScore s = ScoreGrasp(wedge, g, gripper, kDefaultMuGrid);
  ASSERT_TRUE(s.contacts.has_value());
  EXPECT_NEAR(s.score, 0.1, 1e-12);
  // Cone half-angle needed is exactly 45 degrees.
  EXPECT_FALSE(IsAntipodal(*s.contacts, 0.8));
  EXPECT_TRUE(IsAntipodal(*s.contacts, 1.0));
}

TEST(ScoreGraspTest, EmptySpaceScoresZero) {
  const ObjectModel box =
      synth::MakeObject("box", synth::BoxSurface(Vec3(0.03, 0.04, 0.04), 0.002));
  GraspPose g = TopDown(Vec3(0.5, 0.5, 0.5), 0.02);
  g.width = 0.05;
  const GraspScore s = ScoreGrasp(box, g, GripperModel{}, kDefaultMuGrid);
  EXPECT_EQ(s.score, 0.0);
  EXPECT_FALSE(s.contacts.has_value());
}

TEST(ScoreGraspTest, RejectsBadFrictionGrid) {
  const ObjectModel box =
      synth::MakeObject("box", synth::BoxSurface(Vec3(0.03, 0.04, 0.04), 0.002));
  const std::vector<double> bad = {0.4, 0.2};
  EXPECT_THROW(ScoreGrasp(box, TopDown(Vec3::Zero(), 0.02), GripperModel{}, bad),
               std::invalid_argument);
}

TEST(ScoreGraspTest, FrictionMonotoneOverRandomGrasps) {
  std::mt19937_64 engine(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  const std::vector<ObjectModel> shapes = {
      synth::MakeObject("box", synth::BoxSurface(Vec3(0.04, 0.03, 0.05), 0.002)),
      synth::MakeObject("sphere", synth::SphereSurface(0.025, 3000)),
      synth::MakeObject("wedge", synth::WedgeSurface(0.03, 0.04, 0.002)),
  };
  const GripperModel gripper;
  const std::set<double> allowed = {0.0, 0.9, 0.7, 0.5, 0.3, 0.1};
  int violations = 0, with_contacts = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const ObjectModel& obj = shapes[trial % shapes.size()];
    const Vec3& p = obj.surface.points[static_cast<std::size_t>(
        u(engine) * obj.surface.size())];
    GraspPose g;
    g.point = p;
    g.view = Vec3(n(engine), n(engine), n(engine)).normalized();
    g.angle = 2 * kPi * u(engine);
    g.depth = gripper.depth_grid[trial % gripper.depth_count()];
    const auto width = AdjustWidth(obj, g, gripper);
    g.width = width ? *width : 0.5 * gripper.max_width;
    const GraspScore s = ScoreGrasp(obj, g, gripper, kDefaultMuGrid);
    bool seen = false;
    if (s.contacts) {
      ++with_contacts;
      for (const double mu : kDefaultMuGrid) {
        const bool ok = IsAntipodal(*s.contacts, mu);
        if (seen && !ok) ++violations;
        seen = seen || ok;
      }
    }
    bool in_set = false;
    for (const double a : allowed) in_set = in_set || std::abs(s.score - a) < 1e-12;
    EXPECT_TRUE(in_set) << s.score;
  }
  EXPECT_EQ(violations, 0);
  EXPECT_GT(with_contacts, 100);
}

TEST(AdjustWidthTest, BoxGetsSpanPlusClearance) {
  const ObjectModel box =
      synth::MakeObject("box", synth::BoxSurface(Vec3(0.03, 0.04, 0.04), 0.001));
  GripperModel gripper;
  gripper.max_width = 0.08;
  const auto width = AdjustWidth(box, TopDown(Vec3(0, 0, 0.02), 0.02), gripper);
  ASSERT_TRUE(width.has_value());
  EXPECT_NEAR(*width, 0.03 + kWidthClearance, 1e-12);
}

TEST(AdjustWidthTest, TooWideAndFreeSpaceGiveNone) {
  GripperModel gripper;
  gripper.max_width = 0.08;
  const ObjectModel wide =
      synth::MakeObject("wide", synth::BoxSurface(Vec3(0.09, 0.04, 0.04), 0.002));
  EXPECT_FALSE(AdjustWidth(wide, TopDown(Vec3(0, 0, 0.02), 0.02), gripper));
  EXPECT_FALSE(AdjustWidth(wide, TopDown(Vec3(1, 1, 1), 0.02), gripper));
  GraspPose too_wide = TopDown(Vec3::Zero(), 0.02);
  too_wide.width = 0.09;
  EXPECT_THROW(AdjustWidth(wide, too_wide, gripper), std::invalid_argument);
}

TEST(SampleGraspPointsTest, OnePointPerOccupiedVoxel) {
  const ObjectModel cube =
      synth::MakeObject("cube", synth::BoxSurface(Vec3(1, 1, 1), 0.05));
  const auto points = SampleGraspPoints(cube, 0.5);
  std::set<std::tuple<long, long, long>> cells;
  for (const Vec3& p : cube.surface.points) {
    cells.emplace(std::floor(p.x() / 0.5), std::floor(p.y() / 0.5),
                  std::floor(p.z() / 0.5));
  }
  EXPECT_EQ(points.size(), cells.size());
  EXPECT_LE(points.size(), 24u);
  for (const Vec3& p : points) {
    bool on_surface = false;
    for (const Vec3& s : cube.surface.points) on_surface = on_surface || s == p;
    EXPECT_TRUE(on_surface);
  }
}

TEST(SampleGraspPointsTest, LargeVoxelGivesOnePoint) {
  PointCloud small = synth::BoxSurface(Vec3(0.01, 0.01, 0.01), 0.002);
  for (Vec3& p : small.points) p += Vec3::Constant(0.5);
  EXPECT_EQ(SampleGraspPoints(synth::MakeObject("s", small), 1.0).size(), 1u);
}

TEST(SampleGraspPointsTest, SphereCoversAllOctants) {
  const double r = 0.04;
  const auto points = SampleGraspPoints(
      synth::MakeObject("sphere", synth::SphereSurface(r, 4000)), r / 4);
  std::set<int> octants;
  for (const Vec3& p : points) {
    octants.insert((p.x() > 0) | ((p.y() > 0) << 1) | ((p.z() > 0) << 2));
  }
  EXPECT_EQ(octants.size(), 8u);
}

TEST(SampleGraspPointsTest, RejectsEmptySurface) {
  EXPECT_THROW(SampleGraspPoints(ObjectModel{"e", {}}, 0.01), std::invalid_argument);
}

TEST(AnnotateTest, DefaultGridHas14400CandidatesPerPoint) {
  const ObjectModel box =
      synth::MakeObject("box", synth::BoxSurface(Vec3(0.04, 0.04, 0.04), 0.002));
  const std::vector<Vec3> points = {box.surface.points[0], box.surface.points[500]};
  const AnnotationTensor t = AnnotatePoints(box, points, AnnotationConfig{});
  EXPECT_EQ(t.candidates_per_point(), 14400u);
  EXPECT_EQ(t.scores.size(), 2u * 14400u);
  EXPECT_NO_THROW(t.Validate());
}

TEST(AnnotateTest, StoredGraspPointsAreFloatRounded) {
  const ObjectModel sphere =
      synth::MakeObject("sphere", synth::SphereSurface(0.03, 500));
  AnnotationConfig cfg;
  cfg.view_count = 2;
  cfg.gripper.angle_count = 1;
  cfg.gripper.depth_grid = {0.01};
  const std::vector<Vec3> points(sphere.surface.points.begin(),
                                 sphere.surface.points.begin() + 20);
  const AnnotationTensor t = AnnotatePoints(sphere, points, cfg);
  for (int i = 0; i < t.point_count(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const float f = static_cast<float>(points[i][c]);
      EXPECT_EQ(t.grasp_points[i][c], static_cast<double>(f));
    }
  }
}

TEST(AnnotateTest, SingleCandidateGrid) {
  const ObjectModel box =
      synth::MakeObject("box", synth::BoxSurface(Vec3(0.04, 0.04, 0.04), 0.004));
  AnnotationConfig cfg;
  cfg.view_count = 1;
  cfg.gripper.angle_count = 1;
  cfg.gripper.depth_grid = {0.02};
  cfg.voxel = 0.02;
  const AnnotationTensor t = AnnotateObject(box, cfg);
  EXPECT_GT(t.point_count(), 0);
  EXPECT_EQ(t.candidates_per_point(), 1u);
  EXPECT_EQ(t.scores.size(), static_cast<std::size_t>(t.point_count()));
}

AnnotationConfig SmallConfig() {
  AnnotationConfig cfg;
  cfg.view_count = 24;
  cfg.gripper.angle_count = 4;
  cfg.gripper.depth_grid = {0.01, 0.03};
  return cfg;
}

std::vector<Vec3> EveryNth(const PointCloud& c, std::size_t stride, std::size_t count) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < c.size() && out.size() < count; i += stride) {
    out.push_back(c.points[i]);
  }
  return out;
}

TEST(AnnotateTest, MatchesPerCandidateCalls) {
  const ObjectModel box =
      synth::MakeObject("box", synth::BoxSurface(Vec3(0.03, 0.05, 0.04), 0.002));
  const AnnotationConfig cfg = SmallConfig();
  const auto points = EveryNth(box.surface, 97, 10);
  const AnnotationTensor t = AnnotatePoints(box, points, cfg);
  int positives = 0;
  for (int i = 0; i < t.point_count(); ++i) {
    for (int j = 0; j < t.view_count(); ++j) {
      for (int a = 0; a < t.angle_count(); ++a) {
        for (int k = 0; k < t.depth_count(); ++k) {
          GraspPose g = t.Candidate(i, j, a, k);
          const std::size_t idx = t.Index(i, j, a, k);
          const auto width = AdjustWidth(box, GraspPose{g.point, g.view, g.angle,
                                                        g.depth, 0.0, 0.0},
                                         cfg.gripper);
          if (!width) {
            EXPECT_EQ(t.scores[idx], 0.0f);
            continue;
          }
          EXPECT_EQ(t.widths[idx], static_cast<float>(*width));
          g.width = t.widths[idx];
          const GraspScore s = ScoreGrasp(box, g, cfg.gripper, cfg.mu_grid);
          EXPECT_EQ(t.scores[idx], static_cast<float>(s.score));
          positives += s.score > 0;
        }
      }
    }
  }
  EXPECT_GT(positives, 0);
}

TEST(AnnotateTest, FastPathEqualsReference) {
  const ObjectModel wedge =
      synth::MakeObject("wedge", synth::WedgeSurface(0.03, 0.04, 0.002));
  const AnnotationConfig cfg = SmallConfig();
  const auto points = EveryNth(wedge.surface, 53, 10);
  const AnnotationTensor fast = AnnotatePoints(wedge, points, cfg);
  const AnnotationTensor slow = reference::AnnotatePoints(wedge, points, cfg);
  EXPECT_EQ(fast.scores, slow.scores);
  EXPECT_EQ(fast.widths, slow.widths);
}

TEST(AnnotateTest, ThreadCountDoesNotChangeOutput) {
  const ObjectModel box =
      synth::MakeObject("box", synth::BoxSurface(Vec3(0.03, 0.05, 0.04), 0.002));
  AnnotationConfig cfg = SmallConfig();
  cfg.voxel = 0.01;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const AnnotationTensor serial = AnnotateObject(box, cfg);
  omp_set_num_threads(4);
  const AnnotationTensor parallel = AnnotateObject(box, cfg);
  omp_set_num_threads(saved);
  EXPECT_EQ(serial, parallel);
}

TEST(AnnotateTest, RigidMotionPreservesScores) {
  const ObjectModel box =
      synth::MakeObject("box", synth::BoxSurface(Vec3(0.03, 0.05, 0.04), 0.002));
  const AnnotationConfig cfg = SmallConfig();
  const AnnotationTensor t = AnnotatePoints(box, EveryNth(box.surface, 131, 6), cfg);

  RigidTransform pose;
  pose.rotation =
      Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  pose.translation = Vec3(0.3, -0.2, 0.1);
  const ObjectModel moved{"box", TransformCloud(box.surface, pose)};
  const std::vector<SceneObject> scene = {{box, {"box", pose}}};
  const std::vector<AnnotationTensor> ann = {t};
  const ObjectCandidates c = ProjectAnnotations(scene, ann)[0];
  for (int i = 0; i < t.point_count(); ++i) {
    for (int j = 0; j < t.view_count(); ++j) {
      for (int a = 0; a < t.angle_count(); ++a) {
        for (int k = 0; k < t.depth_count(); ++k) {
          const std::size_t idx = t.Index(i, j, a, k);
          if (t.scores[idx] == 0.0f) continue;
          const GraspScore s =
              ScoreGrasp(moved, c.WorldFrame(i, j, a, k), cfg.gripper, cfg.mu_grid);
          EXPECT_NEAR(s.score, t.scores[idx], 1e-6);
        }
      }
    }
  }
}

}  // namespace
}  // namespace grasplab
