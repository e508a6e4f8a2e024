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

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "Eigen/Geometry"
#include "cli_support.h"
#include "grasplab/config.h"
#include "grasplab/evaluator.h"
#include "grasplab/feature_enhancer.h"
#include "grasplab/gann_io.h"
#include "grasplab/image_io.h"
#include "grasplab/io_util.h"
#include "grasplab/ply_io.h"
#include "grasplab/simplifier.h"
#include "gtest/gtest.h"
#include "scene_file.h"
#include "synth.h"

namespace grasplab {
namespace {

using clitest::RunCli;
using clitest::TempDir;

synth::BoxScene SingleBox(bool posed) {
  synth::BoxScene scene;
  scene.camera = synth::TopDownCamera(80, 60, 100.0, 0.6);
  synth::SynthBox box;
  box.size = Vec3(0.04, 0.05, 0.06);
  if (posed) {
    box.pose.rotation = Eigen::AngleAxisd(0.4, Vec3::UnitZ()).toRotationMatrix();
    box.pose.translation = Vec3(0.01, -0.01, 0.03);
  }
  scene.boxes.push_back(box);
  SceneObject object;
  object.model = synth::MakeObject("box0", synth::BoxSurface(box.size, 0.004));
  object.pose = {"box0", box.pose};
  scene.objects.push_back(object);
  scene.table = synth::PlaneSurface(0.2, 0.004);
  return scene;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    box_ply_ = dir_ / "box.ply";
    WritePly(box_ply_, synth::BoxSurface(Vec3(0.04, 0.05, 0.06), 0.004));
  }

  TempDir dir_{"cli"};
  std::string box_ply_;
};

TEST_F(CliTest, AnnotateTrivialGridHasOneCandidatePerPoint) {
  const auto r = RunCli({"annotate", box_ply_, "--views", "1", "--angles", "1",
                         "--depths", "1", "--output", dir_ / "box.gann"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(r.summary["status"], "ok");
  EXPECT_EQ(r.summary["candidates_per_point"], 1);
  const AnnotationTensor t = std::get<AnnotationTensor>(ReadGann(dir_ / "box.gann"));
  EXPECT_EQ(r.summary["points"].get<int>(), t.point_count());
  EXPECT_EQ(t.scores.size(), static_cast<std::size_t>(t.point_count()));
  EXPECT_EQ(t.id, "box");
}

TEST_F(CliTest, AnnotateDefaultGridHas14400CandidatesPerPoint) {
  const auto r = RunCli({"annotate", box_ply_, "--voxel", "0.05", "--output",
                         dir_ / "box.gann"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(r.summary["candidates_per_point"], 14400);
  EXPECT_EQ(r.summary["views"], 300);
  EXPECT_EQ(r.summary["angles"], 12);
  EXPECT_EQ(r.summary["depths"], 4);
  EXPECT_GT(r.summary["positives"].get<int>(), 0);
}

TEST_F(CliTest, AnnotateRerunIsByteIdentical) {
  std::vector<std::string> args = {"annotate", box_ply_, "--views", "20", "--angles",
                                   "6", "--voxel", "0.02", "--output"};
  auto a = args, b = args;
  a.push_back(dir_ / "a.gann");
  b.push_back(dir_ / "b.gann");
  ASSERT_EQ(RunCli(a).exit_code, 0);
  ASSERT_EQ(RunCli(b).exit_code, 0);
  EXPECT_EQ(ReadFileBytes(dir_ / "a.gann"), ReadFileBytes(dir_ / "b.gann"));
}

TEST_F(CliTest, InputErrorsExitTwo) {
  auto missing = RunCli({"annotate", dir_ / "nope.ply", "--output", dir_ / "x.gann"});
  EXPECT_EQ(missing.exit_code, 2);
  EXPECT_EQ(missing.summary["error_code"], "input_error");
  EXPECT_EQ(missing.summary["status"], "error");

  WriteFileBytes(dir_ / "bad.ply", "ply\nformat ascii 1.0\nelement vertex 2\nend_header\n");
  EXPECT_EQ(RunCli({"annotate", dir_ / "bad.ply", "--output", dir_ / "x.gann"}).exit_code, 2);

  PointCloud no_normals;
  no_normals.points = {Vec3(0, 0, 0), Vec3(0.01, 0, 0)};
  WritePly(dir_ / "plain.ply", no_normals);
  EXPECT_EQ(RunCli({"annotate", dir_ / "plain.ply", "--output", dir_ / "x.gann"}).exit_code, 2);

  EXPECT_EQ(RunCli({"annotate", box_ply_, "--set", "gripper.nope=1", "--output",
                    dir_ / "x.gann"}).exit_code, 2);
  EXPECT_EQ(RunCli({"annotate", box_ply_, "--depths", "9", "--output", dir_ / "x.gann"})
                .exit_code, 2);
  EXPECT_EQ(RunCli({"annotate", box_ply_}).exit_code, 2);
  const auto usage = RunCli({"frobnicate"});
  EXPECT_EQ(usage.exit_code, 2);
  EXPECT_EQ(usage.summary["error_code"], "usage_error");
  EXPECT_FALSE(std::filesystem::exists(dir_ / "x.gann"));
}

TEST_F(CliTest, InvariantViolationExitsThree) {
  ASSERT_EQ(RunCli({"annotate", box_ply_, "--views", "4", "--angles", "2", "--output",
                    dir_ / "box.gann"}).exit_code, 0);
  Container c = ReadContainer(ReadFileBytes(dir_ / "box.gann"), kGannMagic, kGannVersion);
  std::vector<ContainerBlock> blocks = c.blocks;
  for (ContainerBlock& b : blocks) {
    if (b.name != "scores") continue;
    const float bad = 2.0f;
    std::memcpy(b.data.data(), &bad, sizeof(bad));
  }
  WriteFileBytes(dir_ / "broken.gann",
                 WriteContainer(kGannMagic, kGannVersion, c.header, blocks));
  const auto r = RunCli({"simplify", dir_ / "broken.gann", "--output", dir_ / "s.gann"});
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(r.summary["error_code"], "invariant_violation");
}

TEST_F(CliTest, DumpedConfigReloadsToEqualConfig) {
  const auto r = RunCli({"annotate", box_ply_, "--seed", "77", "--views", "5", "--set",
                         "bank.alpha=0.5", "--set", "noise.sigma0=1.25", "--set",
                         "annotation.mu_grid=[0.3, 0.9]", "--dump-config", dir_ / "eff.toml",
                         "--output", dir_ / "box.gann"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const PipelineConfig loaded = LoadConfig(dir_ / "eff.toml");
  PipelineConfig expected;
  expected.seed = 77;
  expected.view_count = 5;
  expected.bank.alpha = 0.5;
  expected.noise.sigma0 = 1.25;
  expected.mu_grid = {0.3, 0.9};
  EXPECT_EQ(loaded, expected);
  // Feeding the dump back reproduces it.
  ASSERT_EQ(RunCli({"annotate", box_ply_, "--config", dir_ / "eff.toml", "--dump-config",
                    dir_ / "eff2.toml", "--output", dir_ / "box2.gann"}).exit_code, 0);
  EXPECT_EQ(ReadFileBytes(dir_ / "eff.toml"), ReadFileBytes(dir_ / "eff2.toml"));
  EXPECT_EQ(ReadFileBytes(dir_ / "box.gann"), ReadFileBytes(dir_ / "box2.gann"));
}

TEST_F(CliTest, FlagsWinOverConfig) {
  WriteFileBytes(dir_ / "cfg.toml", "[run]\nseed = 5\n[annotation]\nview_count = 7\n");
  const auto r = RunCli({"annotate", box_ply_, "--config", dir_ / "cfg.toml", "--views",
                         "3", "--seed", "9", "--angles", "2", "--output", dir_ / "b.gann"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(r.summary["views"], 3);
  EXPECT_EQ(r.summary["seed"], 9);
  EXPECT_EQ(r.summary["stage_seed"].get<std::uint64_t>(), StageSeed(9, "annotate"));
}

TEST_F(CliTest, SimplifySummaryMatchesLibraryStats) {
  ASSERT_EQ(RunCli({"annotate", box_ply_, "--views", "30", "--angles", "4", "--voxel",
                    "0.02", "--output", dir_ / "box.gann"}).exit_code, 0);
  const auto r = RunCli({"simplify", dir_ / "box.gann", "--top-views", "6", "--output",
                         dir_ / "simple.gann"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const AnnotationTensor dense = std::get<AnnotationTensor>(ReadGann(dir_ / "box.gann"));
  const SimplifiedAnnotation expected = Simplify(dense, 6);
  const CompressionStats stats = ComputeCompressionStats(dense, expected);
  EXPECT_EQ(std::get<SimplifiedAnnotation>(ReadGann(dir_ / "simple.gann")), expected);
  EXPECT_EQ(r.summary["positive_ratio_before"].get<double>(), stats.positive_ratio_before);
  EXPECT_EQ(r.summary["candidate_reduction"].get<double>(), stats.candidate_reduction);
  EXPECT_EQ(r.summary["storage_reduction"].get<double>(), stats.storage_reduction);
  EXPECT_EQ(r.summary["candidates_after"].get<std::size_t>(), stats.candidates_after);
  EXPECT_DOUBLE_EQ(stats.candidate_reduction, 1.0 - 6.0 / 30.0 *
                   expected.point_count() / dense.point_count());

  // A simplified file can be simplified further.
  const auto again = RunCli({"simplify", dir_ / "simple.gann", "--top-views", "2",
                             "--output", dir_ / "simpler.gann"});
  ASSERT_EQ(again.exit_code, 0) << again.out;
  EXPECT_EQ(again.summary["source"], "simplified");
  EXPECT_EQ(std::get<SimplifiedAnnotation>(ReadGann(dir_ / "simpler.gann")),
            Simplify(expected, 2));
}

TEST_F(CliTest, IdentityPoseSceneKeepsObjectAnnotations) {
  const std::string scene = clitest::WriteBoxScene(dir_.path(), "lone", SingleBox(false),
                                                   /*with_table=*/false);
  ASSERT_FALSE(scene.empty());
  const auto r = RunCli({"scene", scene, "--output", dir_ / "bundle"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const auto source = std::get<AnnotationTensor>(ReadGann(dir_ / "lone_box0.gann"));
  const auto world = std::get<AnnotationTensor>(ReadGann(dir_ / "bundle/annotations/box0.gann"));
  EXPECT_EQ(world, source);
  for (const char* f : {"heatmap.pgm", "mask.pgm", "view_graspness.csv", "scene_cloud.ply",
                        "scene_gt.json", "gt_grasps.csv", "depth.raw"}) {
    EXPECT_TRUE(std::filesystem::exists(dir_.path() / "bundle" / f)) << f;
  }
}

TEST_F(CliTest, EmptySceneGivesEmptyBundle) {
  SceneFile scene;
  scene.scene_id = "empty";
  scene.camera = synth::TopDownCamera(40, 30, 50.0, 0.6);
  WriteSceneFile(dir_ / "empty.json", scene);
  const auto r = RunCli({"scene", dir_ / "empty.json", "--output", dir_ / "bundle"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(r.summary["objects"], 0);
  EXPECT_EQ(r.summary["grasp_points"], 0);
  EXPECT_EQ(r.summary["mask_pixels"], 0);
  const GrayImage heat = DecodePgm(ReadFileBytes(dir_ / "bundle/heatmap.pgm"));
  EXPECT_EQ(heat.width, 40);
  EXPECT_TRUE(std::all_of(heat.pixels.begin(), heat.pixels.end(),
                          [](std::uint16_t p) { return p == 0; }));
}

TEST_F(CliTest, MissingSceneReferenceExitsTwo) {
  const std::string scene = clitest::WriteBoxScene(dir_.path(), "gone", SingleBox(true));
  ASSERT_FALSE(scene.empty());
  std::filesystem::remove(dir_ / "gone_box0.gann");
  EXPECT_EQ(RunCli({"scene", scene, "--output", dir_ / "bundle"}).exit_code, 2);
  WriteFileBytes(dir_ / "junk.json", "{\"scene_id\": 3");
  EXPECT_EQ(RunCli({"scene", dir_ / "junk.json", "--output", dir_ / "b2"}).exit_code, 2);
}

TEST_F(CliTest, EvalGroundTruthAsPredictionGivesApOne) {
  const std::string scene = clitest::WriteBoxScene(dir_.path(), "posed", SingleBox(true));
  ASSERT_FALSE(scene.empty());
  const auto s = RunCli({"scene", scene, "--output", dir_ / "bundle"});
  ASSERT_EQ(s.exit_code, 0) << s.out;
  ASSERT_GT(s.summary["gt_grasps"].get<int>(), 0);
  const auto sets = PredictionsFromCsv(ReadFileBytes(dir_ / "bundle/gt_grasps.csv"));
  ASSERT_EQ(sets.size(), 1u);
  // Each listed grasp qualifies from mu = 1.1 - score upwards (scores are
  // float32, hence the tolerance).
  double qualifying = 0.0;
  for (const ScoredGrasp& g : sets[0].grasps) {
    qualifying = std::max(qualifying, 1.1 - g.confidence);
  }
  const auto all = RunCli({"eval", "--scene", scene, "--predictions",
                           dir_ / "bundle/gt_grasps.csv"});
  ASSERT_EQ(all.exit_code, 0) << all.out;
  int checked = 0;
  for (const auto& [mu, ap] : all.summary["AP_mu"].items()) {
    if (std::stod(mu) + 1e-6 >= qualifying) {
      EXPECT_EQ(ap.get<double>(), 1.0) << mu;
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);

  // Over the qualifying coefficients alone the printed AP is exactly 1.
  std::string grid;
  for (const double mu : kDefaultMuGrid) {
    if (mu + 1e-6 >= qualifying) grid += (grid.empty() ? "" : ",") + std::to_string(mu);
  }
  const auto r = RunCli({"eval", "--scene", scene, "--predictions",
                         dir_ / "bundle/gt_grasps.csv", "--set",
                         "annotation.mu_grid=" + grid, "--output", dir_ / "report.json",
                         "--csv", dir_ / "report.csv"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(r.summary["AP"].get<double>(), 1.0);
  const auto report = nlohmann::json::parse(ReadFileBytes(dir_ / "report.json"));
  EXPECT_EQ(report["ap"].get<double>(), 1.0);

  // --min-score keeps only grasps at or above the threshold.
  ASSERT_EQ(RunCli({"scene", scene, "--min-score", "0.9", "--output", dir_ / "top"})
                .exit_code, 0);
  const auto top = PredictionsFromCsv(ReadFileBytes(dir_ / "top/gt_grasps.csv"));
  ASSERT_EQ(top.size(), 1u);
  for (const ScoredGrasp& g : top[0].grasps) {
    EXPECT_GE(static_cast<float>(g.confidence), 0.9f);
  }

  // A scene without predictions scores zero.
  WriteFileBytes(dir_ / "none.csv", PredictionsToCsv({}));
  const auto none = RunCli({"eval", "--scene", scene, "--predictions", dir_ / "none.csv"});
  ASSERT_EQ(none.exit_code, 0) << none.out;
  EXPECT_EQ(none.summary["AP"].get<double>(), 0.0);
}

TEST_F(CliTest, CorruptAndOracleRepairRoundTrip) {
  const synth::BoxScene scene = SingleBox(true);
  const DepthMap sim = synth::RaycastDepth(scene.camera, scene.boxes);
  WriteDepthRaw(dir_ / "sim.raw", sim);
  const auto c1 = RunCli({"corrupt", dir_ / "sim.raw", "--seed", "3", "--output",
                          dir_ / "real.raw"});
  ASSERT_EQ(c1.exit_code, 0) << c1.out;
  EXPECT_GT(c1.summary["rmse"].get<double>(), 0.0);
  ASSERT_EQ(RunCli({"corrupt", dir_ / "sim.raw", "--seed", "3", "--output",
                    dir_ / "real2.raw"}).exit_code, 0);
  ASSERT_EQ(RunCli({"corrupt", dir_ / "sim.raw", "--seed", "4", "--output",
                    dir_ / "real3.raw"}).exit_code, 0);
  EXPECT_EQ(ReadFileBytes(dir_ / "real.raw"), ReadFileBytes(dir_ / "real2.raw"));
  EXPECT_NE(ReadFileBytes(dir_ / "real.raw"), ReadFileBytes(dir_ / "real3.raw"));

  const auto r = RunCli({"repair", dir_ / "real.raw", "--predictor", "oracle", "--sim",
                         dir_ / "sim.raw", "--output", dir_ / "fixed.raw"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(r.summary["rmse"].get<double>(), 0.0);
  EXPECT_GT(r.summary["rmse_before"].get<double>(), 0.0);

  const auto smooth = RunCli({"repair", dir_ / "real.raw", "--predictor", "smoothing",
                              "--sim", dir_ / "sim.raw", "--output", dir_ / "smooth.raw"});
  ASSERT_EQ(smooth.exit_code, 0) << smooth.out;
  EXPECT_LT(smooth.summary["rmse"].get<double>(), smooth.summary["rmse_before"].get<double>());

  EXPECT_EQ(RunCli({"repair", dir_ / "real.raw", "--predictor", "oracle", "--output",
                    dir_ / "x.raw"}).exit_code, 2);
  EXPECT_EQ(RunCli({"repair", dir_ / "real.raw", "--predictor", "magic", "--output",
                    dir_ / "x.raw"}).exit_code, 2);
}

TEST_F(CliTest, CorruptAcceptsPgmDepth) {
  const synth::BoxScene scene = SingleBox(true);
  const DepthMap sim = synth::RaycastDepth(scene.camera, scene.boxes);
  WriteDepthPgm(dir_ / "sim.pgm", sim);
  const auto r = RunCli({"corrupt", dir_ / "sim.pgm", "--output", dir_ / "real.pgm"});
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(r.summary["width"], 80);
  EXPECT_EQ(DecodePgm(ReadFileBytes(dir_ / "real.pgm")).height, 60);
}

TEST_F(CliTest, BankIsSeededAndResumable) {
  WritePly(dir_ / "sphere.ply", synth::SphereSurface(0.03, 800));
  const std::vector<std::string> base = {"bank", "--cloud", box_ply_, "--cloud",
                                         dir_ / "sphere.ply", "--set", "bank.size=6",
                                         "--set", "bank.feature_dim=27", "--set",
                                         "bank.alpha=0.9", "--batch-size", "16"};
  auto run = [&](const std::string& out, const std::string& seed) {
    auto args = base;
    for (const std::string& a : {std::string("--seed"), seed, std::string("--output"), out}) {
      args.push_back(a);
    }
    return RunCli(args);
  };
  const auto a = run(dir_ / "a.gbnk", "1");
  ASSERT_EQ(a.exit_code, 0) << a.out;
  ASSERT_EQ(run(dir_ / "b.gbnk", "1").exit_code, 0);
  ASSERT_EQ(run(dir_ / "c.gbnk", "2").exit_code, 0);
  EXPECT_EQ(ReadFileBytes(dir_ / "a.gbnk"), ReadFileBytes(dir_ / "b.gbnk"));
  EXPECT_NE(ReadFileBytes(dir_ / "a.gbnk"), ReadFileBytes(dir_ / "c.gbnk"));

  const MemoryBank bank = ReadBank(dir_ / "a.gbnk");
  EXPECT_EQ(bank.size(), 6);
  EXPECT_EQ(bank.dim(), 27);
  EXPECT_EQ(bank.update_count, a.summary["batches"].get<std::uint64_t>());
  EXPECT_GT(a.summary["features"].get<int>(), 0);

  auto resume = base;
  for (const std::string& x : {std::string("--init"), dir_ / "a.gbnk", std::string("--output"),
                               dir_ / "d.gbnk"}) {
    resume.push_back(x);
  }
  const auto d = RunCli(resume);
  ASSERT_EQ(d.exit_code, 0) << d.out;
  EXPECT_EQ(ReadBank(dir_ / "d.gbnk").update_count, 2 * bank.update_count);

  EXPECT_EQ(RunCli({"bank", "--output", dir_ / "e.gbnk"}).exit_code, 2);
}

TEST_F(CliTest, ProposeFromSceneBundle) {
  const std::string scene = clitest::WriteBoxScene(dir_.path(), "prop", SingleBox(true));
  ASSERT_FALSE(scene.empty());
  ASSERT_EQ(RunCli({"scene", scene, "--output", dir_ / "bundle"}).exit_code, 0);
  const std::vector<std::string> args = {"propose", "--scene", scene, "--depth",
                                         dir_ / "bundle/depth.raw", "--heatmap",
                                         dir_ / "bundle/heatmap.pgm", "--set", "proposal.top_m=16"};
  auto a = args, b = args;
  a.insert(a.end(), {"--output", dir_ / "a.csv"});
  b.insert(b.end(), {"--output", dir_ / "b.csv"});
  const auto r = RunCli(a);
  ASSERT_EQ(r.exit_code, 0) << r.out;
  ASSERT_EQ(RunCli(b).exit_code, 0);
  EXPECT_EQ(ReadFileBytes(dir_ / "a.csv"), ReadFileBytes(dir_ / "b.csv"));
  EXPECT_GT(r.summary["proposals"].get<int>(), 0);
  EXPECT_LE(r.summary["proposals"].get<int>(), 16 * 12 * 4);
  EXPECT_FALSE(r.summary["no_graspable_points"].get<bool>());
  const auto sets = PredictionsFromCsv(ReadFileBytes(dir_ / "a.csv"));
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].scene_id, "prop");

  const auto eval = RunCli({"eval", "--scene", scene, "--predictions", dir_ / "a.csv"});
  ASSERT_EQ(eval.exit_code, 0) << eval.out;
  EXPECT_GE(eval.summary["AP"].get<double>(), 0.0);
  EXPECT_LE(eval.summary["AP"].get<double>(), 1.0);
}

}  // namespace
}  // namespace grasplab
