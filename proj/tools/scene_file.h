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

#ifndef GRASPLAB_TOOLS_SCENE_FILE_H_
#define GRASPLAB_TOOLS_SCENE_FILE_H_

#include <string>
#include <vector>

#include "grasplab/depth_repair.h"
#include "grasplab/scene_annotator.h"
#include "json.hpp"

namespace grasplab {

// scene.json: object models, their annotations and poses, the camera and
// optional static geometry / captured depth. Relative paths resolve against
// the directory holding the file.
//
// {
//   "scene_id": "scene_000",
//   "objects": [{"id": "box0", "model": "box0.ply", "annotation": "box0.gann",
//                "rotation": [9 numbers, row-major], "translation": [x, y, z]}],
//   "camera": {"intrinsics": {...}, "rotation": [...], "translation": [...]},
//   "static_geometry": "table.ply",
//   "depth": "depth.raw"
// }
struct SceneFile {
  struct Object {
    std::string id;
    std::string model;
    std::string annotation;
    RigidTransform pose;
  };

  std::string scene_id;
  std::string base_dir;
  std::vector<Object> objects;
  SceneCamera camera;
  std::string static_geometry;
  std::string depth;

  std::string Resolve(const std::string& relative) const;
};

SceneFile ParseSceneFile(const std::string& path);
nlohmann::json SceneFileToJson(const SceneFile& scene);
void WriteSceneFile(const std::string& path, const SceneFile& scene);

nlohmann::json TransformToJson(const RigidTransform& t);
RigidTransform TransformFromJson(const nlohmann::json& j);

struct LoadedScene {
  SceneGroundTruth ground_truth;
  PointCloud static_geometry;
};

// Reads models (and, when `with_annotations`, the dense GANN files) and
// builds the culled ground truth. Without annotations `gripper` is used for
// the scene; with them the annotation gripper must be common to all files.
LoadedScene LoadScene(const SceneFile& scene, bool with_annotations,
                      const GripperModel& gripper);

// Captured depth if the file names one, otherwise a splat of the scene cloud.
DepthMap SceneDepth(const SceneFile& scene, const SceneGroundTruth& gt);

}  // namespace grasplab

#endif  // GRASPLAB_TOOLS_SCENE_FILE_H_
