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

#include "scene_file.h"

#include <filesystem>
#include <variant>

#include "grasplab/gann_io.h"
#include "grasplab/image_io.h"
#include "grasplab/io_util.h"
#include "grasplab/ply_io.h"

namespace grasplab {
namespace {

std::vector<double> Numbers(const nlohmann::json& j, const char* key,
                            std::size_t count) {
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != count) {
    throw FormatError(std::string("scene: '") + key + "' needs " +
                      std::to_string(count) + " numbers");
  }
  return v;
}

}  // namespace

std::string SceneFile::Resolve(const std::string& relative) const {
  const std::filesystem::path p(relative);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (std::filesystem::path(base_dir) / p).string();
}

nlohmann::json TransformToJson(const RigidTransform& t) {
  std::vector<double> r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r.push_back(t.rotation(i, j));
  }
  return {{"rotation", r},
          {"translation", {t.translation.x(), t.translation.y(), t.translation.z()}}};
}

RigidTransform TransformFromJson(const nlohmann::json& j) {
  RigidTransform t;
  const auto r = Numbers(j, "rotation", 9);
  const auto x = Numbers(j, "translation", 3);
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 3; ++c) t.rotation(i, c) = r[3 * i + c];
  }
  t.translation = Vec3(x[0], x[1], x[2]);
  try {
    t.Validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("scene: ") + e.what());
  }
  return t;
}

SceneFile ParseSceneFile(const std::string& path) {
  SceneFile scene;
  scene.base_dir = std::filesystem::path(path).parent_path().string();
  try {
    const nlohmann::json j = nlohmann::json::parse(ReadFileBytes(path));
    scene.scene_id = j.value("scene_id", std::filesystem::path(path).stem().string());
    for (const nlohmann::json& o : j.value("objects", nlohmann::json::array())) {
      SceneFile::Object object;
      object.id = o.at("id").get<std::string>();
      object.model = o.at("model").get<std::string>();
      object.annotation = o.value("annotation", "");
      object.pose = TransformFromJson(o);
      scene.objects.push_back(std::move(object));
    }
    const nlohmann::json& cam = j.at("camera");
    scene.camera.intrinsics = IntrinsicsFromJson(cam.at("intrinsics"));
    scene.camera.pose = TransformFromJson(cam);
    scene.static_geometry = j.value("static_geometry", "");
    scene.depth = j.value("depth", "");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("scene '" + path + "': " + e.what());
  }
  try {
    scene.camera.intrinsics.Validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError("scene '" + path + "': " + e.what());
  }
  return scene;
}

nlohmann::json SceneFileToJson(const SceneFile& scene) {
  nlohmann::json objects = nlohmann::json::array();
  for (const SceneFile::Object& o : scene.objects) {
    nlohmann::json j = TransformToJson(o.pose);
    j["id"] = o.id;
    j["model"] = o.model;
    if (!o.annotation.empty()) j["annotation"] = o.annotation;
    objects.push_back(std::move(j));
  }
  nlohmann::json camera = TransformToJson(scene.camera.pose);
  camera["intrinsics"] = IntrinsicsToJson(scene.camera.intrinsics);
  nlohmann::json out = {{"scene_id", scene.scene_id},
                        {"objects", std::move(objects)},
                        {"camera", std::move(camera)}};
  if (!scene.static_geometry.empty()) out["static_geometry"] = scene.static_geometry;
  if (!scene.depth.empty()) out["depth"] = scene.depth;
  return out;
}

void WriteSceneFile(const std::string& path, const SceneFile& scene) {
  WriteFileBytes(path, SceneFileToJson(scene).dump(2) + "\n");
}

LoadedScene LoadScene(const SceneFile& scene, bool with_annotations,
                      const GripperModel& gripper) {
  LoadedScene out;
  std::vector<SceneObject> objects;
  std::vector<AnnotationTensor> annotations;
  for (const SceneFile::Object& o : scene.objects) {
    SceneObject object;
    object.model = {o.id, ReadPly(scene.Resolve(o.model))};
    object.pose = {o.id, o.pose};
    objects.push_back(std::move(object));
    if (!with_annotations) continue;
    if (o.annotation.empty()) {
      throw FormatError("scene: object '" + o.id + "' has no annotation");
    }
    const GannContents contents = ReadGann(scene.Resolve(o.annotation));
    if (!std::holds_alternative<AnnotationTensor>(contents)) {
      throw FormatError("scene: '" + o.annotation +
                        "' is simplified; projection needs the dense tensor");
    }
    AnnotationTensor t = std::get<AnnotationTensor>(contents);
    t.id = o.id;
    annotations.push_back(std::move(t));
  }
  if (!scene.static_geometry.empty()) {
    out.static_geometry = ReadPly(scene.Resolve(scene.static_geometry));
  }
  GripperModel g = gripper;
  if (!annotations.empty()) {
    g = annotations.front().gripper;
    for (const AnnotationTensor& t : annotations) {
      if (!(t.gripper == g)) {
        throw FormatError("scene: annotations use different grippers");
      }
    }
  }
  out.ground_truth = BuildSceneGroundTruth(scene.scene_id, std::move(objects),
                                           annotations, scene.camera,
                                           out.static_geometry, g);
  return out;
}

DepthMap SceneDepth(const SceneFile& scene, const SceneGroundTruth& gt) {
  if (!scene.depth.empty()) {
    DepthMap d = ReadDepth(scene.Resolve(scene.depth), scene.camera.intrinsics);
    if (d.width != scene.camera.intrinsics.width ||
        d.height != scene.camera.intrinsics.height) {
      throw FormatError("scene: depth size does not match the camera");
    }
    d.intrinsics = scene.camera.intrinsics;
    return d;
  }
  return RenderDepthFromCloud(gt.scene_cloud, scene.camera);
}

}  // namespace grasplab
