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

#include "grasplab/gann_io.h"

#include <span>

#include "grasplab/io_util.h"

namespace grasplab {
namespace {

ContainerBlock FloatBlock(const std::string& name,
                          std::vector<std::uint64_t> shape,
                          std::span<const float> values) {
  ContainerBlock b{name, "float32", std::move(shape), {}};
  AppendPodArray(b.data, values);
  return b;
}

ContainerBlock UintBlock(const std::string& name,
                         std::vector<std::uint64_t> shape,
                         std::span<const std::uint32_t> values) {
  ContainerBlock b{name, "uint32", std::move(shape), {}};
  AppendPodArray(b.data, values);
  return b;
}

ContainerBlock PointBlock(const std::string& name,
                          std::span<const Vec3> points) {
  std::vector<float> flat;
  flat.reserve(points.size() * 3);
  for (const Vec3& p : points) {
    flat.push_back(static_cast<float>(p.x()));
    flat.push_back(static_cast<float>(p.y()));
    flat.push_back(static_cast<float>(p.z()));
  }
  return FloatBlock(name, {points.size(), 3}, flat);
}

std::vector<Vec3> PointsFrom(const ContainerBlock& block) {
  const std::vector<float> flat = BlockValues<float>(block);
  if (block.dtype != "float32" || flat.size() % 3 != 0) {
    throw FormatError("block '" + block.name + "' is not a float32 [n,3] array");
  }
  std::vector<Vec3> out;
  out.reserve(flat.size() / 3);
  for (std::size_t i = 0; i < flat.size(); i += 3) {
    out.emplace_back(flat[i], flat[i + 1], flat[i + 2]);
  }
  return out;
}

template <typename T>
std::vector<T> TypedValues(const Container& c, const std::string& name,
                           const char* dtype, std::size_t expected) {
  const ContainerBlock& block = c.Block(name);
  if (block.dtype != dtype) {
    throw FormatError("block '" + name + "' has dtype " + block.dtype);
  }
  std::vector<T> values = BlockValues<T>(block);
  if (values.size() != expected) {
    throw InvariantViolation("block '" + name + "' has " +
                             std::to_string(values.size()) +
                             " values, expected " + std::to_string(expected));
  }
  return values;
}

nlohmann::json CommonHeader(const std::string& kind, const ViewSphere& views,
                            const GripperModel& gripper,
                            const std::vector<double>& mu_grid) {
  return {{"format", "GANN"},
          {"kind", kind},
          {"view_count", views.size()},
          {"gripper", GripperToJson(gripper)},
          {"mu_grid", mu_grid}};
}

struct CommonFields {
  ViewSphere views;
  GripperModel gripper;
  std::vector<double> mu_grid;
};

CommonFields ReadCommon(const nlohmann::json& h) {
  CommonFields f;
  const int view_count = h.at("view_count").get<int>();
  if (view_count < 1) throw InvariantViolation("view_count must be >= 1");
  f.views = SampleViewSphere(view_count);
  f.gripper = GripperFromJson(h.at("gripper"));
  f.mu_grid = h.at("mu_grid").get<std::vector<double>>();
  return f;
}

Container Open(const std::string& bytes) {
  return ReadContainer(bytes, std::string_view(kGannMagic, 4), kGannVersion);
}

AnnotationTensor DenseFrom(const Container& c) {
  const nlohmann::json& h = c.header;
  AnnotationTensor t;
  CommonFields f = ReadCommon(h);
  t.id = h.at("id").get<std::string>();
  t.view_sphere = std::move(f.views);
  t.gripper = std::move(f.gripper);
  t.mu_grid = std::move(f.mu_grid);
  t.grasp_points = PointsFrom(c.Block("grasp_points"));
  const std::size_t n = t.grasp_points.size() * t.candidates_per_point();
  t.scores = TypedValues<float>(c, "scores", "float32", n);
  t.widths = TypedValues<float>(c, "widths", "float32", n);
  t.Validate();
  return t;
}

SimplifiedAnnotation SimplifiedFrom(const Container& c) {
  const nlohmann::json& h = c.header;
  SimplifiedAnnotation s;
  CommonFields f = ReadCommon(h);
  s.source_id = h.at("source_id").get<std::string>();
  s.source_point_count = h.at("source_point_count").get<int>();
  s.top_views = h.at("top_views").get<int>();
  s.view_sphere = std::move(f.views);
  s.gripper = std::move(f.gripper);
  s.mu_grid = std::move(f.mu_grid);
  if (s.top_views < 1) throw InvariantViolation("top_views must be >= 1");
  s.grasp_points = PointsFrom(c.Block("grasp_points"));
  const std::size_t points = s.grasp_points.size();
  s.retained_points =
      TypedValues<std::uint32_t>(c, "retained_points", "uint32", points);
  s.retained_views = TypedValues<std::uint32_t>(c, "retained_views", "uint32",
                                                points * s.kept_views());
  s.scores = TypedValues<float>(c, "scores", "float32", s.candidate_count());
  s.widths = TypedValues<float>(c, "widths", "float32", s.candidate_count());
  s.Validate();
  return s;
}

}  // namespace

nlohmann::json GripperToJson(const GripperModel& g) {
  return {{"max_width", g.max_width},
          {"finger_length", g.finger_length},
          {"finger_thickness", g.finger_thickness},
          {"base_depth", g.base_depth},
          {"depth_grid", g.depth_grid},
          {"angle_count", g.angle_count}};
}

GripperModel GripperFromJson(const nlohmann::json& j) {
  GripperModel g;
  g.max_width = j.at("max_width").get<double>();
  g.finger_length = j.at("finger_length").get<double>();
  g.finger_thickness = j.at("finger_thickness").get<double>();
  g.base_depth = j.at("base_depth").get<double>();
  g.depth_grid = j.at("depth_grid").get<std::vector<double>>();
  g.angle_count = j.at("angle_count").get<int>();
  try {
    g.Validate();
  } catch (const std::invalid_argument& e) {
    throw InvariantViolation(e.what());
  }
  return g;
}

std::string SerializeGann(const AnnotationTensor& t) {
  t.Validate();
  nlohmann::json h = CommonHeader("dense", t.view_sphere, t.gripper, t.mu_grid);
  h["id"] = t.id;
  h["point_count"] = t.point_count();
  h["candidates_per_point"] = t.candidates_per_point();
  const std::vector<std::uint64_t> grid = {
      t.grasp_points.size(), static_cast<std::uint64_t>(t.view_count()),
      static_cast<std::uint64_t>(t.angle_count()),
      static_cast<std::uint64_t>(t.depth_count())};
  return WriteContainer(std::string_view(kGannMagic, 4), kGannVersion, h,
                        {PointBlock("grasp_points", t.grasp_points),
                         FloatBlock("scores", grid, t.scores),
                         FloatBlock("widths", grid, t.widths)});
}

std::string SerializeGann(const SimplifiedAnnotation& s) {
  s.Validate();
  nlohmann::json h = CommonHeader("simplified", s.view_sphere, s.gripper,
                                  s.mu_grid);
  h["source_id"] = s.source_id;
  h["source_point_count"] = s.source_point_count;
  h["top_views"] = s.top_views;
  h["point_count"] = s.point_count();
  const std::uint64_t points = s.retained_points.size();
  const std::uint64_t kept = s.kept_views();
  const std::vector<std::uint64_t> grid = {
      points, kept, static_cast<std::uint64_t>(s.gripper.angle_count),
      static_cast<std::uint64_t>(s.gripper.depth_count())};
  return WriteContainer(
      std::string_view(kGannMagic, 4), kGannVersion, h,
      {PointBlock("grasp_points", s.grasp_points),
       UintBlock("retained_points", {points}, s.retained_points),
       UintBlock("retained_views", {points, kept}, s.retained_views),
       FloatBlock("scores", grid, s.scores),
       FloatBlock("widths", grid, s.widths)});
}

GannContents ParseGann(const std::string& bytes) {
  const Container c = Open(bytes);
  try {
    const std::string kind = c.header.at("kind").get<std::string>();
    if (kind == "dense") return DenseFrom(c);
    if (kind == "simplified") return SimplifiedFrom(c);
    throw FormatError("GANN: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("GANN header: ") + e.what());
  }
}

AnnotationTensor ParseDenseGann(const std::string& bytes) {
  GannContents c = ParseGann(bytes);
  if (auto* t = std::get_if<AnnotationTensor>(&c)) return std::move(*t);
  throw FormatError("GANN: expected a dense annotation");
}

SimplifiedAnnotation ParseSimplifiedGann(const std::string& bytes) {
  GannContents c = ParseGann(bytes);
  if (auto* s = std::get_if<SimplifiedAnnotation>(&c)) return std::move(*s);
  throw FormatError("GANN: expected a simplified annotation");
}

void WriteGann(const std::string& path, const AnnotationTensor& tensor) {
  WriteFileBytes(path, SerializeGann(tensor));
}

void WriteGann(const std::string& path,
               const SimplifiedAnnotation& annotation) {
  WriteFileBytes(path, SerializeGann(annotation));
}

GannContents ReadGann(const std::string& path) {
  return ParseGann(ReadFileBytes(path));
}

}  // namespace grasplab
