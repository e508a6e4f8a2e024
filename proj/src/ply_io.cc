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

#include "grasplab/ply_io.h"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include "grasplab/io_util.h"

namespace grasplab {
namespace {

enum class ScalarType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32,
                        kFloat32, kFloat64 };

ScalarType ParseScalarType(const std::string& name) {
  static const std::map<std::string, ScalarType> kTypes = {
      {"char", ScalarType::kInt8},     {"int8", ScalarType::kInt8},
      {"uchar", ScalarType::kUint8},   {"uint8", ScalarType::kUint8},
      {"short", ScalarType::kInt16},   {"int16", ScalarType::kInt16},
      {"ushort", ScalarType::kUint16}, {"uint16", ScalarType::kUint16},
      {"int", ScalarType::kInt32},     {"int32", ScalarType::kInt32},
      {"uint", ScalarType::kUint32},   {"uint32", ScalarType::kUint32},
      {"float", ScalarType::kFloat32}, {"float32", ScalarType::kFloat32},
      {"double", ScalarType::kFloat64}, {"float64", ScalarType::kFloat64}};
  const auto it = kTypes.find(name);
  if (it == kTypes.end()) throw FormatError("PLY: unknown type '" + name + "'");
  return it->second;
}

double ReadBinaryScalar(ByteReader& r, ScalarType t) {
  switch (t) {
    case ScalarType::kInt8: return r.Read<std::int8_t>();
    case ScalarType::kUint8: return r.Read<std::uint8_t>();
    case ScalarType::kInt16: return r.Read<std::int16_t>();
    case ScalarType::kUint16: return r.Read<std::uint16_t>();
    case ScalarType::kInt32: return r.Read<std::int32_t>();
    case ScalarType::kUint32: return r.Read<std::uint32_t>();
    case ScalarType::kFloat32: return r.Read<float>();
    case ScalarType::kFloat64: return r.Read<double>();
  }
  return 0.0;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::kFloat32;
  bool is_list = false;
  ScalarType count_type = ScalarType::kUint8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

class AsciiTokens {
 public:
  explicit AsciiTokens(std::string_view body) : body_(body) {}

  double Next() {
    while (pos_ < body_.size() && std::isspace(
                                      static_cast<unsigned char>(body_[pos_]))) {
      ++pos_;
    }
    if (pos_ >= body_.size()) throw FormatError("PLY: unexpected end of data");
    std::size_t end = pos_;
    while (end < body_.size() &&
           !std::isspace(static_cast<unsigned char>(body_[end]))) {
      ++end;
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(body_.data() + pos_, body_.data() + end, value);
    if (ec != std::errc() || ptr != body_.data() + end) {
      throw FormatError("PLY: bad number '" +
                        std::string(body_.substr(pos_, end - pos_)) + "'");
    }
    pos_ = end;
    return value;
  }

 private:
  std::string_view body_;
  std::size_t pos_ = 0;
};

}  // namespace

PointCloud ParsePly(const std::string& bytes) {
  const std::size_t header_end = bytes.find("end_header");
  if (bytes.rfind("ply", 0) != 0 || header_end == std::string::npos) {
    throw FormatError("PLY: missing 'ply' magic or 'end_header'");
  }
  std::size_t body_start = bytes.find('\n', header_end);
  if (body_start == std::string::npos) throw FormatError("PLY: truncated");
  ++body_start;

  std::istringstream header(bytes.substr(0, header_end));
  std::string line;
  std::optional<PlyFormat> format;
  std::vector<Element> elements;
  while (std::getline(header, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "format") {
      std::string name;
      ls >> name;
      if (name == "ascii") {
        format = PlyFormat::kAscii;
      } else if (name == "binary_little_endian") {
        format = PlyFormat::kBinaryLittleEndian;
      } else {
        throw FormatError("PLY: unsupported format '" + name + "'");
      }
    } else if (keyword == "element") {
      Element e;
      ls >> e.name >> e.count;
      if (!ls) throw FormatError("PLY: bad element line");
      elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (elements.empty()) throw FormatError("PLY: property before element");
      Property p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> p.name;
        p.is_list = true;
        p.count_type = ParseScalarType(count_type);
        p.type = ParseScalarType(item_type);
      } else {
        p.type = ParseScalarType(type);
        ls >> p.name;
      }
      if (!ls) throw FormatError("PLY: bad property line");
      elements.back().properties.push_back(std::move(p));
    }
  }
  if (!format) throw FormatError("PLY: missing format line");

  PointCloud cloud;
  const std::string_view body = std::string_view(bytes).substr(body_start);
  ByteReader binary(body);
  AsciiTokens ascii(body);
  auto next = [&](ScalarType t) {
    return *format == PlyFormat::kAscii ? ascii.Next()
                                        : ReadBinaryScalar(binary, t);
  };

  bool saw_vertex = false;
  for (const Element& e : elements) {
    const bool is_vertex = e.name == "vertex";
    std::map<std::string, int> slot;
    if (is_vertex) {
      saw_vertex = true;
      for (int i = 0; i < static_cast<int>(e.properties.size()); ++i) {
        if (!e.properties[i].is_list) slot[e.properties[i].name] = i;
      }
      for (const char* axis : {"x", "y", "z"}) {
        if (!slot.contains(axis)) {
          throw FormatError(std::string("PLY: vertex lacks '") + axis + "'");
        }
      }
    }
    const bool has_normals = is_vertex && slot.contains("nx") &&
                             slot.contains("ny") && slot.contains("nz");
    const bool has_colors = is_vertex && slot.contains("red") &&
                            slot.contains("green") && slot.contains("blue");
    std::vector<double> values(e.properties.size());
    for (std::size_t row = 0; row < e.count; ++row) {
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        const Property& p = e.properties[k];
        if (p.is_list) {
          const auto n = static_cast<std::size_t>(next(p.count_type));
          for (std::size_t j = 0; j < n; ++j) next(p.type);
        } else {
          values[k] = next(p.type);
        }
      }
      if (!is_vertex) continue;
      cloud.points.emplace_back(values[slot["x"]], values[slot["y"]],
                                values[slot["z"]]);
      if (has_normals) {
        cloud.normals.emplace_back(values[slot["nx"]], values[slot["ny"]],
                                   values[slot["nz"]]);
      }
      if (has_colors) {
        cloud.colors.push_back(
            {static_cast<std::uint8_t>(values[slot["red"]]),
             static_cast<std::uint8_t>(values[slot["green"]]),
             static_cast<std::uint8_t>(values[slot["blue"]])});
      }
    }
  }
  if (!saw_vertex) throw FormatError("PLY: no vertex element");
  return cloud;
}

PointCloud ReadPly(const std::string& path) {
  return ParsePly(ReadFileBytes(path));
}

std::string SerializePly(const PointCloud& cloud, PlyFormat format) {
  cloud.Validate();
  std::string out = "ply\nformat ";
  out += format == PlyFormat::kAscii ? "ascii" : "binary_little_endian";
  out += " 1.0\nelement vertex " + std::to_string(cloud.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  if (cloud.HasNormals()) {
    out += "property double nx\nproperty double ny\nproperty double nz\n";
  }
  if (cloud.HasColors()) {
    out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  out += "end_header\n";

  char buf[32];
  auto put_ascii = [&](double v) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
  };
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (format == PlyFormat::kBinaryLittleEndian) {
      for (int k = 0; k < 3; ++k) AppendPod(out, cloud.points[i][k]);
      if (cloud.HasNormals()) {
        for (int k = 0; k < 3; ++k) AppendPod(out, cloud.normals[i][k]);
      }
      if (cloud.HasColors()) {
        for (int k = 0; k < 3; ++k) AppendPod(out, cloud.colors[i][k]);
      }
      continue;
    }
    for (int k = 0; k < 3; ++k) {
      if (k) out += ' ';
      put_ascii(cloud.points[i][k]);
    }
    if (cloud.HasNormals()) {
      for (int k = 0; k < 3; ++k) {
        out += ' ';
        put_ascii(cloud.normals[i][k]);
      }
    }
    if (cloud.HasColors()) {
      for (int k = 0; k < 3; ++k) {
        out += ' ' + std::to_string(cloud.colors[i][k]);
      }
    }
    out += '\n';
  }
  return out;
}

void WritePly(const std::string& path, const PointCloud& cloud,
              PlyFormat format) {
  WriteFileBytes(path, SerializePly(cloud, format));
}

}  // namespace grasplab
