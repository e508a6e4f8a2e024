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

#include "grasplab/image_io.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>

#include "grasplab/io_util.h"

namespace grasplab {
namespace {

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Reads one whitespace-delimited header integer, skipping '#' comments.
int NextHeaderInt(const std::string& bytes, std::size_t& pos) {
  for (;;) {
    while (pos < bytes.size() &&
           std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    }
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  std::size_t end = pos;
  while (end < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[end]))) {
    ++end;
  }
  if (end == pos) throw FormatError("PGM: bad header");
  const int value = std::stoi(bytes.substr(pos, end - pos));
  pos = end;
  return value;
}

}  // namespace

std::string EncodePgm(const GrayImage& image) {
  if (image.max_value < 1 || image.max_value > 65535 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw std::invalid_argument("EncodePgm: bad image");
  }
  std::string out = "P5\n" + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n" +
                    std::to_string(image.max_value) + "\n";
  const bool wide = image.max_value > 255;
  out.reserve(out.size() + image.pixels.size() * (wide ? 2 : 1));
  for (const std::uint16_t p : image.pixels) {
    if (wide) out.push_back(static_cast<char>(p >> 8));
    out.push_back(static_cast<char>(p & 0xff));
  }
  return out;
}

GrayImage DecodePgm(const std::string& bytes) {
  if (bytes.rfind("P5", 0) != 0) throw FormatError("PGM: expected P5 magic");
  std::size_t pos = 2;
  GrayImage image;
  image.width = NextHeaderInt(bytes, pos);
  image.height = NextHeaderInt(bytes, pos);
  image.max_value = NextHeaderInt(bytes, pos);
  if (image.max_value < 1 || image.max_value > 65535) {
    throw FormatError("PGM: bad maxval");
  }
  ++pos;  // single whitespace before the raster
  const bool wide = image.max_value > 255;
  const std::size_t count = static_cast<std::size_t>(image.width) * image.height;
  if (bytes.size() < pos + count * (wide ? 2 : 1)) {
    throw FormatError("PGM: truncated raster");
  }
  image.pixels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (wide) {
      image.pixels[i] = static_cast<std::uint16_t>(
          (static_cast<unsigned char>(bytes[pos + 2 * i]) << 8) |
          static_cast<unsigned char>(bytes[pos + 2 * i + 1]));
    } else {
      image.pixels[i] = static_cast<unsigned char>(bytes[pos + i]);
    }
  }
  return image;
}

void WriteDepthPgm(const std::string& path, const DepthMap& depth) {
  GrayImage image{depth.width, depth.height, 65535, {}};
  image.pixels.reserve(depth.size());
  for (const float v : depth.values) {
    const double mm = std::clamp(std::round(static_cast<double>(v)), 0.0, 65535.0);
    image.pixels.push_back(static_cast<std::uint16_t>(mm));
  }
  WriteFileBytes(path, EncodePgm(image));
}

DepthMap ReadDepthPgm(const std::string& path,
                      const CameraIntrinsics& intrinsics) {
  const GrayImage image = DecodePgm(ReadFileBytes(path));
  DepthMap depth(image.width, image.height, intrinsics);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    depth.values[i] = static_cast<float>(image.pixels[i]);
  }
  return depth;
}

nlohmann::json IntrinsicsToJson(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy},       {"cx", k.cx},
          {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics IntrinsicsFromJson(const nlohmann::json& j) {
  CameraIntrinsics k;
  try {
    k.fx = j.at("fx").get<double>();
    k.fy = j.at("fy").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
    k.width = j.at("width").get<int>();
    k.height = j.at("height").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("intrinsics: ") + e.what());
  }
  return k;
}

void WriteDepthRaw(const std::string& path, const DepthMap& depth) {
  std::string payload;
  AppendPodArray(payload, std::span<const float>(depth.values));
  WriteFileBytes(path, payload);
  const nlohmann::json sidecar = {{"width", depth.width},
                                  {"height", depth.height},
                                  {"dtype", "float32"},
                                  {"endianness", "little"},
                                  {"units", "mm"},
                                  {"intrinsics", IntrinsicsToJson(depth.intrinsics)}};
  WriteFileBytes(path + ".json", sidecar.dump(2) + "\n");
}

DepthMap ReadDepthRaw(const std::string& path) {
  nlohmann::json sidecar;
  try {
    sidecar = nlohmann::json::parse(ReadFileBytes(path + ".json"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("depth sidecar: ") + e.what());
  }
  if (sidecar.value("dtype", "") != "float32" ||
      sidecar.value("endianness", "") != "little") {
    throw FormatError("depth sidecar: expected little-endian float32");
  }
  DepthMap depth(sidecar.value("width", 0), sidecar.value("height", 0),
                 IntrinsicsFromJson(sidecar.at("intrinsics")));
  const std::string payload = ReadFileBytes(path);
  if (payload.size() != depth.size() * sizeof(float)) {
    throw FormatError("depth raw: payload size does not match sidecar");
  }
  std::memcpy(depth.values.data(), payload.data(), payload.size());
  return depth;
}

DepthMap ReadDepth(const std::string& path, const CameraIntrinsics& fallback) {
  return EndsWith(path, ".pgm") ? ReadDepthPgm(path, fallback)
                                : ReadDepthRaw(path);
}

void WriteDepth(const std::string& path, const DepthMap& depth) {
  if (EndsWith(path, ".pgm")) {
    WriteDepthPgm(path, depth);
  } else {
    WriteDepthRaw(path, depth);
  }
}

void WriteHeatmapPgm(const std::string& path, int width, int height,
                     std::span<const float> values) {
  GrayImage image{width, height, 65535, {}};
  image.pixels.reserve(values.size());
  for (const float g : values) {
    image.pixels.push_back(static_cast<std::uint16_t>(
        std::lround(std::clamp(static_cast<double>(g), 0.0, 1.0) * 65535.0)));
  }
  WriteFileBytes(path, EncodePgm(image));
}

void WriteMaskPgm(const std::string& path, int width, int height,
                  std::span<const std::uint8_t> mask) {
  GrayImage image{width, height, 255, {}};
  image.pixels.reserve(mask.size());
  for (const std::uint8_t m : mask) image.pixels.push_back(m ? 255 : 0);
  WriteFileBytes(path, EncodePgm(image));
}

}  // namespace grasplab
