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

#ifndef GRASPLAB_IMAGE_IO_H_
#define GRASPLAB_IMAGE_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "grasplab/depth_repair.h"
#include "json.hpp"

namespace grasplab {

struct GrayImage {
  int width = 0;
  int height = 0;
  int max_value = 65535;
  std::vector<std::uint16_t> pixels;
};

// Binary PGM (P5). max_value > 255 uses big-endian 16-bit samples as the
// format requires.
std::string EncodePgm(const GrayImage& image);
GrayImage DecodePgm(const std::string& bytes);

// Depth as 16-bit PGM: millimetres rounded to nearest, clamped to 65535.
void WriteDepthPgm(const std::string& path, const DepthMap& depth);
// The PGM has no intrinsics; they are supplied by the caller.
DepthMap ReadDepthPgm(const std::string& path,
                      const CameraIntrinsics& intrinsics);

// Raw little-endian float32 payload plus a JSON sidecar at path + ".json"
// holding dimensions and intrinsics.
void WriteDepthRaw(const std::string& path, const DepthMap& depth);
DepthMap ReadDepthRaw(const std::string& path);

// Reads either form, picking by extension (".pgm" or anything else = raw).
DepthMap ReadDepth(const std::string& path, const CameraIntrinsics& fallback);
void WriteDepth(const std::string& path, const DepthMap& depth);

// Heatmap in [0, 1] as 16-bit PGM, value = round(g * 65535).
void WriteHeatmapPgm(const std::string& path, int width, int height,
                     std::span<const float> values);
// Boolean mask as 8-bit PGM (0 / 255).
void WriteMaskPgm(const std::string& path, int width, int height,
                  std::span<const std::uint8_t> mask);

nlohmann::json IntrinsicsToJson(const CameraIntrinsics& k);
CameraIntrinsics IntrinsicsFromJson(const nlohmann::json& j);

}  // namespace grasplab

#endif  // GRASPLAB_IMAGE_IO_H_
