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

#ifndef GRASPLAB_PLY_IO_H_
#define GRASPLAB_PLY_IO_H_

#include <string>

#include "grasplab/geometry.h"

namespace grasplab {

enum class PlyFormat { kAscii, kBinaryLittleEndian };

// Reads the "vertex" element: x, y, z and, when present, nx, ny, nz and
// red, green, blue. Other elements and properties (including list
// properties such as faces) are skipped. Throws std::runtime_error on
// malformed input.
PointCloud ReadPly(const std::string& path);
PointCloud ParsePly(const std::string& bytes);

// Coordinates and normals are written as double so a write/read cycle is
// lossless in both formats.
void WritePly(const std::string& path, const PointCloud& cloud,
              PlyFormat format = PlyFormat::kBinaryLittleEndian);
std::string SerializePly(const PointCloud& cloud,
                         PlyFormat format = PlyFormat::kBinaryLittleEndian);

}  // namespace grasplab

#endif  // GRASPLAB_PLY_IO_H_
