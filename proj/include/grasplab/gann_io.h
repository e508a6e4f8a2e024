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

#ifndef GRASPLAB_GANN_IO_H_
#define GRASPLAB_GANN_IO_H_

#include <string>
#include <variant>

#include "grasplab/object_annotator.h"
#include "grasplab/simplifier.h"
#include "json.hpp"

namespace grasplab {

// GANN v1: the shared binary container with magic "GANN". The JSON header
// holds kind ("dense" or "simplified"), ids, gripper and friction grid,
// view count and shapes; payloads are float32 / uint32 little-endian
// blocks. View directions are regenerated from the view count.
inline constexpr char kGannMagic[] = "GANN";
inline constexpr std::uint32_t kGannVersion = 1;

std::string SerializeGann(const AnnotationTensor& tensor);
std::string SerializeGann(const SimplifiedAnnotation& annotation);

using GannContents = std::variant<AnnotationTensor, SimplifiedAnnotation>;

// Throws FormatError on malformed bytes and InvariantViolation when the
// decoded annotation breaks its invariants.
GannContents ParseGann(const std::string& bytes);
AnnotationTensor ParseDenseGann(const std::string& bytes);
SimplifiedAnnotation ParseSimplifiedGann(const std::string& bytes);

void WriteGann(const std::string& path, const AnnotationTensor& tensor);
void WriteGann(const std::string& path, const SimplifiedAnnotation& annotation);
GannContents ReadGann(const std::string& path);

nlohmann::json GripperToJson(const GripperModel& gripper);
GripperModel GripperFromJson(const nlohmann::json& j);

}  // namespace grasplab

#endif  // GRASPLAB_GANN_IO_H_
