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

#ifndef GRASPLAB_CONFIG_H_
#define GRASPLAB_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "grasplab/depth_repair.h"
#include "grasplab/gripper.h"
#include "grasplab/object_annotator.h"

namespace grasplab {

struct BankConfig {
  int size = 120;
  double alpha = 0.999;
  int feature_dim = 256;
  int model_dim = 256;
  int heads = 4;
  bool operator==(const BankConfig&) const = default;
};

// Sizes of the learned detector stages. Only group_size is consumed here;
// the rest are kept so a configuration file describes the full setup.
struct NetworkConfig {
  int points = 20000;
  int seed_points = 1024;
  int c1 = 512;
  int c2 = 256;
  int group_size = 16;
  bool operator==(const NetworkConfig&) const = default;
};

struct PipelineConfig {
  GripperModel gripper;
  int view_count = 300;
  std::vector<double> mu_grid = kDefaultMuGrid;
  double voxel = 0.005;
  int top_views = 60;
  BankConfig bank;
  NetworkConfig network;
  NoiseModel noise{2.0, 1.5, 2, 6.0, 0.01, 0};
  int top_m = 64;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument with the offending key.
  void Validate() const;
  AnnotationConfig Annotation() const;
  bool operator==(const PipelineConfig&) const = default;
};

// Sets one "section.key" value; lists are comma separated, optionally in
// brackets. Throws std::invalid_argument for unknown keys or bad values.
void ApplyOverride(PipelineConfig& config, std::string_view key,
                   std::string_view value);

// TOML-style text: [section] headers, key = value lines, '#' comments.
PipelineConfig ParseConfig(const std::string& text);
std::string SerializeConfig(const PipelineConfig& config);
PipelineConfig LoadConfig(const std::string& path);

// Independent stream seed for a named stage: splitmix64 of the root seed
// xor the FNV-1a hash of the stage name.
std::uint64_t StageSeed(std::uint64_t root, std::string_view stage);

}  // namespace grasplab

#endif  // GRASPLAB_CONFIG_H_
