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

#ifndef GRASPLAB_FEATURE_ENHANCER_H_
#define GRASPLAB_FEATURE_ENHANCER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "grasplab/geometry.h"
#include "grasplab/gripper.h"

namespace grasplab {

struct LocalFeature {
  Eigen::VectorXd vector;
  Vec3 source_point = Vec3::Zero();
  Vec3 source_view = Vec3::UnitZ();
};

// Eigenvalue triple + 16 normal-angle bins + 8 radial bins.
inline constexpr int kDescriptorBlock = 27;
inline constexpr int kNormalBins = 16;
inline constexpr int kRadialBins = 8;

// Structural descriptor of the cylinder (radius max_width / 2, height
// finger_length) centred at `point` along `view`. The 27-value block is
// tiled to `dim`. Requires normals; throws std::invalid_argument for an
// empty neighbourhood.
LocalFeature ExtractDescriptor(const PointCloud& cloud, const Vec3& point,
                               const Vec3& view, const GripperModel& gripper,
                               int dim = 256);

struct MemoryBank {
  Eigen::MatrixXd entries;  // K x C, one entry per row
  double alpha = 0.999;
  std::uint64_t update_count = 0;

  int size() const { return static_cast<int>(entries.rows()); }
  int dim() const { return static_cast<int>(entries.cols()); }
  void Validate() const;
  bool operator==(const MemoryBank& o) const {
    return entries.rows() == o.entries.rows() &&
           entries.cols() == o.entries.cols() && entries == o.entries &&
           alpha == o.alpha && update_count == o.update_count;
  }

  // Unit-Gaussian rows scaled to unit length.
  static MemoryBank Random(int count, int dim, double alpha,
                           std::uint64_t seed);
};

// Index of the most cosine-similar entry per feature (lowest index on
// ties), or -1 for a zero-norm feature.
std::vector<int> AssignToBank(const MemoryBank& bank,
                              std::span<const LocalFeature> batch);

struct BankUpdateStats {
  std::vector<int> assigned;      // per entry
  std::size_t skipped_zero_norm = 0;
};

// Momentum update: every entry with assignees moves to
// alpha * entry + (1 - alpha) * mean(assignees). Throws
// std::invalid_argument for an empty batch or a dimension mismatch.
BankUpdateStats BankUpdate(MemoryBank& bank,
                           std::span<const LocalFeature> batch);

struct AttentionWeights {
  Eigen::MatrixXd query;   // C x D_m
  Eigen::MatrixXd key;     // C x D_m
  Eigen::MatrixXd value;   // C x D_m
  Eigen::MatrixXd output;  // D_m x C
  int heads = 4;

  int feature_dim() const { return static_cast<int>(query.rows()); }
  int model_dim() const { return static_cast<int>(query.cols()); }
  void Validate() const;

  // Gaussian projections with std 1/sqrt(C); the output projection is the
  // identity when D_m == C.
  static AttentionWeights Random(int feature_dim, int model_dim, int heads,
                                 std::uint64_t seed);
};

// Per-head attention maps (N x K each) of the features against the bank.
std::vector<Eigen::MatrixXd> AttentionMaps(std::span<const LocalFeature> features,
                                           const MemoryBank& bank,
                                           const AttentionWeights& weights);

// f + Wo * concat_h(softmax(q_h K_h^T / sqrt(D_m)) V_h) for every feature.
// Parallel over features.
std::vector<LocalFeature> Enhance(std::span<const LocalFeature> features,
                                  const MemoryBank& bank,
                                  const AttentionWeights& weights);

// Bank checkpoint: shared container with magic "GBNK"; header K, C, alpha,
// update_count; entries as float32 [K, C]. Entries load back as the
// float-rounded values.
inline constexpr char kBankMagic[] = "GBNK";
inline constexpr std::uint32_t kBankVersion = 1;

std::string SerializeBank(const MemoryBank& bank);
MemoryBank ParseBank(const std::string& bytes);
void WriteBank(const std::string& path, const MemoryBank& bank);
MemoryBank ReadBank(const std::string& path);

}  // namespace grasplab

#endif  // GRASPLAB_FEATURE_ENHANCER_H_
