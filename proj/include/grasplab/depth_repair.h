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

#ifndef GRASPLAB_DEPTH_REPAIR_H_
#define GRASPLAB_DEPTH_REPAIR_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "grasplab/geometry.h"

namespace grasplab {

// Metric depth image in millimetres; 0 marks a missing pixel.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;
  CameraIntrinsics intrinsics;

  DepthMap() = default;
  DepthMap(int w, int h, const CameraIntrinsics& k, float fill = 0.0f)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill),
        intrinsics(k) {}

  std::size_t size() const { return values.size(); }
  float& at(int row, int col) { return values[Offset(row, col)]; }
  float at(int row, int col) const { return values[Offset(row, col)]; }
  std::size_t Offset(int row, int col) const {
    return static_cast<std::size_t>(row) * width + col;
  }

  // Throws std::invalid_argument on negative/non-finite values or a size
  // mismatch.
  void Validate() const;
  bool operator==(const DepthMap&) const = default;
};

// Signed per-pixel correction in millimetres. Kept in double so that
// real + (sim - real) reproduces sim exactly.
struct ResidualMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;
};

// Camera-frame point of pixel (row, col) at `depth_mm`, in metres.
Vec3 UnprojectPixel(const CameraIntrinsics& k, int row, int col,
                    double depth_mm);

// Valid pixels as a world-frame cloud; `pixels` (optional) receives the
// linear pixel offset of every point.
PointCloud DepthToCloud(const DepthMap& depth,
                        const RigidTransform& camera_to_world,
                        std::vector<std::size_t>* pixels = nullptr);

// sim - real; invalid where either input is missing.
ResidualMap MakeResidualLabel(const DepthMap& sim, const DepthMap& real);

struct RepairResult {
  DepthMap depth;
  std::size_t clamped = 0;  // pixels that went negative and were set to 0
};

// real + residual on residual-valid pixels; other pixels pass through.
RepairResult ApplyRepair(const DepthMap& real, const ResidualMap& residual);

struct NoiseModel {
  double sigma0 = 0.0;       // mm
  double depth_gain = 0.0;   // mm per m^2
  int edge_band = 0;         // px
  double edge_sigma = 0.0;   // mm
  double hole_rate = 0.0;
  std::uint64_t seed = 0;

  void Validate() const;
  bool operator==(const NoiseModel&) const = default;
};

// Jump between 4-neighbours that marks a depth discontinuity.
inline constexpr double kEdgeJumpMm = 20.0;

// Gaussian noise with std sigma0 + depth_gain * z^2, extra edge noise within
// edge_band px of discontinuities and random holes. Each row draws from its
// own engine seeded by (seed, row), so the parallel and serial loops agree.
DepthMap Corrupt(const DepthMap& sim, const NoiseModel& model);

// Root-mean-square difference over jointly valid pixels. Throws
// std::invalid_argument when no pixel is valid in both.
double Rmse(const DepthMap& pred, const DepthMap& gt);

// Pluggable residual predictor: real depth in, residual out.
class DepthRepairer {
 public:
  virtual ~DepthRepairer() = default;
  virtual ResidualMap Predict(const DepthMap& real) const = 0;
};

// Returns the exact label against a known simulated map.
class OracleRepairer : public DepthRepairer {
 public:
  explicit OracleRepairer(DepthMap sim) : sim_(std::move(sim)) {}
  ResidualMap Predict(const DepthMap& real) const override;

 private:
  DepthMap sim_;
};

// 5x5 median over valid pixels minus the input. Holes with at least 6 valid
// neighbours are filled with the median.
ResidualMap SmoothingResidual(const DepthMap& real);

class SmoothingRepairer : public DepthRepairer {
 public:
  ResidualMap Predict(const DepthMap& real) const override {
    return SmoothingResidual(real);
  }
};

}  // namespace grasplab

#endif  // GRASPLAB_DEPTH_REPAIR_H_
