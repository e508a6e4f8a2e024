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

#include "grasplab/depth_repair.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace grasplab {
namespace {

void RequireSameShape(const DepthMap& a, const DepthMap& b, const char* what) {
  if (a.width != b.width || a.height != b.height ||
      a.values.size() != b.values.size()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
  }
}

// Pixels within `band` (Chebyshev) of a depth discontinuity.
std::vector<std::uint8_t> EdgeBand(const DepthMap& d, int band) {
  const int w = d.width, h = d.height;
  std::vector<std::uint8_t> edge(d.size(), 0);
  if (band <= 0) return edge;
  auto jump = [&](int r0, int c0, int r1, int c1) {
    const float a = d.at(r0, c0), b = d.at(r1, c1);
    return a > 0.0f && b > 0.0f && std::abs(a - b) > kEdgeJumpMm;
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if ((c + 1 < w && jump(r, c, r, c + 1)) ||
          (r + 1 < h && jump(r, c, r + 1, c))) {
        edge[d.Offset(r, c)] = 1;
        if (c + 1 < w) edge[d.Offset(r, c + 1)] = 1;
        if (r + 1 < h) edge[d.Offset(r + 1, c)] = 1;
      }
    }
  }
  // Separable dilation.
  std::vector<std::uint8_t> rows(edge.size(), 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!edge[d.Offset(r, c)]) continue;
      for (int k = std::max(0, c - band); k <= std::min(w - 1, c + band); ++k) {
        rows[d.Offset(r, k)] = 1;
      }
    }
  }
  std::vector<std::uint8_t> out(edge.size(), 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!rows[d.Offset(r, c)]) continue;
      for (int k = std::max(0, r - band); k <= std::min(h - 1, r + band); ++k) {
        out[d.Offset(k, c)] = 1;
      }
    }
  }
  return out;
}

}  // namespace

void DepthMap::Validate() const {
  if (width < 0 || height < 0 ||
      values.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("DepthMap: size mismatch");
  }
  for (const float v : values) {
    if (!std::isfinite(v) || v < 0.0f) {
      throw std::invalid_argument("DepthMap: negative or non-finite value");
    }
  }
}

Vec3 UnprojectPixel(const CameraIntrinsics& k, int row, int col,
                    double depth_mm) {
  const double z = depth_mm * 1e-3;
  return Vec3((col - k.cx) * z / k.fx, (row - k.cy) * z / k.fy, z);
}

PointCloud DepthToCloud(const DepthMap& depth,
                        const RigidTransform& camera_to_world,
                        std::vector<std::size_t>* pixels) {
  depth.intrinsics.Validate();
  PointCloud cloud;
  if (pixels) pixels->clear();
  for (int r = 0; r < depth.height; ++r) {
    for (int c = 0; c < depth.width; ++c) {
      const float z = depth.at(r, c);
      if (!(z > 0.0f)) continue;
      cloud.points.push_back(
          camera_to_world * UnprojectPixel(depth.intrinsics, r, c, z));
      if (pixels) pixels->push_back(depth.Offset(r, c));
    }
  }
  return cloud;
}

ResidualMap MakeResidualLabel(const DepthMap& sim, const DepthMap& real) {
  RequireSameShape(sim, real, "MakeResidualLabel");
  if (!(sim.intrinsics == real.intrinsics)) {
    throw std::invalid_argument("MakeResidualLabel: intrinsics differ");
  }
  ResidualMap out{sim.width, sim.height, std::vector<double>(sim.size(), 0.0),
                  std::vector<std::uint8_t>(sim.size(), 0)};
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(sim.size()); ++i) {
    if (sim.values[i] > 0.0f && real.values[i] > 0.0f) {
      out.values[i] = static_cast<double>(sim.values[i]) -
                      static_cast<double>(real.values[i]);
      out.valid[i] = 1;
    }
  }
  return out;
}

RepairResult ApplyRepair(const DepthMap& real, const ResidualMap& residual) {
  if (real.width != residual.width || real.height != residual.height ||
      residual.values.size() != real.size() ||
      residual.valid.size() != real.size()) {
    throw std::invalid_argument("ApplyRepair: shape mismatch");
  }
  RepairResult result{real, 0};
  std::size_t clamped = 0;
#pragma omp parallel for schedule(static) reduction(+ : clamped)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(real.size()); ++i) {
    if (!residual.valid[i]) continue;
    const double v = static_cast<double>(real.values[i]) + residual.values[i];
    if (v < 0.0) {
      result.depth.values[i] = 0.0f;
      ++clamped;
    } else {
      result.depth.values[i] = static_cast<float>(v);
    }
  }
  result.clamped = clamped;
  return result;
}

void NoiseModel::Validate() const {
  if (!(sigma0 >= 0.0 && depth_gain >= 0.0 && edge_band >= 0 &&
        edge_sigma >= 0.0)) {
    throw std::invalid_argument("NoiseModel: parameters must be >= 0");
  }
  if (!(hole_rate >= 0.0 && hole_rate <= 1.0)) {
    throw std::invalid_argument("NoiseModel: hole_rate outside [0, 1]");
  }
}

DepthMap Corrupt(const DepthMap& sim, const NoiseModel& model) {
  model.Validate();
  sim.Validate();
  const std::vector<std::uint8_t> band = EdgeBand(sim, model.edge_band);
  DepthMap out = sim;
#pragma omp parallel for schedule(static)
  for (int r = 0; r < sim.height; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(model.seed),
                      static_cast<std::uint32_t>(model.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 engine(seq);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int c = 0; c < sim.width; ++c) {
      // Fixed draw count per pixel keeps the stream aligned across inputs.
      const double hole = uniform(engine);
      const double base_noise = normal(engine);
      const double edge_noise = normal(engine);
      const std::size_t i = sim.Offset(r, c);
      const double z = sim.values[i];
      if (!(z > 0.0)) continue;
      if (hole < model.hole_rate) {
        out.values[i] = 0.0f;
        continue;
      }
      const double z_m = z * 1e-3;
      double v = z + (model.sigma0 + model.depth_gain * z_m * z_m) * base_noise;
      if (band[i]) v += model.edge_sigma * edge_noise;
      out.values[i] = v > 0.0 ? static_cast<float>(v) : 0.0f;
    }
  }
  return out;
}

double Rmse(const DepthMap& pred, const DepthMap& gt) {
  RequireSameShape(pred, gt, "Rmse");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred.values[i] > 0.0f && gt.values[i] > 0.0f) {
      const double d = static_cast<double>(pred.values[i]) - gt.values[i];
      sum += d * d;
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("Rmse: no jointly valid pixel");
  return std::sqrt(sum / static_cast<double>(count));
}

ResidualMap OracleRepairer::Predict(const DepthMap& real) const {
  return MakeResidualLabel(sim_, real);
}

ResidualMap SmoothingResidual(const DepthMap& real) {
  constexpr int kRadius = 2;
  constexpr int kMinHoleSupport = 6;
  ResidualMap out{real.width, real.height,
                  std::vector<double>(real.size(), 0.0),
                  std::vector<std::uint8_t>(real.size(), 0)};
#pragma omp parallel for schedule(static)
  for (int r = 0; r < real.height; ++r) {
    std::array<float, 25> window;
    for (int c = 0; c < real.width; ++c) {
      int n = 0;
      for (int dr = -kRadius; dr <= kRadius; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= real.height) continue;
        for (int dc = -kRadius; dc <= kRadius; ++dc) {
          const int cc = c + dc;
          if (cc < 0 || cc >= real.width) continue;
          const float v = real.at(rr, cc);
          if (v > 0.0f) window[n++] = v;
        }
      }
      const std::size_t i = real.Offset(r, c);
      const float self = real.values[i];
      if (n == 0 || (!(self > 0.0f) && n < kMinHoleSupport)) continue;
      std::sort(window.begin(), window.begin() + n);
      const double median =
          n % 2 ? window[n / 2]
                : 0.5 * (static_cast<double>(window[n / 2 - 1]) + window[n / 2]);
      out.values[i] = median - static_cast<double>(self);
      out.valid[i] = 1;
    }
  }
  return out;
}

}  // namespace grasplab
