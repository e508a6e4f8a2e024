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

#include "grasplab/feature_enhancer.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "Eigen/Eigenvalues"
#include "grasplab/io_util.h"

namespace grasplab {
namespace {

int Bin(double value, double upper, int bins) {
  const int b = static_cast<int>(std::floor(value / upper * bins));
  return std::clamp(b, 0, bins - 1);
}

void RequireBatch(const MemoryBank& bank, std::span<const LocalFeature> batch) {
  for (const LocalFeature& f : batch) {
    if (f.vector.size() != bank.dim()) {
      throw std::invalid_argument("feature dimension " +
                                  std::to_string(f.vector.size()) +
                                  " does not match bank dimension " +
                                  std::to_string(bank.dim()));
    }
  }
}

}  // namespace

LocalFeature ExtractDescriptor(const PointCloud& cloud, const Vec3& point,
                               const Vec3& view, const GripperModel& gripper,
                               int dim) {
  if (dim < 1) throw std::invalid_argument("ExtractDescriptor: dim < 1");
  if (!cloud.HasNormals()) {
    throw std::invalid_argument("ExtractDescriptor: cloud has no normals");
  }
  const double radius = 0.5 * gripper.max_width;
  const std::vector<std::size_t> members = CylinderGroup(
      cloud, point, view, radius, gripper.finger_length);
  if (members.empty()) {
    throw std::invalid_argument("ExtractDescriptor: empty neighbourhood");
  }

  // Canonical order so that the floating-point sums do not depend on the
  // input ordering.
  std::vector<std::pair<Vec3, Vec3>> samples;
  samples.reserve(members.size());
  for (const std::size_t i : members) {
    samples.emplace_back(cloud.points[i], cloud.normals[i]);
  }
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.first.data(), a.first.data() + 3,
                                        b.first.data(), b.first.data() + 3);
  });

  const double n = static_cast<double>(samples.size());
  Vec3 mean = Vec3::Zero();
  for (const auto& s : samples) mean += s.first;
  mean /= n;
  Mat3 cov = Mat3::Zero();
  for (const auto& s : samples) {
    const Vec3 d = s.first - mean;
    cov += d * d.transpose();
  }
  cov /= n;

  std::array<double, kDescriptorBlock> block{};
  const Eigen::SelfAdjointEigenSolver<Mat3> solver(cov, Eigen::EigenvaluesOnly);
  Vec3 eig = solver.eigenvalues().cwiseMax(0.0);
  std::sort(eig.data(), eig.data() + 3, std::greater<>());
  const double total = eig.sum();
  for (int k = 0; k < 3; ++k) block[k] = total > 0.0 ? eig[k] / total : 0.0;

  const Vec3 axis = view.normalized();
  for (const auto& [p, normal] : samples) {
    const double c = std::clamp(normal.dot(axis), -1.0, 1.0);
    block[3 + Bin(std::acos(c), kPi, kNormalBins)] += 1.0 / n;
    const Vec3 d = p - point;
    const double radial = (d - d.dot(axis) * axis).norm();
    block[3 + kNormalBins + Bin(radial, radius, kRadialBins)] += 1.0 / n;
  }

  LocalFeature f;
  f.vector.resize(dim);
  for (int i = 0; i < dim; ++i) f.vector[i] = block[i % kDescriptorBlock];
  f.source_point = point;
  f.source_view = axis;
  return f;
}

void MemoryBank::Validate() const {
  if (entries.rows() < 1 || entries.cols() < 1) {
    throw std::invalid_argument("MemoryBank: empty");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("MemoryBank: alpha outside [0, 1]");
  }
  if (!entries.allFinite()) {
    throw std::invalid_argument("MemoryBank: non-finite entry");
  }
}

MemoryBank MemoryBank::Random(int count, int dim, double alpha,
                              std::uint64_t seed) {
  if (count < 1 || dim < 1) {
    throw std::invalid_argument("MemoryBank::Random: K and C must be >= 1");
  }
  MemoryBank bank;
  bank.alpha = alpha;
  bank.entries.resize(count, dim);
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < count; ++k) {
    for (int c = 0; c < dim; ++c) bank.entries(k, c) = normal(engine);
    const double norm = bank.entries.row(k).norm();
    if (norm > 0.0) bank.entries.row(k) /= norm;
  }
  bank.Validate();
  return bank;
}

std::vector<int> AssignToBank(const MemoryBank& bank,
                              std::span<const LocalFeature> batch) {
  bank.Validate();
  RequireBatch(bank, batch);
  Eigen::VectorXd entry_norm(bank.size());
  for (int k = 0; k < bank.size(); ++k) entry_norm[k] = bank.entries.row(k).norm();

  std::vector<int> out(batch.size(), -1);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(batch.size()); ++i) {
    const Eigen::VectorXd& f = batch[i].vector;
    const double fn = f.norm();
    if (!(fn > 0.0)) continue;
    int best = 0;
    double best_sim = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < bank.size(); ++k) {
      const double sim = entry_norm[k] > 0.0
                             ? bank.entries.row(k).dot(f) / (entry_norm[k] * fn)
                             : 0.0;
      if (sim > best_sim) {
        best_sim = sim;
        best = k;
      }
    }
    out[i] = best;
  }
  return out;
}

BankUpdateStats BankUpdate(MemoryBank& bank,
                           std::span<const LocalFeature> batch) {
  if (batch.empty()) throw std::invalid_argument("BankUpdate: empty batch");
  const std::vector<int> assignment = AssignToBank(bank, batch);

  BankUpdateStats stats;
  stats.assigned.assign(bank.size(), 0);
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(bank.size(), bank.dim());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const int k = assignment[i];
    if (k < 0) {
      ++stats.skipped_zero_norm;
      continue;
    }
    const int n = ++stats.assigned[k];
    means.row(k) += (batch[i].vector.transpose() - means.row(k)) / n;
  }
  for (int k = 0; k < bank.size(); ++k) {
    if (stats.assigned[k] == 0) continue;
    bank.entries.row(k) =
        bank.alpha * bank.entries.row(k) + (1.0 - bank.alpha) * means.row(k);
  }
  ++bank.update_count;
  return stats;
}

void AttentionWeights::Validate() const {
  const auto c = query.rows();
  const auto d = query.cols();
  if (c < 1 || d < 1 || key.rows() != c || key.cols() != d ||
      value.rows() != c || value.cols() != d || output.rows() != d ||
      output.cols() != c) {
    throw std::invalid_argument("AttentionWeights: inconsistent shapes");
  }
  if (heads < 1 || d % heads != 0) {
    throw std::invalid_argument(
        "AttentionWeights: model dimension not divisible by heads");
  }
  if (!query.allFinite() || !key.allFinite() || !value.allFinite() ||
      !output.allFinite()) {
    throw std::invalid_argument("AttentionWeights: non-finite weight");
  }
}

AttentionWeights AttentionWeights::Random(int feature_dim, int model_dim,
                                          int heads, std::uint64_t seed) {
  if (feature_dim < 1 || model_dim < 1) {
    throw std::invalid_argument("AttentionWeights::Random: bad dimensions");
  }
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(feature_dim));
  auto draw = [&](int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m(r, c) = normal(engine);
    }
    return m;
  };
  AttentionWeights w;
  w.heads = heads;
  w.query = draw(feature_dim, model_dim);
  w.key = draw(feature_dim, model_dim);
  w.value = draw(feature_dim, model_dim);
  if (model_dim == feature_dim) {
    w.output = Eigen::MatrixXd::Identity(model_dim, feature_dim);
  } else {
    w.output = draw(model_dim, feature_dim);
  }
  w.Validate();
  return w;
}

namespace {

struct BankProjection {
  Eigen::MatrixXd keys;    // K x D_m
  Eigen::MatrixXd values;  // K x D_m
};

BankProjection Project(const MemoryBank& bank, const AttentionWeights& w) {
  bank.Validate();
  w.Validate();
  if (bank.dim() != w.feature_dim()) {
    throw std::invalid_argument("attention: bank dimension does not match weights");
  }
  return {bank.entries * w.key, bank.entries * w.value};
}

void RequireFeatures(std::span<const LocalFeature> features,
                     const AttentionWeights& w) {
  for (const LocalFeature& f : features) {
    if (f.vector.size() != w.feature_dim()) {
      throw std::invalid_argument("attention: feature dimension mismatch");
    }
  }
}

// Softmax attention of one projected query against one head's keys.
Eigen::VectorXd HeadAttention(const Eigen::RowVectorXd& q,
                              const Eigen::MatrixXd& keys, int begin,
                              int width, double scale) {
  Eigen::VectorXd logits =
      keys.middleCols(begin, width) * q.segment(begin, width).transpose();
  logits *= scale;
  const double peak = logits.maxCoeff();
  Eigen::VectorXd weights = (logits.array() - peak).exp().matrix();
  weights /= weights.sum();
  return weights;
}

}  // namespace

std::vector<Eigen::MatrixXd> AttentionMaps(
    std::span<const LocalFeature> features, const MemoryBank& bank,
    const AttentionWeights& weights) {
  const BankProjection proj = Project(bank, weights);
  RequireFeatures(features, weights);
  const int width = weights.model_dim() / weights.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(weights.model_dim()));
  std::vector<Eigen::MatrixXd> maps(
      weights.heads, Eigen::MatrixXd(features.size(), bank.size()));
  for (std::size_t i = 0; i < features.size(); ++i) {
    const Eigen::RowVectorXd q = features[i].vector.transpose() * weights.query;
    for (int h = 0; h < weights.heads; ++h) {
      maps[h].row(i) =
          HeadAttention(q, proj.keys, h * width, width, scale).transpose();
    }
  }
  return maps;
}

std::vector<LocalFeature> Enhance(std::span<const LocalFeature> features,
                                  const MemoryBank& bank,
                                  const AttentionWeights& weights) {
  const BankProjection proj = Project(bank, weights);
  RequireFeatures(features, weights);
  const int width = weights.model_dim() / weights.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(weights.model_dim()));
  std::vector<LocalFeature> out(features.begin(), features.end());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(features.size()); ++i) {
    const Eigen::RowVectorXd q = features[i].vector.transpose() * weights.query;
    Eigen::RowVectorXd attended(weights.model_dim());
    for (int h = 0; h < weights.heads; ++h) {
      const Eigen::VectorXd a = HeadAttention(q, proj.keys, h * width, width, scale);
      attended.segment(h * width, width) =
          a.transpose() * proj.values.middleCols(h * width, width);
    }
    out[i].vector =
        features[i].vector + (attended * weights.output).transpose();
  }
  return out;
}

std::string SerializeBank(const MemoryBank& bank) {
  bank.Validate();
  const nlohmann::json header = {{"format", "GBNK"},
                                 {"K", bank.size()},
                                 {"C", bank.dim()},
                                 {"alpha", bank.alpha},
                                 {"update_count", bank.update_count}};
  ContainerBlock block{"entries", "float32",
                       {static_cast<std::uint64_t>(bank.size()),
                        static_cast<std::uint64_t>(bank.dim())},
                       {}};
  std::vector<float> flat;
  flat.reserve(bank.entries.size());
  for (int k = 0; k < bank.size(); ++k) {
    for (int c = 0; c < bank.dim(); ++c) {
      flat.push_back(static_cast<float>(bank.entries(k, c)));
    }
  }
  AppendPodArray(block.data, std::span<const float>(flat));
  return WriteContainer(std::string_view(kBankMagic, 4), kBankVersion, header,
                        {block});
}

MemoryBank ParseBank(const std::string& bytes) {
  const Container c =
      ReadContainer(bytes, std::string_view(kBankMagic, 4), kBankVersion);
  MemoryBank bank;
  int rows = 0, cols = 0;
  try {
    rows = c.header.at("K").get<int>();
    cols = c.header.at("C").get<int>();
    bank.alpha = c.header.at("alpha").get<double>();
    bank.update_count = c.header.at("update_count").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bank header: ") + e.what());
  }
  const ContainerBlock& block = c.Block("entries");
  const std::vector<float> flat = BlockValues<float>(block);
  if (block.dtype != "float32" || rows < 1 || cols < 1 ||
      flat.size() != static_cast<std::size_t>(rows) * cols) {
    throw InvariantViolation("bank: entries block does not match K x C");
  }
  bank.entries.resize(rows, cols);
  for (int k = 0; k < rows; ++k) {
    for (int j = 0; j < cols; ++j) bank.entries(k, j) = flat[k * cols + j];
  }
  try {
    bank.Validate();
  } catch (const std::invalid_argument& e) {
    throw InvariantViolation(e.what());
  }
  return bank;
}

void WriteBank(const std::string& path, const MemoryBank& bank) {
  WriteFileBytes(path, SerializeBank(bank));
}

MemoryBank ReadBank(const std::string& path) {
  return ParseBank(ReadFileBytes(path));
}

}  // namespace grasplab
