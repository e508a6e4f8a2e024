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

#include <cmath>
#include <stdexcept>

#include "grasplab/reference.h"

namespace grasplab::reference {

std::vector<LocalFeature> Enhance(std::span<const LocalFeature> features,
                                  const MemoryBank& bank,
                                  const AttentionWeights& weights) {
  weights.Validate();
  const int n = static_cast<int>(features.size());
  const int c = weights.feature_dim();
  if (bank.dim() != c) throw std::invalid_argument("Enhance: bank dimension");
  Eigen::MatrixXd f(n, c);
  for (int i = 0; i < n; ++i) {
    if (features[i].vector.size() != c) {
      throw std::invalid_argument("Enhance: feature dimension");
    }
    f.row(i) = features[i].vector.transpose();
  }
  const Eigen::MatrixXd q = f * weights.query;
  const Eigen::MatrixXd k = bank.entries * weights.key;
  const Eigen::MatrixXd v = bank.entries * weights.value;
  const int dm = weights.model_dim();
  const int width = dm / weights.heads;
  Eigen::MatrixXd attended(n, dm);
  for (int h = 0; h < weights.heads; ++h) {
    Eigen::MatrixXd logits = q.middleCols(h * width, width) *
                             k.middleCols(h * width, width).transpose() /
                             std::sqrt(static_cast<double>(dm));
    for (int i = 0; i < n; ++i) {
      logits.row(i).array() -= logits.row(i).maxCoeff();
      logits.row(i) = logits.row(i).array().exp().matrix();
      logits.row(i) /= logits.row(i).sum();
    }
    attended.middleCols(h * width, width) =
        logits * v.middleCols(h * width, width);
  }
  const Eigen::MatrixXd out = f + attended * weights.output;
  std::vector<LocalFeature> result(features.begin(), features.end());
  for (int i = 0; i < n; ++i) result[i].vector = out.row(i).transpose();
  return result;
}

}  // namespace grasplab::reference
