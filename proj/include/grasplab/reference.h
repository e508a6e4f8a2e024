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

#ifndef GRASPLAB_REFERENCE_H_
#define GRASPLAB_REFERENCE_H_

// Serial brute-force versions of the parallel kernels. They share the
// per-candidate geometry functions but skip every spatial index and
// pre-filter, and exist to check and benchmark the fast paths.

#include <span>
#include <vector>

#include "grasplab/depth_repair.h"
#include "grasplab/evaluator.h"
#include "grasplab/feature_enhancer.h"
#include "grasplab/object_annotator.h"
#include "grasplab/scene_annotator.h"

namespace grasplab::reference {

// Every candidate: AdjustWidth then ScoreGrasp over the whole surface.
AnnotationTensor AnnotatePoints(const ObjectModel& object,
                                std::span<const Vec3> grasp_points,
                                const AnnotationConfig& config);

// Every candidate against every scene point.
CandidateSet CullCollisions(CandidateSet candidates,
                            const PointCloud& scene_cloud,
                            const GripperModel& gripper);

// Exhaustive nearest-neighbour assignment per pixel.
SupervisionTargets RenderSupervision(const SceneGroundTruth& scene,
                                     const DepthMap& depth);

bool JudgeGrasp(const GraspPose& grasp, const SceneGroundTruth& scene,
                double mu);

// Whole-matrix attention: per head softmax(F Wq (M Wk)^T / sqrt(D_m)) M Wv.
std::vector<LocalFeature> Enhance(std::span<const LocalFeature> features,
                                  const MemoryBank& bank,
                                  const AttentionWeights& weights);

}  // namespace grasplab::reference

#endif  // GRASPLAB_REFERENCE_H_
