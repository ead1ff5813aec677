// Copyright 2026 The gridseld Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GRIDSELD_DECODER_H_
#define GRIDSELD_DECODER_H_

#include <cstddef>
#include <span>
#include <vector>

#include "gridseld/geometry.h"
#include "gridseld/labels.h"

namespace gridseld {

struct Detection {
  int frame = 0;
  int class_id = 0;
  Direction doa;
  double score = 0.0;
};

struct Candidate {
  std::size_t slot = 0;
  int frame = 0;
  int class_id = 0;
  Direction doa;
  double score = 0.0;  // sigmoid(class logit) * sigmoid(existence logit)
};

// candidates[t][c] lists the predictions of frame t whose class-c score is
// strictly above score_threshold, in slot order.
using CandidateTable = std::vector<std::vector<std::vector<Candidate>>>;

CandidateTable candidate_detections(const PredictionTensor& preds, const GridSpec& grid,
                                    double score_threshold = 0.5);

struct Cluster {
  std::vector<Candidate> members;
};

// Connected components of the graph linking candidates closer than
// upsilon_deg. Components are ordered by their first member; members keep
// input order.
std::vector<Cluster> cluster_candidates(std::span<const Candidate> candidates,
                                        double upsilon_deg);

// Softmax over members of exp(score^2 / 0.5).
std::vector<double> unification_weights(std::span<const Candidate> members);

// Weighted mean of member unit vectors, projected back to the sphere; the
// score is the highest member score. If the weighted sum vanishes the
// highest-scoring member's DOA is used. Throws ValueError on an empty cluster.
Detection unify_cluster(const Cluster& cluster);

// Thresholding, per-class clustering and unification for every frame. Output
// is sorted by (frame, class_id, descending score).
std::vector<Detection> decode(const PredictionTensor& preds, const GridSpec& grid,
                              double upsilon_deg, double score_threshold = 0.5);

}  // namespace gridseld

#endif  // GRIDSELD_DECODER_H_
