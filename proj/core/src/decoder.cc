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

#include "gridseld/decoder.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridseld/errors.h"

namespace gridseld {

CandidateTable candidate_detections(const PredictionTensor& preds, const GridSpec& grid,
                                    double score_threshold) {
  const TensorShape& shape = preds.shape();
  if (grid.cell_count() != shape.cells) {
    throw ConfigError("grid has " + std::to_string(grid.cell_count()) +
                      " cells but the tensor has " + std::to_string(shape.cells));
  }
  CandidateTable table(shape.frames, std::vector<std::vector<Candidate>>(shape.classes));
  for (int t = 0; t < shape.frames; ++t) {
    for (int g = 0; g < shape.cells; ++g) {
      const GridIndex cell = grid_index_from_flat(g, grid);
      for (int k = 0; k < shape.slots; ++k) {
        const std::size_t slot = preds.slot(t, g, k);
        const double existence = sigmoid(preds[preds.existence_index(slot)]);
        bool decoded = false;
        Direction doa;
        for (int c = 0; c < shape.classes; ++c) {
          const double score = sigmoid(preds[preds.class_index(slot, c)]) * existence;
          if (!(score > score_threshold)) continue;
          if (!decoded) {
            const std::size_t d = preds.doa_index(slot);
            doa = decode_doa(preds[d], preds[d + 1], cell, grid);
            decoded = true;
          }
          table[t][c].push_back({slot, t, c, doa, score});
        }
      }
    }
  }
  return table;
}

std::vector<Cluster> cluster_candidates(std::span<const Candidate> candidates,
                                        double upsilon_deg) {
  const std::size_t n = candidates.size();
  std::vector<int> label(n, -1);
  int next_label = 0;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (label[seed] >= 0) continue;
    label[seed] = next_label;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < n; ++b) {
        if (label[b] >= 0) continue;
        if (angular_distance(candidates[a].doa, candidates[b].doa) < upsilon_deg) {
          label[b] = next_label;
          stack.push_back(b);
        }
      }
    }
    ++next_label;
  }

  std::vector<Cluster> clusters(next_label);
  for (std::size_t i = 0; i < n; ++i) clusters[label[i]].members.push_back(candidates[i]);
  return clusters;
}

std::vector<double> unification_weights(std::span<const Candidate> members) {
  std::vector<double> logits(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    logits[i] = std::exp(members[i].score * members[i].score / 0.5);
  }
  const double top = logits.empty() ? 0.0 : *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& x : logits) {
    x = std::exp(x - top);
    sum += x;
  }
  for (double& x : logits) x /= sum;
  return logits;
}

Detection unify_cluster(const Cluster& cluster) {
  if (cluster.members.empty()) throw ValueError("cannot unify an empty cluster");
  const std::vector<double> w = unification_weights(cluster.members);

  Vec3 mean = {0.0, 0.0, 0.0};
  std::size_t best = 0;
  for (std::size_t i = 0; i < cluster.members.size(); ++i) {
    const Vec3 v = cluster.members[i].doa.to_cartesian();
    for (int a = 0; a < 3; ++a) mean[a] += w[i] * v[a];
    if (cluster.members[i].score > cluster.members[best].score) best = i;
  }

  const Candidate& top = cluster.members[best];
  Detection det{top.frame, top.class_id, top.doa, top.score};
  if (cluster.members.size() == 1) return det;
  const double norm = std::sqrt(mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]);
  if (norm > 1e-12) det.doa = Direction::from_cartesian(mean);
  return det;
}

std::vector<Detection> decode(const PredictionTensor& preds, const GridSpec& grid,
                              double upsilon_deg, double score_threshold) {
  const CandidateTable table = candidate_detections(preds, grid, score_threshold);
  std::vector<Detection> out;
  for (const auto& frame : table) {
    for (const auto& per_class : frame) {
      for (const Cluster& cluster : cluster_candidates(per_class, upsilon_deg)) {
        out.push_back(unify_cluster(cluster));
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    if (a.frame != b.frame) return a.frame < b.frame;
    if (a.class_id != b.class_id) return a.class_id < b.class_id;
    return a.score > b.score;
  });
  return out;
}

}  // namespace gridseld
