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

#ifndef GRIDSELD_SIMULATOR_H_
#define GRIDSELD_SIMULATOR_H_

#include <cstdint>

#include <Eigen/Core>

#include "gridseld/labels.h"

namespace gridseld {

enum class TrajectoryKind { kStatic, kDrift };

struct SceneSpec {
  int num_frames = 100;
  int num_classes = 5;
  int max_polyphony = 3;
  double same_class_overlap_prob = 0.0;
  TrajectoryKind trajectory = TrajectoryKind::kStatic;
  double angular_velocity_deg = 1.0;  // per frame, drift only
  double birth_prob = 0.3;            // per frame, while below max_polyphony
  double death_prob = 0.05;           // per frame and active event
  double min_separation_deg = 45.0;   // between a newborn and active events
  double max_abs_elevation_deg = 60.0;
  double noise_amplitude = 0.0;
  std::uint64_t seed = 0;
  GridSpec grid;

  // Throws ConfigError on out-of-range fields.
  void validate() const;
};

// Feature width: a (count, x, y, z) block per class.
inline int feature_dimension(int num_classes) { return 4 * num_classes; }

struct Scene {
  ReferenceSet refs;
  // T x (4C). Block c of frame t sums (1, unit DOA) over the active events of
  // class c, plus seeded Gaussian noise of amplitude noise_amplitude.
  Eigen::MatrixXd features;
  // Parallel to refs.events: simulator source id of each event.
  std::vector<int> source_ids;
};

// Deterministic for a given spec (including its seed).
Scene simulate(const SceneSpec& spec);

}  // namespace gridseld

#endif  // GRIDSELD_SIMULATOR_H_
