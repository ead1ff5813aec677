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

#ifndef GRIDSELD_TRAINER_H_
#define GRIDSELD_TRAINER_H_

#include <functional>
#include <span>
#include <vector>

#include "gridseld/loss.h"
#include "gridseld/simulator.h"
#include "gridseld/toy_head.h"

namespace gridseld {

struct TrainOptions {
  int epochs = 2000;
  double learning_rate = 1.0;  // initial step; adapted when backtracking
  bool backtracking = true;
  double grow = 1.2;    // step multiplier after an accepted step
  double shrink = 0.5;  // step multiplier after a rejected trial
  int max_trials = 30;
  double armijo = 1e-4;
  // Armijo reference is the largest loss among the last `memory` accepted
  // iterates; the loss jumps where responsibility masks change, so a strictly
  // monotone test stalls at those jumps.
  int memory = 10;
  // When no trial passes, the step is taken anyway at this size (relative to
  // the initial learning rate) and the search restarts from there.
  double min_step_fraction = 1e-3;
  LossWeights weights;
  std::vector<double> thresholds = kDefaultThresholds;
  // Called after each epoch with (epoch, loss at the start of the epoch).
  std::function<void(int, const LossBreakdown&)> on_epoch;
};

struct TrainResult {
  ToyHead head;
  // curve[e] is the loss before the update of epoch e; the final entry is
  // the loss of the returned head (epochs + 1 entries).
  std::vector<LossBreakdown> curve;
  double final_learning_rate = 0.0;
};

// Loss of the head on every scene, averaged component-wise over scenes, with
// its gradient with respect to the head parameters when `grad` is non-null.
LossBreakdown scenes_loss(const ToyHead& head, std::span<const Scene> scenes,
                          const LossWeights& weights, std::span<const double> thresholds,
                          std::vector<double>* grad);

// Full-batch gradient descent. With backtracking, the step shrinks until the
// non-monotone Armijo condition holds, then grows again after acceptance.
// Without backtracking every step uses learning_rate as is. Throws
// DivergenceError when the loss becomes non-finite.
TrainResult train_toy(std::span<const Scene> scenes, ToyHead head, const TrainOptions& options);

}  // namespace gridseld

#endif  // GRIDSELD_TRAINER_H_
