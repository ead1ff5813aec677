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

#include "gridseld/trainer.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "gridseld/errors.h"

namespace gridseld {

LossBreakdown scenes_loss(const ToyHead& head, std::span<const Scene> scenes,
                          const LossWeights& weights, std::span<const double> thresholds,
                          std::vector<double>* grad) {
  if (scenes.empty()) throw ConfigError("training needs at least one scene");
  const double inv = 1.0 / static_cast<double>(scenes.size());
  if (grad) grad->assign(head.parameters().size(), 0.0);

  LossBreakdown mean;
  for (const Scene& scene : scenes) {
    const PredictionTensor preds = head.forward(scene.features);
    LossResult r = total_loss(scene.refs, preds, weights, thresholds);
    if (mean.thresholds.empty()) {
      mean.thresholds = r.breakdown.thresholds;
      mean.l_pos.assign(mean.thresholds.size(), 0.0);
      mean.l_neg.assign(mean.thresholds.size(), 0.0);
      mean.l_class.assign(mean.thresholds.size(), 0.0);
    }
    mean.l_delta += inv * r.breakdown.l_delta;
    for (std::size_t l = 0; l < mean.thresholds.size(); ++l) {
      mean.l_pos[l] += inv * r.breakdown.l_pos[l];
      mean.l_neg[l] += inv * r.breakdown.l_neg[l];
      mean.l_class[l] += inv * r.breakdown.l_class[l];
    }
    mean.total += inv * r.breakdown.total;
    if (grad) {
      const std::vector<double> g = head.backward(scene.features, r.gradient);
      for (std::size_t i = 0; i < g.size(); ++i) (*grad)[i] += inv * g[i];
    }
  }
  return mean;
}

namespace {

void check_finite(const LossBreakdown& b, int epoch) {
  if (!std::isfinite(b.total)) {
    throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                          ": total loss is " + std::to_string(b.total) +
                          " (l_delta " + std::to_string(b.l_delta) + ")");
  }
}

}  // namespace

TrainResult train_toy(std::span<const Scene> scenes, ToyHead head, const TrainOptions& options) {
  if (options.epochs < 0 || !(options.learning_rate >= 0.0)) {
    throw ConfigError("epochs and learning rate must be non-negative");
  }
  TrainResult result;
  double lr = options.learning_rate;

  std::vector<double> grad;
  LossBreakdown current = scenes_loss(head, scenes, options.weights, options.thresholds, &grad);
  check_finite(current, 0);

  std::vector<double> start(head.parameters().begin(), head.parameters().end());
  std::deque<double> recent{current.total};
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    result.curve.push_back(current);
    if (options.on_epoch) options.on_epoch(epoch, current);

    double grad_sq = 0.0;
    for (double g : grad) grad_sq += g * g;
    std::copy(head.parameters().begin(), head.parameters().end(), start.begin());

    auto take_step = [&](double step) {
      std::span<double> p = head.parameters();
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = start[i] - step * grad[i];
    };

    if (!options.backtracking) {
      take_step(lr);
      current = scenes_loss(head, scenes, options.weights, options.thresholds, &grad);
      check_finite(current, epoch + 1);
      continue;
    }

    const double reference = *std::max_element(recent.begin(), recent.end());
    const double min_step = options.min_step_fraction * options.learning_rate;
    bool accepted = false;
    for (int trial = 0; trial < options.max_trials && lr >= min_step; ++trial) {
      take_step(lr);
      const LossBreakdown candidate =
          scenes_loss(head, scenes, options.weights, options.thresholds, nullptr);
      if (std::isfinite(candidate.total) &&
          candidate.total <= reference - options.armijo * lr * grad_sq) {
        accepted = true;
        break;
      }
      lr *= options.shrink;
    }
    if (!accepted) {
      lr = std::max(lr, min_step);
      take_step(lr);
    }
    current = scenes_loss(head, scenes, options.weights, options.thresholds, &grad);
    check_finite(current, epoch + 1);
    recent.push_back(current.total);
    if (static_cast<int>(recent.size()) > std::max(1, options.memory)) recent.pop_front();
    if (accepted) lr *= options.grow;
  }
  result.curve.push_back(current);
  result.final_learning_rate = lr;
  result.head = std::move(head);
  return result;
}

}  // namespace gridseld
