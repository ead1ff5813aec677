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

#include "gridseld/loss.h"

#include <algorithm>
#include <cmath>

#include "gridseld/errors.h"

namespace gridseld {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double weighted_total(const LossBreakdown& b, const LossWeights& w) {
  double layered = 0.0;
  for (std::size_t l = 0; l < b.thresholds.size(); ++l) {
    layered += w.w_pos * b.l_pos[l] + w.w_neg * b.l_neg[l] + w.w_class * b.l_class[l];
  }
  const double n = static_cast<double>(b.thresholds.size());
  return w.w_delta * b.l_delta + (n > 0.0 ? layered / n : 0.0);
}

double doa_loss(const ReferenceSet& refs, const PredictionTensor& preds,
                const ThresholdMasks& level, std::span<double> grad, double scale) {
  const std::size_t pairs = level.pair_count();
  if (pairs == 0) return 0.0;

  // delta_rad / (pi * pairs) == delta_deg / (180 * pairs)
  const double norm = 1.0 / (180.0 * static_cast<double>(pairs));
  double sum_deg = 0.0;
  for (std::size_t m = 0; m < level.per_reference.size(); ++m) {
    for (const ResponsibleSlot& r : level.per_reference[m]) {
      sum_deg += r.distance_deg;
      if (grad.empty()) continue;
      const GridIndex cell = grid_index_from_flat(preds.cell_of_slot(r.slot), refs.grid);
      const std::size_t doa = preds.doa_index(r.slot);
      const double u = preds[doa];
      const double v = preds[doa + 1];
      const Direction predicted = decode_doa(u, v, cell, refs.grid);
      const AngleGradient g = angular_distance_grad(predicted, refs.events[m].doa);
      const AngleGradient j = decode_doa_jacobian(u, v, cell, refs.grid);
      grad[doa] += scale * norm * g.d_azimuth * j.d_azimuth;
      grad[doa + 1] += scale * norm * g.d_elevation * j.d_elevation;
    }
  }
  return sum_deg * norm;
}

ExistenceLoss existence_losses(const PredictionTensor& preds, const ThresholdMasks& level,
                               std::span<double> grad, double pos_scale, double neg_scale) {
  const std::size_t slots = preds.shape().slot_count();
  const std::size_t n_pos = level.responsible_count();
  const std::size_t n_neg = slots - n_pos;
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t s = 0; s < slots; ++s) {
    const std::size_t idx = preds.existence_index(s);
    const double z = preds[idx];
    if (level.existence[s]) {
      pos += softplus(-z);
      if (!grad.empty()) grad[idx] += pos_scale * (sigmoid(z) - 1.0) / static_cast<double>(n_pos);
    } else {
      neg += softplus(z);
      if (!grad.empty()) grad[idx] += neg_scale * sigmoid(z) / static_cast<double>(n_neg);
    }
  }
  ExistenceLoss out;
  if (n_pos > 0) out.positive = pos / static_cast<double>(n_pos);
  if (n_neg > 0) out.negative = neg / static_cast<double>(n_neg);
  return out;
}

double class_loss(const PredictionTensor& preds, const ThresholdMasks& level,
                  std::span<double> grad, double scale) {
  const int num_classes = preds.shape().classes;
  const std::size_t slots = preds.shape().slot_count();
  const std::size_t responsible = level.responsible_count();
  if (responsible == 0) return 0.0;

  const double norm = 1.0 / (static_cast<double>(num_classes) * static_cast<double>(responsible));
  double sum = 0.0;
  for (std::size_t s = 0; s < slots; ++s) {
    if (!level.existence[s]) continue;
    for (int c = 0; c < num_classes; ++c) {
      const std::size_t idx = preds.class_index(s, c);
      const double z = preds[idx];
      const bool target = level.classes[s * num_classes + c] != 0;
      sum += target ? softplus(-z) : softplus(z);
      if (!grad.empty()) grad[idx] += scale * norm * (sigmoid(z) - (target ? 1.0 : 0.0));
    }
  }
  return sum * norm;
}

LossResult total_loss(const ReferenceSet& refs, const PredictionTensor& preds,
                      const LossWeights& weights, std::span<const double> thresholds) {
  if (weights.w_delta < 0.0 || weights.w_pos < 0.0 || weights.w_neg < 0.0 ||
      weights.w_class < 0.0) {
    throw ConfigError("loss weights must be non-negative");
  }
  const ResponsibilityMasks masks = assign_responsibility(refs, preds, thresholds);

  LossResult result;
  result.gradient.assign(preds.values().size(), 0.0);
  std::span<double> grad(result.gradient);
  LossBreakdown& b = result.breakdown;

  const double tau_max = *std::max_element(thresholds.begin(), thresholds.end());
  b.l_delta = doa_loss(refs, preds, masks.at(tau_max), grad, weights.w_delta);

  const double layer_scale = 1.0 / static_cast<double>(thresholds.size());
  for (const ThresholdMasks& level : masks.levels) {
    const ExistenceLoss e = existence_losses(preds, level, grad, layer_scale * weights.w_pos,
                                             layer_scale * weights.w_neg);
    b.thresholds.push_back(level.tau_deg);
    b.l_pos.push_back(e.positive);
    b.l_neg.push_back(e.negative);
    b.l_class.push_back(class_loss(preds, level, grad, layer_scale * weights.w_class));
  }
  b.total = weighted_total(b, weights);
  return result;
}

}  // namespace gridseld
