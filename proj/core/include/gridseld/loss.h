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

#ifndef GRIDSELD_LOSS_H_
#define GRIDSELD_LOSS_H_

#include <span>
#include <vector>

#include "gridseld/labels.h"

namespace gridseld {

struct LossWeights {
  double w_delta = 5.0;
  double w_pos = 1.0;
  double w_neg = 5.0;
  double w_class = 3.0;
};

// Default multi-level responsibility thresholds, in degrees.
inline const std::vector<double> kDefaultThresholds = {45.0, 25.0, 10.0};

struct LossBreakdown {
  double l_delta = 0.0;
  std::vector<double> thresholds;  // tau values, same order as the vectors below
  std::vector<double> l_pos;
  std::vector<double> l_neg;
  std::vector<double> l_class;
  double total = 0.0;
};

// w_delta * l_delta + mean over tau of (w_pos l_pos + w_neg l_neg + w_class l_class).
// total_loss() uses this exact expression for LossBreakdown::total.
double weighted_total(const LossBreakdown& b, const LossWeights& w);

// Mean angular distance (radians, normalized by pi) over all
// (reference, responsible slot) pairs of `level`; 0 when there are none.
// When `grad` is non-empty, adds scale * d(l_delta)/d(raw) into it.
double doa_loss(const ReferenceSet& refs, const PredictionTensor& preds,
                const ThresholdMasks& level, std::span<double> grad = {},
                double scale = 1.0);

struct ExistenceLoss {
  double positive = 0.0;  // mean BCE(1, p(o)) over responsible slots
  double negative = 0.0;  // mean BCE(0, p(o)) over all other slots
};

ExistenceLoss existence_losses(const PredictionTensor& preds, const ThresholdMasks& level,
                               std::span<double> grad = {}, double pos_scale = 1.0,
                               double neg_scale = 1.0);

// Per-class BCE over responsible slots, averaged over C x (responsible slots).
double class_loss(const PredictionTensor& preds, const ThresholdMasks& level,
                  std::span<double> grad = {}, double scale = 1.0);

struct LossResult {
  LossBreakdown breakdown;
  std::vector<double> gradient;  // same layout as PredictionTensor::values()
};

// Builds responsibility masks for `thresholds` and assembles the weighted
// loss; l_delta uses the largest threshold. Throws ConfigError on shape
// mismatch, an empty threshold set or negative weights.
LossResult total_loss(const ReferenceSet& refs, const PredictionTensor& preds,
                      const LossWeights& weights = {},
                      std::span<const double> thresholds = kDefaultThresholds);

// log(1 + exp(x)) without overflow.
double softplus(double x);

}  // namespace gridseld

#endif  // GRIDSELD_LOSS_H_
