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

#ifndef GRIDSELD_TOOLS_GRADCHECK_H_
#define GRIDSELD_TOOLS_GRADCHECK_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridseld/labels.h"
#include "gridseld/loss.h"

namespace gridseld::check {

// Random (references, raw tensor) pair with T <= max_frames and
// C <= max_classes. Raw values are uniform in [-raw_range, raw_range].
struct Instance {
  ReferenceSet refs;
  PredictionTensor preds;
};

struct InstanceOptions {
  int max_frames = 4;
  int max_classes = 5;
  int slots = 3;
  int max_references = 8;
  double raw_range = 2.0;
  GridSpec grid;
};

Instance random_instance(std::uint64_t seed, const InstanceOptions& options = {});

enum class Term { kDoa, kPositive, kNegative, kClass, kTotal };
const char* term_name(Term term);

// Value of one loss term. Per-threshold terms (positive, negative, class)
// are taken at thresholds[level]; kDoa uses the largest threshold and kTotal
// is the weighted total. When `grad` is non-null it receives the analytic
// gradient with respect to the raw tensor.
double evaluate_term(Term term, std::size_t level, const ReferenceSet& refs,
                     const PredictionTensor& preds, const LossWeights& weights,
                     std::span<const double> thresholds, std::vector<double>* grad);

struct GradientReport {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  // Entries where a +-h perturbation changes the responsibility masks, so
  // the loss is not differentiable there.
  std::size_t skipped = 0;
};

// |analytic - numeric| / max(|analytic|, |numeric|, floor).
inline constexpr double kRelativeFloor = 1e-5;

// Central differences with step h on every raw entry the term depends on.
GradientReport check_term(Term term, std::size_t level, const Instance& instance,
                          const LossWeights& weights, std::span<const double> thresholds,
                          double h = 1e-5);

struct SuiteReport {
  int instances = 0;
  // Indexed by Term.
  std::vector<GradientReport> per_term;
  double max_relative_error() const;
};

// Runs every term at every threshold on `instances` seeded instances
// (seeds base_seed, base_seed + 1, ...).
SuiteReport run_gradient_suite(std::uint64_t base_seed, int instances,
                               const LossWeights& weights = {},
                               std::span<const double> thresholds = kDefaultThresholds,
                               const InstanceOptions& options = {});

}  // namespace gridseld::check

#endif  // GRIDSELD_TOOLS_GRADCHECK_H_
