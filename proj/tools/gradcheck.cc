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

#include "gradcheck.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace gridseld::check {

Instance random_instance(std::uint64_t seed, const InstanceOptions& options) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto integer = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  const int frames = integer(1, options.max_frames);
  const int classes = integer(1, options.max_classes);
  const int count = integer(0, options.max_references);
  std::vector<EventRow> rows;
  for (int m = 0; m < count; ++m) {
    const double z = uniform(-1.0, 1.0);
    rows.push_back({integer(0, frames - 1), integer(0, classes - 1), uniform(-180.0, 180.0),
                    std::asin(z) * kRadToDeg});
  }

  Instance out;
  out.refs = events_to_reference_set(rows, frames, classes, options.grid);
  TensorShape shape{frames, options.grid.cell_count(), options.slots, classes};
  std::vector<double> raw(shape.size());
  for (double& v : raw) v = uniform(-options.raw_range, options.raw_range);
  out.preds = PredictionTensor(shape, std::move(raw));
  return out;
}

const char* term_name(Term term) {
  switch (term) {
    case Term::kDoa: return "l_delta";
    case Term::kPositive: return "l_pos";
    case Term::kNegative: return "l_neg";
    case Term::kClass: return "l_class";
    case Term::kTotal: return "total";
  }
  return "?";
}

double evaluate_term(Term term, std::size_t level, const ReferenceSet& refs,
                     const PredictionTensor& preds, const LossWeights& weights,
                     std::span<const double> thresholds, std::vector<double>* grad) {
  if (term == Term::kTotal) {
    LossResult r = total_loss(refs, preds, weights, thresholds);
    if (grad) *grad = std::move(r.gradient);
    return r.breakdown.total;
  }
  const ResponsibilityMasks masks = assign_responsibility(refs, preds, thresholds);
  std::span<double> g;
  if (grad) {
    grad->assign(preds.values().size(), 0.0);
    g = *grad;
  }
  switch (term) {
    case Term::kDoa: {
      const double tau_max = *std::max_element(thresholds.begin(), thresholds.end());
      return doa_loss(refs, preds, masks.at(tau_max), g);
    }
    case Term::kPositive:
      return existence_losses(preds, masks.levels[level], g, 1.0, 0.0).positive;
    case Term::kNegative:
      return existence_losses(preds, masks.levels[level], g, 0.0, 1.0).negative;
    case Term::kClass:
      return class_loss(preds, masks.levels[level], g);
    case Term::kTotal:
      break;
  }
  return 0.0;
}

namespace {

bool same_masks(const ResponsibilityMasks& a, const ResponsibilityMasks& b) {
  for (std::size_t l = 0; l < a.levels.size(); ++l) {
    if (a.levels[l].existence != b.levels[l].existence ||
        a.levels[l].classes != b.levels[l].classes ||
        a.levels[l].pair_count() != b.levels[l].pair_count()) {
      return false;
    }
  }
  return true;
}

bool depends_on(Term term, const TensorShape& shape, std::size_t index) {
  const int channel = static_cast<int>(index % shape.channels());
  switch (term) {
    case Term::kDoa: return channel > shape.classes;
    case Term::kPositive:
    case Term::kNegative: return channel == shape.classes;
    case Term::kClass: return channel < shape.classes;
    case Term::kTotal: return true;
  }
  return true;
}

}  // namespace

GradientReport check_term(Term term, std::size_t level, const Instance& instance,
                          const LossWeights& weights, std::span<const double> thresholds,
                          double h) {
  GradientReport report;
  std::vector<double> analytic;
  evaluate_term(term, level, instance.refs, instance.preds, weights, thresholds, &analytic);
  const ResponsibilityMasks base = assign_responsibility(instance.refs, instance.preds, thresholds);

  PredictionTensor probe = instance.preds;
  for (std::size_t i = 0; i < probe.values().size(); ++i) {
    if (!depends_on(term, probe.shape(), i)) continue;
    const double x = probe[i];
    probe[i] = x + h;
    const double up = evaluate_term(term, level, instance.refs, probe, weights, thresholds, nullptr);
    const bool up_stable = same_masks(base, assign_responsibility(instance.refs, probe, thresholds));
    probe[i] = x - h;
    const double down =
        evaluate_term(term, level, instance.refs, probe, weights, thresholds, nullptr);
    const bool down_stable =
        same_masks(base, assign_responsibility(instance.refs, probe, thresholds));
    probe[i] = x;
    if (!up_stable || !down_stable) {
      ++report.skipped;
      continue;
    }
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), kRelativeFloor});
    report.max_relative_error =
        std::max(report.max_relative_error, std::abs(analytic[i] - numeric) / scale);
    ++report.checked;
  }
  return report;
}

double SuiteReport::max_relative_error() const {
  double worst = 0.0;
  for (const GradientReport& r : per_term) worst = std::max(worst, r.max_relative_error);
  return worst;
}

SuiteReport run_gradient_suite(std::uint64_t base_seed, int instances, const LossWeights& weights,
                               std::span<const double> thresholds,
                               const InstanceOptions& options) {
  SuiteReport suite;
  suite.instances = instances;
  suite.per_term.resize(5);
  for (int n = 0; n < instances; ++n) {
    const Instance instance = random_instance(base_seed + static_cast<std::uint64_t>(n), options);
    for (int t = 0; t < 5; ++t) {
      const Term term = static_cast<Term>(t);
      const bool layered = term == Term::kPositive || term == Term::kNegative || term == Term::kClass;
      const std::size_t levels = layered ? thresholds.size() : 1;
      for (std::size_t level = 0; level < levels; ++level) {
        const GradientReport r = check_term(term, level, instance, weights, thresholds);
        GradientReport& acc = suite.per_term[t];
        acc.max_relative_error = std::max(acc.max_relative_error, r.max_relative_error);
        acc.checked += r.checked;
        acc.skipped += r.skipped;
      }
    }
  }
  return suite;
}

}  // namespace gridseld::check
