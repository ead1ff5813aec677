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

#include "gridseld/labels.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridseld/errors.h"

namespace gridseld {

ReferenceSet events_to_reference_set(std::span<const EventRow> rows, int num_frames,
                                     int num_classes, const GridSpec& grid) {
  if (num_frames < 0 || num_classes <= 0) {
    throw ConfigError("reference set needs T >= 0 and C > 0");
  }
  ReferenceSet refs;
  refs.num_frames = num_frames;
  refs.num_classes = num_classes;
  refs.grid = grid;
  refs.events.reserve(rows.size());
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const EventRow& row = rows[n];
    const std::size_t line = row.line != 0 ? row.line : n + 1;
    if (row.frame < 0 || row.frame >= num_frames) {
      throw ParseError(line, "frame " + std::to_string(row.frame) + " outside [0, " +
                                 std::to_string(num_frames) + ")");
    }
    if (row.class_id < 0 || row.class_id >= num_classes) {
      throw ParseError(line, "class " + std::to_string(row.class_id) +
                                 " outside [0, " + std::to_string(num_classes) + ")");
    }
    try {
      refs.events.push_back({row.frame, row.class_id,
                             Direction::from_degrees(row.azimuth, row.elevation)});
    } catch (const ValueError& e) {
      throw ParseError(line, e.what());
    }
  }
  std::stable_sort(refs.events.begin(), refs.events.end(),
                   [](const ReferenceEvent& a, const ReferenceEvent& b) {
                     if (a.frame != b.frame) return a.frame < b.frame;
                     return a.class_id < b.class_id;
                   });
  return refs;
}

PredictionTensor::PredictionTensor(const TensorShape& shape) : shape_(shape) {
  if (shape.frames < 0 || shape.cells <= 0 || shape.slots <= 0 || shape.classes <= 0) {
    throw ConfigError("prediction tensor extents must be positive");
  }
  raw_.assign(shape.size(), 0.0);
}

PredictionTensor::PredictionTensor(const TensorShape& shape, std::vector<double> raw)
    : PredictionTensor(shape) {
  if (raw.size() != shape.size()) {
    throw ConfigError("prediction tensor holds " + std::to_string(raw.size()) +
                      " values, shape requires " + std::to_string(shape.size()));
  }
  for (double x : raw) {
    if (!std::isfinite(x)) throw ValueError("prediction tensor contains a non-finite value");
  }
  raw_ = std::move(raw);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

double reach_scale(double cell_size, double overlap) {
  return cell_size * (1.0 + 2.0 * overlap);
}

}  // namespace

Direction decode_doa(double u, double v, const GridIndex& cell, const GridSpec& spec) {
  const CellBounds b = cell_bounds(cell, spec);
  const double az = b.azimuth_center() +
                    (sigmoid(u) - 0.5) * reach_scale(spec.cell_width(), spec.overlap_fraction());
  const double el = b.elevation_center() +
                    (sigmoid(v) - 0.5) * reach_scale(spec.cell_height(), spec.overlap_fraction());
  return Direction::from_degrees(az, std::clamp(el, -90.0, 90.0));
}

AngleGradient decode_doa_jacobian(double u, double v, const GridIndex& cell,
                                  const GridSpec& spec) {
  const CellBounds b = cell_bounds(cell, spec);
  const double su = sigmoid(u);
  const double sv = sigmoid(v);
  const double el_scale = reach_scale(spec.cell_height(), spec.overlap_fraction());
  const double el = b.elevation_center() + (sv - 0.5) * el_scale;
  AngleGradient j;
  j.d_azimuth = su * (1.0 - su) * reach_scale(spec.cell_width(), spec.overlap_fraction());
  j.d_elevation = (el > -90.0 && el < 90.0) ? sv * (1.0 - sv) * el_scale : 0.0;
  return j;
}

std::size_t ThresholdMasks::responsible_count() const {
  return static_cast<std::size_t>(std::count(existence.begin(), existence.end(), 1));
}

std::size_t ThresholdMasks::pair_count() const {
  std::size_t n = 0;
  for (const auto& slots : per_reference) n += slots.size();
  return n;
}

const ThresholdMasks& ResponsibilityMasks::at(double tau_deg) const {
  for (const ThresholdMasks& level : levels) {
    if (level.tau_deg == tau_deg) return level;
  }
  throw ConfigError("no responsibility masks for threshold " + std::to_string(tau_deg));
}

ResponsibilityMasks assign_responsibility(const ReferenceSet& refs,
                                          const PredictionTensor& preds,
                                          std::span<const double> thresholds_deg) {
  const TensorShape& shape = preds.shape();
  if (thresholds_deg.empty()) throw ConfigError("threshold set must not be empty");
  for (double tau : thresholds_deg) {
    if (!(tau > 0.0)) throw ConfigError("thresholds must be positive");
  }
  if (refs.num_frames != shape.frames || refs.num_classes != shape.classes ||
      refs.grid.cell_count() != shape.cells) {
    throw ConfigError("reference set (T=" + std::to_string(refs.num_frames) +
                      ", C=" + std::to_string(refs.num_classes) +
                      ", G=" + std::to_string(refs.grid.cell_count()) +
                      ") does not match prediction tensor (T=" +
                      std::to_string(shape.frames) + ", C=" + std::to_string(shape.classes) +
                      ", G=" + std::to_string(shape.cells) + ")");
  }

  ResponsibilityMasks masks;
  masks.shape = shape;
  masks.levels.resize(thresholds_deg.size());
  for (std::size_t l = 0; l < thresholds_deg.size(); ++l) {
    ThresholdMasks& level = masks.levels[l];
    level.tau_deg = thresholds_deg[l];
    level.existence.assign(shape.slot_count(), 0);
    level.classes.assign(shape.slot_count() * shape.classes, 0);
    level.per_reference.resize(refs.events.size());
  }

  for (std::size_t m = 0; m < refs.events.size(); ++m) {
    const ReferenceEvent& ref = refs.events[m];
    for (const GridIndex& cell : extended_cells_of(ref.doa, refs.grid)) {
      for (int k = 0; k < shape.slots; ++k) {
        const std::size_t slot = preds.slot(ref.frame, cell.flat, k);
        const std::size_t doa = preds.doa_index(slot);
        const Direction predicted = decode_doa(preds[doa], preds[doa + 1], cell, refs.grid);
        const double delta = angular_distance(predicted, ref.doa);
        for (ThresholdMasks& level : masks.levels) {
          if (!(delta < level.tau_deg)) continue;
          level.existence[slot] = 1;
          level.classes[slot * shape.classes + ref.class_id] = 1;
          level.per_reference[m].push_back({slot, delta});
        }
      }
    }
  }
  return masks;
}

}  // namespace gridseld
