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

#ifndef GRIDSELD_LABELS_H_
#define GRIDSELD_LABELS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "gridseld/geometry.h"

namespace gridseld {

struct ReferenceEvent {
  int frame = 0;
  int class_id = 0;
  Direction doa;

  friend bool operator==(const ReferenceEvent&, const ReferenceEvent&) = default;
};

// All reference events of a scene, sorted by (frame, class_id). Several
// same-class events may share a frame. Grid cells are derived on demand.
struct ReferenceSet {
  std::vector<ReferenceEvent> events;
  int num_frames = 0;
  int num_classes = 0;
  GridSpec grid;

  friend bool operator==(const ReferenceSet&, const ReferenceSet&) = default;
};

struct EventRow {
  int frame = 0;
  int class_id = 0;
  double azimuth = 0.0;
  double elevation = 0.0;
  std::size_t line = 0;  // source line for diagnostics; 0 means row position
};

// Validates rows and sorts them (stable, so duplicates keep their order).
// Throws ParseError on the first bad row, carrying its `line` or, when that
// is 0, its 1-based position.
ReferenceSet events_to_reference_set(std::span<const EventRow> rows, int num_frames,
                                     int num_classes, const GridSpec& grid);

// Extent of a T x G x K x (C+3) prediction tensor.
struct TensorShape {
  int frames = 0;
  int cells = 0;
  int slots = 0;  // K predictions per cell
  int classes = 0;

  int channels() const { return classes + 3; }
  std::size_t slot_count() const {
    return static_cast<std::size_t>(frames) * cells * slots;
  }
  std::size_t size() const { return slot_count() * channels(); }

  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

// Raw network output. Each prediction stores C class logits, one existence
// logit, then the two DOA parameters (u for azimuth, v for elevation).
class PredictionTensor {
 public:
  PredictionTensor() = default;
  // Throws ConfigError for non-positive extents.
  explicit PredictionTensor(const TensorShape& shape);
  // Throws ConfigError if raw.size() does not match, ValueError if any value
  // is not finite.
  PredictionTensor(const TensorShape& shape, std::vector<double> raw);

  const TensorShape& shape() const { return shape_; }

  // Flat slot id of (t, g, k).
  std::size_t slot(int t, int g, int k) const {
    return (static_cast<std::size_t>(t) * shape_.cells + g) * shape_.slots + k;
  }
  std::size_t offset(std::size_t slot_id) const { return slot_id * shape_.channels(); }

  std::size_t class_index(std::size_t slot_id, int c) const { return offset(slot_id) + c; }
  std::size_t existence_index(std::size_t slot_id) const {
    return offset(slot_id) + shape_.classes;
  }
  std::size_t doa_index(std::size_t slot_id) const {
    return offset(slot_id) + shape_.classes + 1;
  }

  int frame_of(std::size_t slot_id) const {
    return static_cast<int>(slot_id / (static_cast<std::size_t>(shape_.cells) * shape_.slots));
  }
  int cell_of_slot(std::size_t slot_id) const {
    return static_cast<int>((slot_id / shape_.slots) % shape_.cells);
  }

  std::span<double> values() { return raw_; }
  std::span<const double> values() const { return raw_; }
  double& operator[](std::size_t i) { return raw_[i]; }
  double operator[](std::size_t i) const { return raw_[i]; }

 private:
  TensorShape shape_;
  std::vector<double> raw_;
};

double sigmoid(double x);

// Maps raw DOA parameters of a prediction anchored at `cell` to a direction:
// azimuth = center + (sigmoid(u) - 0.5) * width * (1 + 2 * overlap), wrapped;
// elevation likewise with the cell height, then clamped to [-90, 90].
Direction decode_doa(double u, double v, const GridIndex& cell, const GridSpec& spec);

// d azimuth / du and d elevation / dv of decode_doa. The elevation term is
// zero where the clamp is active.
AngleGradient decode_doa_jacobian(double u, double v, const GridIndex& cell,
                                  const GridSpec& spec);

struct ResponsibleSlot {
  std::size_t slot = 0;
  double distance_deg = 0.0;

  friend bool operator==(const ResponsibleSlot&, const ResponsibleSlot&) = default;
};

// Responsibility at one threshold tau.
struct ThresholdMasks {
  double tau_deg = 0.0;
  std::vector<unsigned char> existence;  // T*G*K, slot-major
  std::vector<unsigned char> classes;    // T*G*K*C
  // For reference m: every responsible slot with its angular distance.
  std::vector<std::vector<ResponsibleSlot>> per_reference;

  std::size_t responsible_count() const;
  std::size_t pair_count() const;
};

struct ResponsibilityMasks {
  TensorShape shape;
  std::vector<ThresholdMasks> levels;  // same order as the thresholds given

  // Throws ConfigError when tau was not among the thresholds.
  const ThresholdMasks& at(double tau_deg) const;
};

// Marks slot (t_m, g, k) responsible for reference m at threshold tau when g
// is an extended cell of the reference and the decoded prediction lies
// strictly closer than tau. Throws ConfigError on shape mismatch or an empty
// or non-positive threshold set.
ResponsibilityMasks assign_responsibility(const ReferenceSet& refs,
                                          const PredictionTensor& preds,
                                          std::span<const double> thresholds_deg);

}  // namespace gridseld

#endif  // GRIDSELD_LABELS_H_
