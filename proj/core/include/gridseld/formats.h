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

#ifndef GRIDSELD_FORMATS_H_
#define GRIDSELD_FORMATS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gridseld/decoder.h"
#include "gridseld/labels.h"
#include "gridseld/loss.h"
#include "gridseld/metrics.h"

namespace gridseld {

// Event CSV: mandatory header, then one row per active event.
//   frame,class_id,source_id,azimuth_deg,elevation_deg
// source_id is -1 when unknown. Detection files use the same columns plus an
// optional trailing `score`.
inline constexpr const char* kEventCsvHeader =
    "frame,class_id,source_id,azimuth_deg,elevation_deg";
inline constexpr const char* kDetectionCsvHeader =
    "frame,class_id,source_id,azimuth_deg,elevation_deg,score";

struct EventCsvRow {
  int frame = 0;
  int class_id = 0;
  int source_id = -1;
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  std::optional<double> score;
  std::size_t line = 0;
};

// Throws ParseError with the offending line number.
std::vector<EventCsvRow> read_event_csv(std::istream& in);
std::vector<EventCsvRow> read_event_csv_file(const std::string& path);

void write_reference_csv(std::ostream& out, const ReferenceSet& refs,
                         std::span<const int> source_ids = {});
void write_detection_csv(std::ostream& out, std::span<const Detection> dets);

std::vector<EventRow> to_event_rows(std::span<const EventCsvRow> rows);
// Detections from CSV rows; a missing score reads as 1.
std::vector<Detection> to_detections(std::span<const EventCsvRow> rows);

// Binary prediction tensor: five little-endian int32 (magic, T, G, K, C+3)
// followed by T*G*K*(C+3) little-endian float32 values.
inline constexpr std::uint32_t kTensorMagic = 0x54534447;   // "GDST"
inline constexpr std::uint32_t kFeatureMagic = 0x46534447;  // "GDSF"

struct TensorExpectation {
  std::optional<int> cells;
  std::optional<int> slots;
  std::optional<int> classes;
};

void write_tensor(std::ostream& out, const PredictionTensor& tensor);
// Throws ParseError on a bad magic, a header that disagrees with `expect`,
// truncated or trailing data, or non-finite values.
PredictionTensor read_tensor(std::istream& in, const TensorExpectation& expect = {});
void write_tensor_file(const std::string& path, const PredictionTensor& tensor);
PredictionTensor read_tensor_file(const std::string& path, const TensorExpectation& expect = {});

// Binary features: three little-endian int32 (magic, T, width) followed by
// T*width little-endian float32 values, frame-major.
void write_features(std::ostream& out, const Eigen::MatrixXd& features);
Eigen::MatrixXd read_features(std::istream& in);
void write_features_file(const std::string& path, const Eigen::MatrixXd& features);
Eigen::MatrixXd read_features_file(const std::string& path);

// Flat key=value block: er20, f20, le_cd_deg, lr_cd, seld_error, then counts.
// An undefined LE is written as `undefined`.
void write_metrics_text(std::ostream& out, const MetricsReport& report);
// JSON document with the same field names; an undefined LE is null.
std::string metrics_json(const MetricsReport& report);

void write_loss_breakdown(std::ostream& out, const LossBreakdown& b);

// epoch,l_delta,l_pos,l_neg,l_class,total; the per-threshold terms are
// averaged over the thresholds.
void write_loss_curve_csv(std::ostream& out, std::span<const LossBreakdown> curve);

}  // namespace gridseld

#endif  // GRIDSELD_FORMATS_H_
