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

#ifndef GRIDSELD_METRICS_H_
#define GRIDSELD_METRICS_H_

#include <optional>
#include <span>
#include <vector>

#include "gridseld/decoder.h"
#include "gridseld/labels.h"

namespace gridseld {

struct MetricsConfig {
  double labels_per_second = 10.0;
  double segment_seconds = 1.0;
  double threshold_deg = 20.0;  // location-sensitive gate
  // Restrict evaluation to frames holding >= 2 reference events of one class.
  bool overlap_only = false;

  // Throws ConfigError unless a segment spans at least one frame.
  int frames_per_segment() const;
};

struct MatchedPair {
  int detection = 0;  // index into the detection span
  int reference = 0;  // index into the reference span
  double distance_deg = 0.0;
};

struct FrameClassMatch {
  std::vector<MatchedPair> pairs;
  std::vector<int> unmatched_detections;
  std::vector<int> unmatched_references;
};

// Minimum total angular distance assignment between the detections and
// references of one (frame, class). Indices refer to the input spans.
FrameClassMatch match_per_class(std::span<const Detection> dets,
                                std::span<const ReferenceEvent> refs, int frame,
                                int class_id);

struct DetectionCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  friend bool operator==(const DetectionCounts&, const DetectionCounts&) = default;
};

// TP/FP/FN of a set of matches under the location gate: matched pairs closer
// than threshold_deg are TP; farther pairs count as one FP and one FN.
DetectionCounts location_sensitive_counts(std::span<const FrameClassMatch> matches,
                                          double threshold_deg);

struct SegmentCounts {
  int segment = 0;
  long references = 0;
  DetectionCounts counts;
  long substitutions = 0;
  long deletions = 0;
  long insertions = 0;

  friend bool operator==(const SegmentCounts&, const SegmentCounts&) = default;
};

SegmentCounts segment_error_counts(int segment, long references, const DetectionCounts& c);

struct LocationScores {
  // With no references the rate has no denominator: it is 0 when nothing was
  // detected, otherwise er20_defined is false and er20 holds the raw error
  // count (the insertions) so that downstream averages stay finite.
  double er20 = 0.0;
  bool er20_defined = true;
  double f20 = 1.0;  // 1 when there is nothing to detect and nothing detected
};

// Pools numerators and denominators over segments.
LocationScores location_sensitive_detection(std::span<const SegmentCounts> segments);

struct LocalizationScores {
  std::optional<double> le_cd_deg;  // empty when nothing was matched
  double lr_cd = 1.0;               // 1 when there are no references
  long matched_pairs = 0;
};

LocalizationScores class_sensitive_localization(std::span<const FrameClassMatch> matches,
                                                long reference_count);

// Mean of (er20, 1 - f20, 1 - lr_cd, le_cd / 180); a missing LE counts as 180.
double seld_error(double er20, double f20, std::optional<double> le_cd_deg, double lr_cd);

struct MetricsReport {
  double er20 = 0.0;
  bool er20_defined = true;
  double f20 = 1.0;
  std::optional<double> le_cd_deg;
  double lr_cd = 1.0;
  double seld_error = 0.0;

  DetectionCounts counts;
  long substitutions = 0;
  long deletions = 0;
  long insertions = 0;
  long references = 0;
  long detections = 0;
  long matched_pairs = 0;
  long frames_evaluated = 0;
  std::vector<SegmentCounts> segments;
};

MetricsReport evaluate(std::span<const Detection> dets, std::span<const ReferenceEvent> refs,
                       const MetricsConfig& config = {});

}  // namespace gridseld

#endif  // GRIDSELD_METRICS_H_
