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

#include "gridseld/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "gridseld/assignment.h"
#include "gridseld/errors.h"

namespace gridseld {

int MetricsConfig::frames_per_segment() const {
  const double frames = labels_per_second * segment_seconds;
  if (!(frames >= 1.0) || !std::isfinite(frames)) {
    throw ConfigError("a metrics segment must span at least one label frame");
  }
  return static_cast<int>(std::lround(frames));
}

namespace {

FrameClassMatch match_subset(std::span<const Detection> dets,
                             std::span<const ReferenceEvent> refs,
                             const std::vector<int>& det_ids, const std::vector<int>& ref_ids) {
  FrameClassMatch out;
  const int rows = static_cast<int>(det_ids.size());
  const int cols = static_cast<int>(ref_ids.size());
  std::vector<double> cost(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      cost[static_cast<std::size_t>(r) * cols + c] =
          angular_distance(dets[det_ids[r]].doa, refs[ref_ids[c]].doa);
    }
  }
  std::vector<char> det_used(rows, 0), ref_used(cols, 0);
  for (const auto& [r, c] : solve_assignment(cost, rows, cols)) {
    out.pairs.push_back({det_ids[r], ref_ids[c], cost[static_cast<std::size_t>(r) * cols + c]});
    det_used[r] = 1;
    ref_used[c] = 1;
  }
  for (int r = 0; r < rows; ++r) {
    if (!det_used[r]) out.unmatched_detections.push_back(det_ids[r]);
  }
  for (int c = 0; c < cols; ++c) {
    if (!ref_used[c]) out.unmatched_references.push_back(ref_ids[c]);
  }
  return out;
}

}  // namespace

FrameClassMatch match_per_class(std::span<const Detection> dets,
                                std::span<const ReferenceEvent> refs, int frame,
                                int class_id) {
  std::vector<int> det_ids, ref_ids;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].frame == frame && dets[i].class_id == class_id) {
      det_ids.push_back(static_cast<int>(i));
    }
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i].frame == frame && refs[i].class_id == class_id) {
      ref_ids.push_back(static_cast<int>(i));
    }
  }
  return match_subset(dets, refs, det_ids, ref_ids);
}

DetectionCounts location_sensitive_counts(std::span<const FrameClassMatch> matches,
                                          double threshold_deg) {
  DetectionCounts c;
  for (const FrameClassMatch& m : matches) {
    for (const MatchedPair& p : m.pairs) {
      if (p.distance_deg < threshold_deg) {
        ++c.tp;
      } else {
        ++c.fp;
        ++c.fn;
      }
    }
    c.fp += static_cast<long>(m.unmatched_detections.size());
    c.fn += static_cast<long>(m.unmatched_references.size());
  }
  return c;
}

SegmentCounts segment_error_counts(int segment, long references, const DetectionCounts& c) {
  SegmentCounts s;
  s.segment = segment;
  s.references = references;
  s.counts = c;
  s.substitutions = std::min(c.fn, c.fp);
  s.deletions = std::max(0L, c.fn - c.fp);
  s.insertions = std::max(0L, c.fp - c.fn);
  return s;
}

LocationScores location_sensitive_detection(std::span<const SegmentCounts> segments) {
  long errors = 0, references = 0, tp = 0, fp = 0, fn = 0;
  for (const SegmentCounts& s : segments) {
    errors += s.substitutions + s.deletions + s.insertions;
    references += s.references;
    tp += s.counts.tp;
    fp += s.counts.fp;
    fn += s.counts.fn;
  }
  LocationScores out;
  if (references > 0) {
    out.er20 = static_cast<double>(errors) / static_cast<double>(references);
  } else {
    out.er20 = static_cast<double>(errors);
    out.er20_defined = errors == 0;
  }
  const long f_denominator = 2 * tp + fp + fn;
  out.f20 = f_denominator > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(f_denominator)
                              : 1.0;
  return out;
}

LocalizationScores class_sensitive_localization(std::span<const FrameClassMatch> matches,
                                                long reference_count) {
  LocalizationScores out;
  double sum = 0.0;
  for (const FrameClassMatch& m : matches) {
    for (const MatchedPair& p : m.pairs) {
      sum += p.distance_deg;
      ++out.matched_pairs;
    }
  }
  if (out.matched_pairs > 0) out.le_cd_deg = sum / static_cast<double>(out.matched_pairs);
  if (reference_count > 0) {
    out.lr_cd = static_cast<double>(out.matched_pairs) / static_cast<double>(reference_count);
  }
  return out;
}

double seld_error(double er20, double f20, std::optional<double> le_cd_deg, double lr_cd) {
  const double le = le_cd_deg.value_or(180.0);
  return (er20 + (1.0 - f20) + (1.0 - lr_cd) + le / 180.0) / 4.0;
}

MetricsReport evaluate(std::span<const Detection> dets, std::span<const ReferenceEvent> refs,
                       const MetricsConfig& config) {
  const int frames_per_segment = config.frames_per_segment();

  std::set<int> overlap_frames;
  if (config.overlap_only) {
    std::map<std::pair<int, int>, int> per_class;
    for (const ReferenceEvent& r : refs) {
      if (++per_class[{r.frame, r.class_id}] >= 2) overlap_frames.insert(r.frame);
    }
  }
  auto keep = [&](int frame) { return !config.overlap_only || overlap_frames.count(frame) > 0; };

  // (frame, class) -> detection / reference indices
  std::map<std::pair<int, int>, std::pair<std::vector<int>, std::vector<int>>> groups;
  std::set<int> frames;
  MetricsReport report;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (!keep(dets[i].frame)) continue;
    groups[{dets[i].frame, dets[i].class_id}].first.push_back(static_cast<int>(i));
    frames.insert(dets[i].frame);
    ++report.detections;
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (!keep(refs[i].frame)) continue;
    groups[{refs[i].frame, refs[i].class_id}].second.push_back(static_cast<int>(i));
    frames.insert(refs[i].frame);
    ++report.references;
  }
  report.frames_evaluated = static_cast<long>(frames.size());

  std::vector<FrameClassMatch> matches;
  std::map<int, std::pair<long, DetectionCounts>> per_segment;
  for (const auto& [key, ids] : groups) {
    FrameClassMatch m = match_subset(dets, refs, ids.first, ids.second);
    const DetectionCounts c =
        location_sensitive_counts(std::span<const FrameClassMatch>(&m, 1), config.threshold_deg);
    auto& seg = per_segment[key.first / frames_per_segment];
    seg.first += static_cast<long>(ids.second.size());
    seg.second.tp += c.tp;
    seg.second.fp += c.fp;
    seg.second.fn += c.fn;
    matches.push_back(std::move(m));
  }

  for (const auto& [segment, entry] : per_segment) {
    const SegmentCounts s = segment_error_counts(segment, entry.first, entry.second);
    report.counts.tp += s.counts.tp;
    report.counts.fp += s.counts.fp;
    report.counts.fn += s.counts.fn;
    report.substitutions += s.substitutions;
    report.deletions += s.deletions;
    report.insertions += s.insertions;
    report.segments.push_back(s);
  }

  const LocationScores loc = location_sensitive_detection(report.segments);
  report.er20 = loc.er20;
  report.er20_defined = loc.er20_defined;
  report.f20 = loc.f20;

  const LocalizationScores cls = class_sensitive_localization(matches, report.references);
  report.le_cd_deg = cls.le_cd_deg;
  report.lr_cd = cls.lr_cd;
  report.matched_pairs = cls.matched_pairs;
  report.seld_error = seld_error(report.er20, report.f20, report.le_cd_deg, report.lr_cd);
  return report;
}

}  // namespace gridseld
