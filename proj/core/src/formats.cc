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

#include "gridseld/formats.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "gridseld/errors.h"
#include "json.hpp"

namespace gridseld {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

int parse_int(const std::string& s, std::size_t line, const char* what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ParseError(line, std::string("bad ") + what + " '" + s + "'");
  }
}

double parse_real(const std::string& s, std::size_t line, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, std::string("bad ") + what + " '" + s + "'");
  }
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw ParseError(0, std::string("truncated binary file while reading ") + what);
  }
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void put_f32(std::ostream& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

double get_f32(std::istream& in) {
  const float f = std::bit_cast<float>(get_u32(in, "values"));
  if (!std::isfinite(f)) throw ParseError(0, "binary file contains a non-finite value");
  return f;
}

int get_extent(std::istream& in, const char* what) {
  const auto v = static_cast<std::int32_t>(get_u32(in, what));
  if (v < 0) throw ParseError(0, std::string("negative ") + what + " in binary header");
  return v;
}

void expect_end(std::istream& in) {
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ParseError(0, "unexpected trailing data after binary payload");
  }
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ParseError(0, "cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return in;
}

}  // namespace

std::vector<EventCsvRow> read_event_csv(std::istream& in) {
  std::string text;
  std::size_t line = 0;
  bool has_score = false;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    const std::vector<std::string> header = split_fields(text);
    const std::vector<std::string> base = split_fields(kEventCsvHeader);
    const std::vector<std::string> scored = split_fields(kDetectionCsvHeader);
    if (header == scored) {
      has_score = true;
    } else if (header != base) {
      throw ParseError(line, std::string("expected header '") + kEventCsvHeader +
                                 "' (optionally followed by ',score')");
    }
    break;
  }
  if (line == 0) throw ParseError(0, "missing CSV header");

  std::vector<EventCsvRow> rows;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    const std::vector<std::string> f = split_fields(text);
    const std::size_t want = has_score ? 6 : 5;
    if (f.size() != want) {
      throw ParseError(line, "expected " + std::to_string(want) + " fields, got " +
                                 std::to_string(f.size()));
    }
    EventCsvRow row;
    row.line = line;
    row.frame = parse_int(f[0], line, "frame");
    row.class_id = parse_int(f[1], line, "class_id");
    row.source_id = parse_int(f[2], line, "source_id");
    row.azimuth_deg = parse_real(f[3], line, "azimuth_deg");
    row.elevation_deg = parse_real(f[4], line, "elevation_deg");
    if (has_score) row.score = parse_real(f[5], line, "score");
    if (row.frame < 0) throw ParseError(line, "frame must be non-negative");
    if (row.class_id < 0) throw ParseError(line, "class_id must be non-negative");
    if (row.elevation_deg < -90.0 || row.elevation_deg > 90.0) {
      throw ParseError(line, "elevation outside [-90, 90]");
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<EventCsvRow> read_event_csv_file(const std::string& path) {
  std::ifstream in = open_in(path, false);
  try {
    return read_event_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.detail());
  }
}

void write_reference_csv(std::ostream& out, const ReferenceSet& refs,
                         std::span<const int> source_ids) {
  out << kEventCsvHeader << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < refs.events.size(); ++i) {
    const ReferenceEvent& e = refs.events[i];
    const int source = i < source_ids.size() ? source_ids[i] : -1;
    out << e.frame << ',' << e.class_id << ',' << source << ',' << e.doa.azimuth() << ','
        << e.doa.elevation() << '\n';
  }
}

void write_detection_csv(std::ostream& out, std::span<const Detection> dets) {
  out << kDetectionCsvHeader << '\n' << std::setprecision(17);
  for (const Detection& d : dets) {
    out << d.frame << ',' << d.class_id << ",-1," << d.doa.azimuth() << ',' << d.doa.elevation()
        << ',' << d.score << '\n';
  }
}

std::vector<EventRow> to_event_rows(std::span<const EventCsvRow> rows) {
  std::vector<EventRow> out;
  out.reserve(rows.size());
  for (const EventCsvRow& r : rows) {
    out.push_back({r.frame, r.class_id, r.azimuth_deg, r.elevation_deg, r.line});
  }
  return out;
}

std::vector<Detection> to_detections(std::span<const EventCsvRow> rows) {
  std::vector<Detection> out;
  out.reserve(rows.size());
  for (const EventCsvRow& r : rows) {
    try {
      out.push_back({r.frame, r.class_id, Direction::from_degrees(r.azimuth_deg, r.elevation_deg),
                     r.score.value_or(1.0)});
    } catch (const ValueError& e) {
      throw ParseError(r.line, e.what());
    }
  }
  return out;
}

void write_tensor(std::ostream& out, const PredictionTensor& tensor) {
  const TensorShape& s = tensor.shape();
  put_u32(out, kTensorMagic);
  put_u32(out, static_cast<std::uint32_t>(s.frames));
  put_u32(out, static_cast<std::uint32_t>(s.cells));
  put_u32(out, static_cast<std::uint32_t>(s.slots));
  put_u32(out, static_cast<std::uint32_t>(s.channels()));
  for (double v : tensor.values()) put_f32(out, v);
  if (!out) throw ParseError(0, "failed to write prediction tensor");
}

PredictionTensor read_tensor(std::istream& in, const TensorExpectation& expect) {
  if (get_u32(in, "magic") != kTensorMagic) throw ParseError(0, "not a prediction tensor (bad magic)");
  TensorShape s;
  s.frames = get_extent(in, "T");
  s.cells = get_extent(in, "G");
  s.slots = get_extent(in, "K");
  const int channels = get_extent(in, "C+3");
  if (s.cells == 0 || s.slots == 0 || channels < 4) {
    throw ParseError(0, "prediction tensor header needs G > 0, K > 0 and C + 3 >= 4");
  }
  s.classes = channels - 3;
  auto mismatch = [](const char* name, int want, int got) {
    return ParseError(0, std::string("prediction tensor header ") + name + "=" +
                             std::to_string(got) + " does not match expected " +
                             std::to_string(want));
  };
  if (expect.cells && *expect.cells != s.cells) throw mismatch("G", *expect.cells, s.cells);
  if (expect.slots && *expect.slots != s.slots) throw mismatch("K", *expect.slots, s.slots);
  if (expect.classes && *expect.classes != s.classes) {
    throw mismatch("C", *expect.classes, s.classes);
  }
  std::vector<double> raw(s.size());
  for (double& v : raw) v = get_f32(in);
  expect_end(in);
  return PredictionTensor(s, std::move(raw));
}

void write_tensor_file(const std::string& path, const PredictionTensor& tensor) {
  std::ofstream out = open_out(path, true);
  write_tensor(out, tensor);
}

PredictionTensor read_tensor_file(const std::string& path, const TensorExpectation& expect) {
  std::ifstream in = open_in(path, true);
  try {
    return read_tensor(in, expect);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

void write_features(std::ostream& out, const Eigen::MatrixXd& features) {
  put_u32(out, kFeatureMagic);
  put_u32(out, static_cast<std::uint32_t>(features.rows()));
  put_u32(out, static_cast<std::uint32_t>(features.cols()));
  for (Eigen::Index t = 0; t < features.rows(); ++t) {
    for (Eigen::Index f = 0; f < features.cols(); ++f) put_f32(out, features(t, f));
  }
  if (!out) throw ParseError(0, "failed to write features");
}

Eigen::MatrixXd read_features(std::istream& in) {
  if (get_u32(in, "magic") != kFeatureMagic) throw ParseError(0, "not a feature file (bad magic)");
  const int frames = get_extent(in, "T");
  const int width = get_extent(in, "width");
  Eigen::MatrixXd features(frames, width);
  for (int t = 0; t < frames; ++t) {
    for (int f = 0; f < width; ++f) features(t, f) = get_f32(in);
  }
  expect_end(in);
  return features;
}

void write_features_file(const std::string& path, const Eigen::MatrixXd& features) {
  std::ofstream out = open_out(path, true);
  write_features(out, features);
}

Eigen::MatrixXd read_features_file(const std::string& path) {
  std::ifstream in = open_in(path, true);
  try {
    return read_features(in);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

void write_metrics_text(std::ostream& out, const MetricsReport& r) {
  out << std::setprecision(10);
  out << "er20=" << r.er20 << '\n'
      << "f20=" << r.f20 << '\n';
  if (r.le_cd_deg) {
    out << "le_cd_deg=" << *r.le_cd_deg << '\n';
  } else {
    out << "le_cd_deg=undefined\n";
  }
  out << "lr_cd=" << r.lr_cd << '\n'
      << "seld_error=" << r.seld_error << '\n'
      << "er20_defined=" << (r.er20_defined ? "true" : "false") << '\n'
      << "tp=" << r.counts.tp << '\n'
      << "fp=" << r.counts.fp << '\n'
      << "fn=" << r.counts.fn << '\n'
      << "substitutions=" << r.substitutions << '\n'
      << "deletions=" << r.deletions << '\n'
      << "insertions=" << r.insertions << '\n'
      << "references=" << r.references << '\n'
      << "detections=" << r.detections << '\n'
      << "matched_pairs=" << r.matched_pairs << '\n';
}

std::string metrics_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["er20"] = r.er20;
  j["f20"] = r.f20;
  j["le_cd_deg"] = r.le_cd_deg ? nlohmann::ordered_json(*r.le_cd_deg) : nlohmann::ordered_json();
  j["lr_cd"] = r.lr_cd;
  j["seld_error"] = r.seld_error;
  j["er20_defined"] = r.er20_defined;
  j["counts"] = {{"tp", r.counts.tp},
                 {"fp", r.counts.fp},
                 {"fn", r.counts.fn},
                 {"substitutions", r.substitutions},
                 {"deletions", r.deletions},
                 {"insertions", r.insertions},
                 {"references", r.references},
                 {"detections", r.detections},
                 {"matched_pairs", r.matched_pairs}};
  nlohmann::ordered_json segments = nlohmann::ordered_json::array();
  for (const SegmentCounts& s : r.segments) {
    segments.push_back({{"segment", s.segment},
                        {"references", s.references},
                        {"tp", s.counts.tp},
                        {"fp", s.counts.fp},
                        {"fn", s.counts.fn},
                        {"substitutions", s.substitutions},
                        {"deletions", s.deletions},
                        {"insertions", s.insertions}});
  }
  j["segments"] = std::move(segments);
  return j.dump(2);
}

void write_loss_breakdown(std::ostream& out, const LossBreakdown& b) {
  out << std::setprecision(10);
  out << "l_delta=" << b.l_delta << '\n';
  for (std::size_t l = 0; l < b.thresholds.size(); ++l) {
    out << "tau=" << b.thresholds[l] << " l_pos=" << b.l_pos[l] << " l_neg=" << b.l_neg[l]
        << " l_class=" << b.l_class[l] << '\n';
  }
  out << "total=" << b.total << '\n';
}

void write_loss_curve_csv(std::ostream& out, std::span<const LossBreakdown> curve) {
  out << "epoch,l_delta,l_pos,l_neg,l_class,total\n" << std::setprecision(12);
  for (std::size_t e = 0; e < curve.size(); ++e) {
    const LossBreakdown& b = curve[e];
    double pos = 0.0, neg = 0.0, cls = 0.0;
    for (std::size_t l = 0; l < b.thresholds.size(); ++l) {
      pos += b.l_pos[l];
      neg += b.l_neg[l];
      cls += b.l_class[l];
    }
    const double n = b.thresholds.empty() ? 1.0 : static_cast<double>(b.thresholds.size());
    out << e << ',' << b.l_delta << ',' << pos / n << ',' << neg / n << ',' << cls / n << ','
        << b.total << '\n';
  }
}

}  // namespace gridseld
