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

#include "gridseld/config.h"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gridseld/errors.h"

namespace gridseld {

void Config::validate() const {
  if (slots <= 0) throw ConfigError("slots (K) must be positive");
  if (num_classes <= 0) throw ConfigError("num_classes must be positive");
  if (thresholds.empty()) throw ConfigError("thresholds must not be empty");
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 180.0)) throw ConfigError("thresholds must lie in (0, 180]");
  }
  if (weights.w_delta < 0 || weights.w_pos < 0 || weights.w_neg < 0 || weights.w_class < 0) {
    throw ConfigError("loss weights must be non-negative");
  }
  if (!(upsilon_deg >= 0.0 && upsilon_deg <= 180.0)) throw ConfigError("upsilon must lie in [0, 180]");
  if (!(score_threshold >= 0.0 && score_threshold < 1.0)) {
    throw ConfigError("score_threshold must lie in [0, 1)");
  }
  if (!(labels_per_second >= 1.0)) throw ConfigError("labels_per_second must be >= 1");
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + text + "'");
  }
}

long long to_integer(const std::string& text, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, "expected an integer, got '" + text + "'");
  }
  return v;
}

}  // namespace

Config parse_config(std::istream& in, Config base) {
  Config c = std::move(base);
  double cell_width = c.grid.cell_width();
  double cell_height = c.grid.cell_height();
  double overlap = c.grid.overlap_fraction();

  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));

    if (key == "cell_width") {
      cell_width = to_double(value, line);
    } else if (key == "cell_height") {
      cell_height = to_double(value, line);
    } else if (key == "overlap") {
      overlap = to_double(value, line);
    } else if (key == "slots") {
      c.slots = static_cast<int>(to_integer(value, line));
    } else if (key == "num_classes") {
      c.num_classes = static_cast<int>(to_integer(value, line));
    } else if (key == "thresholds") {
      c.thresholds.clear();
      std::stringstream list(value);
      std::string item;
      while (std::getline(list, item, ',')) c.thresholds.push_back(to_double(trim(item), line));
    } else if (key == "w_delta") {
      c.weights.w_delta = to_double(value, line);
    } else if (key == "w_pos") {
      c.weights.w_pos = to_double(value, line);
    } else if (key == "w_neg") {
      c.weights.w_neg = to_double(value, line);
    } else if (key == "w_class") {
      c.weights.w_class = to_double(value, line);
    } else if (key == "upsilon") {
      c.upsilon_deg = to_double(value, line);
    } else if (key == "score_threshold") {
      c.score_threshold = to_double(value, line);
    } else if (key == "labels_per_second") {
      c.labels_per_second = to_double(value, line);
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(to_integer(value, line));
    } else {
      throw ParseError(line, "unknown configuration key '" + key + "'");
    }
  }
  try {
    c.grid = GridSpec(cell_width, cell_height, overlap);
    c.validate();
  } catch (const ConfigError& e) {
    throw ParseError(0, std::string("invalid configuration: ") + e.what());
  }
  return c;
}

Config load_config(const std::string& path, Config base) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open configuration file '" + path + "'");
  return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const Config& c) {
  out << std::setprecision(17);
  out << "cell_width = " << c.grid.cell_width() << '\n'
      << "cell_height = " << c.grid.cell_height() << '\n'
      << "overlap = " << c.grid.overlap_fraction() << '\n'
      << "slots = " << c.slots << '\n'
      << "num_classes = " << c.num_classes << '\n'
      << "thresholds = ";
  for (std::size_t i = 0; i < c.thresholds.size(); ++i) {
    out << (i ? "," : "") << c.thresholds[i];
  }
  out << '\n'
      << "w_delta = " << c.weights.w_delta << '\n'
      << "w_pos = " << c.weights.w_pos << '\n'
      << "w_neg = " << c.weights.w_neg << '\n'
      << "w_class = " << c.weights.w_class << '\n'
      << "upsilon = " << c.upsilon_deg << '\n'
      << "score_threshold = " << c.score_threshold << '\n'
      << "labels_per_second = " << c.labels_per_second << '\n'
      << "seed = " << c.seed << '\n';
}

}  // namespace gridseld
