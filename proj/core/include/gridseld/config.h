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

#ifndef GRIDSELD_CONFIG_H_
#define GRIDSELD_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridseld/geometry.h"
#include "gridseld/loss.h"

namespace gridseld {

struct Config {
  GridSpec grid;  // 45 x 45 degree cells, 50% overlap
  int slots = 3;  // K predictions per cell
  int num_classes = 5;
  std::vector<double> thresholds = kDefaultThresholds;
  LossWeights weights;
  double upsilon_deg = 15.0;
  double score_threshold = 0.5;
  double labels_per_second = 10.0;
  std::uint64_t seed = 0;

  // Throws ConfigError on inconsistent values.
  void validate() const;
};

// Flat `key = value` text; blank lines and `#` comments are ignored. Keys:
// cell_width, cell_height, overlap, slots, num_classes, thresholds (comma
// separated degrees), w_delta, w_pos, w_neg, w_class, upsilon,
// score_threshold, labels_per_second, seed. Keys not present keep the
// values already in `base`. Throws ParseError naming the line.
Config parse_config(std::istream& in, Config base = {});
Config load_config(const std::string& path, Config base = {});

void write_config(std::ostream& out, const Config& config);

}  // namespace gridseld

#endif  // GRIDSELD_CONFIG_H_
