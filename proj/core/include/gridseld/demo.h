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

#ifndef GRIDSELD_DEMO_H_
#define GRIDSELD_DEMO_H_

#include <vector>

#include "gridseld/decoder.h"
#include "gridseld/metrics.h"
#include "gridseld/simulator.h"
#include "gridseld/trainer.h"

namespace gridseld {

struct DemoOptions {
  SceneSpec scene;
  int slots = 3;
  int hidden_dim = 64;
  TrainOptions training;
  double upsilon_deg = 15.0;
  double score_threshold = 0.5;
  MetricsConfig metrics;
};

struct DemoResult {
  Scene scene;
  TrainResult training;
  PredictionTensor predictions;
  std::vector<Detection> detections;
  MetricsReport report;
};

// simulate -> train the toy head on that scene -> decode -> evaluate against
// the same scene's references.
DemoResult run_demo(const DemoOptions& options);

}  // namespace gridseld

#endif  // GRIDSELD_DEMO_H_
