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

#include "gridseld/demo.h"

namespace gridseld {

DemoResult run_demo(const DemoOptions& options) {
  DemoResult out;
  out.scene = simulate(options.scene);

  TensorShape frame_shape;
  frame_shape.frames = 1;
  frame_shape.cells = options.scene.grid.cell_count();
  frame_shape.slots = options.slots;
  frame_shape.classes = options.scene.num_classes;
  ToyHead head(feature_dimension(options.scene.num_classes), options.hidden_dim, frame_shape,
               options.scene.seed + 1);

  out.training = train_toy(std::span<const Scene>(&out.scene, 1), std::move(head), options.training);
  out.predictions = out.training.head.forward(out.scene.features);
  out.detections = decode(out.predictions, options.scene.grid, options.upsilon_deg,
                          options.score_threshold);
  out.report = evaluate(out.detections, out.scene.refs.events, options.metrics);
  return out;
}

}  // namespace gridseld
