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

#ifndef GRIDSELD_TOY_HEAD_H_
#define GRIDSELD_TOY_HEAD_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gridseld/labels.h"

namespace gridseld {

// Two dense layers with a tanh in between, mapping a per-frame feature
// vector to G*K*(C+3) prediction values:
//   hidden = tanh(W1 x + b1),  out = W2 hidden + b2.
// Parameters live in one flat vector ordered W1 (row-major), b1, W2, b2.
class ToyHead {
 public:
  ToyHead() = default;
  // Throws ConfigError on non-positive sizes. Weights are drawn from a seeded
  // Gaussian; the output layer starts small so predictions begin near cell
  // centers with uninformative logits.
  ToyHead(int input_dim, int hidden_dim, const TensorShape& per_frame_shape,
          std::uint64_t seed);

  int input_dim() const { return input_dim_; }
  int hidden_dim() const { return hidden_dim_; }
  int output_dim() const { return output_dim_; }
  // Shape of the tensor produced for one frame (frames == 1).
  const TensorShape& frame_shape() const { return frame_shape_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  // features: T x input_dim. Result has T frames.
  PredictionTensor forward(const Eigen::MatrixXd& features) const;

  // Gradient of a scalar loss with respect to the parameters, given the
  // loss gradient with respect to forward(features).values().
  std::vector<double> backward(const Eigen::MatrixXd& features,
                               std::span<const double> output_grad) const;

 private:
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  std::size_t w1_offset() const { return 0; }
  std::size_t b1_offset() const { return static_cast<std::size_t>(hidden_dim_) * input_dim_; }
  std::size_t w2_offset() const { return b1_offset() + hidden_dim_; }
  std::size_t b2_offset() const {
    return w2_offset() + static_cast<std::size_t>(output_dim_) * hidden_dim_;
  }

  Eigen::MatrixXd hidden(const Eigen::MatrixXd& features) const;

  int input_dim_ = 0;
  int hidden_dim_ = 0;
  int output_dim_ = 0;
  TensorShape frame_shape_;
  std::vector<double> params_;
};

}  // namespace gridseld

#endif  // GRIDSELD_TOY_HEAD_H_
