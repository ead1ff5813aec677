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

#include "gridseld/toy_head.h"

#include <cmath>
#include <random>

#include "gridseld/errors.h"

namespace gridseld {

ToyHead::ToyHead(int input_dim, int hidden_dim, const TensorShape& per_frame_shape,
                 std::uint64_t seed)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), frame_shape_(per_frame_shape) {
  frame_shape_.frames = 1;
  if (input_dim <= 0 || hidden_dim <= 0 || frame_shape_.cells <= 0 || frame_shape_.slots <= 0 ||
      frame_shape_.classes <= 0) {
    throw ConfigError("toy head dimensions must be positive");
  }
  output_dim_ = static_cast<int>(frame_shape_.size());
  params_.assign(b2_offset() + output_dim_, 0.0);

  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double w1_scale = 1.0 / std::sqrt(static_cast<double>(input_dim_));
  const double w2_scale = 0.1 / std::sqrt(static_cast<double>(hidden_dim_));
  for (std::size_t i = w1_offset(); i < b1_offset(); ++i) params_[i] = w1_scale * normal(engine);
  for (std::size_t i = w2_offset(); i < b2_offset(); ++i) params_[i] = w2_scale * normal(engine);
}

Eigen::MatrixXd ToyHead::hidden(const Eigen::MatrixXd& features) const {
  Eigen::Map<const RowMatrix> w1(params_.data() + w1_offset(), hidden_dim_, input_dim_);
  Eigen::Map<const Eigen::VectorXd> b1(params_.data() + b1_offset(), hidden_dim_);
  Eigen::MatrixXd pre = features * w1.transpose();
  pre.rowwise() += b1.transpose();
  return pre.array().tanh().matrix();
}

PredictionTensor ToyHead::forward(const Eigen::MatrixXd& features) const {
  if (features.cols() != input_dim_) {
    throw ConfigError("feature width " + std::to_string(features.cols()) +
                      " does not match toy head input " + std::to_string(input_dim_));
  }
  Eigen::Map<const RowMatrix> w2(params_.data() + w2_offset(), output_dim_, hidden_dim_);
  Eigen::Map<const Eigen::VectorXd> b2(params_.data() + b2_offset(), output_dim_);

  TensorShape shape = frame_shape_;
  shape.frames = static_cast<int>(features.rows());
  PredictionTensor out(shape);
  // Row-major T x output_dim matches the tensor's frame-major layout.
  Eigen::Map<RowMatrix> raw(out.values().data(), shape.frames, output_dim_);
  raw.noalias() = hidden(features) * w2.transpose();
  raw.rowwise() += b2.transpose();
  for (double x : out.values()) {
    if (!std::isfinite(x)) throw DivergenceError("toy head produced a non-finite output");
  }
  return out;
}

std::vector<double> ToyHead::backward(const Eigen::MatrixXd& features,
                                      std::span<const double> output_grad) const {
  const Eigen::Index frames = features.rows();
  if (output_grad.size() != static_cast<std::size_t>(frames) * output_dim_) {
    throw ConfigError("output gradient does not match the toy head output");
  }
  Eigen::Map<const RowMatrix> w2(params_.data() + w2_offset(), output_dim_, hidden_dim_);
  Eigen::Map<const RowMatrix> d_out(output_grad.data(), frames, output_dim_);

  const Eigen::MatrixXd h = hidden(features);
  std::vector<double> grad(params_.size(), 0.0);
  Eigen::Map<RowMatrix> g_w1(grad.data() + w1_offset(), hidden_dim_, input_dim_);
  Eigen::Map<Eigen::VectorXd> g_b1(grad.data() + b1_offset(), hidden_dim_);
  Eigen::Map<RowMatrix> g_w2(grad.data() + w2_offset(), output_dim_, hidden_dim_);
  Eigen::Map<Eigen::VectorXd> g_b2(grad.data() + b2_offset(), output_dim_);

  g_w2.noalias() = d_out.transpose() * h;
  g_b2 = d_out.colwise().sum().transpose();
  const Eigen::MatrixXd d_hidden =
      ((d_out * w2).array() * (1.0 - h.array().square())).matrix();
  g_w1.noalias() = d_hidden.transpose() * features;
  g_b1 = d_hidden.colwise().sum().transpose();
  return grad;
}

}  // namespace gridseld
