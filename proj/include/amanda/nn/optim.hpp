// Copyright 2026 The Amanda Authors. All Rights Reserved.
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

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "amanda/nn/tensor.hpp"

namespace amanda::nn {

// Constant learning rate up to `decay_start_step`, then exponential decay
// that halves every `half_life_steps` steps.
struct LrSchedule {
  double initial_lr = 1e-3;
  long decay_start_step = 5000;
  double decay_rate = 0.5;
  long half_life_steps = 25000;

  double at(long step) const {
    if (step <= decay_start_step) return initial_lr;
    double exponent = static_cast<double>(step - decay_start_step) / static_cast<double>(half_life_steps);
    return initial_lr * std::pow(decay_rate, exponent);
  }
};

template <typename Scalar>
struct BasicAdamState {
  long step = 0;
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar epsilon = Scalar(1e-8);
  std::vector<Mat<Scalar>> m;
  std::vector<Mat<Scalar>> v;
};

using AdamState = BasicAdamState<double>;

// One Adam update of every parameter from its accumulated grad, using the
// schedule's rate for the incremented step. Parameters without a grad are
// treated as having a zero gradient.
template <typename Scalar>
void adam_step(std::span<BasicTensor<Scalar>> params, BasicAdamState<Scalar>& state, const LrSchedule& schedule) {
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.push_back(Mat<Scalar>::Zero(p.rows(), p.cols()));
      state.v.push_back(Mat<Scalar>::Zero(p.rows(), p.cols()));
    }
  }
  if (state.m.size() != params.size())
    throw DimensionError("adam_step: optimizer state tracks " + std::to_string(state.m.size()) +
                         " tensors but got " + std::to_string(params.size()));
  ++state.step;
  const Scalar lr = static_cast<Scalar>(schedule.at(state.step));
  const Scalar bc1 = Scalar(1) - std::pow(state.beta1, static_cast<Scalar>(state.step));
  const Scalar bc2 = Scalar(1) - std::pow(state.beta2, static_cast<Scalar>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    if (state.m[i].rows() != p.rows() || state.m[i].cols() != p.cols())
      throw DimensionError("adam_step: moment shape mismatch for parameter " + std::to_string(i));
    if (!p.has_grad()) continue;
    const auto& g = p.grad();
    state.m[i] = state.beta1 * state.m[i] + (Scalar(1) - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (Scalar(1) - state.beta2) * g.cwiseProduct(g);
    auto m_hat = state.m[i].array() / bc1;
    auto v_hat = state.v[i].array() / bc2;
    p.mutable_value().array() -= lr * m_hat / (v_hat.sqrt() + state.epsilon);
  }
}

template <typename Scalar>
void zero_grads(std::span<BasicTensor<Scalar>> params) {
  for (auto& p : params) p.zero_grad();
}

}  // namespace amanda::nn
