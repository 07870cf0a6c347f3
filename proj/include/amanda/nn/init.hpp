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
#include <random>

#include "amanda/nn/tensor.hpp"

namespace amanda::nn {

// Uniform in +-1/sqrt(fan_in), drawn in column-major order from `rng`.
template <typename Scalar = double>
BasicTensor<Scalar> uniform_param(Index rows, Index cols, Index fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<Index>(fan_in, 1)));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Mat<Scalar> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Scalar>(dist(rng));
  return BasicTensor<Scalar>(std::move(m), true);
}

template <typename Scalar = double>
BasicTensor<Scalar> zero_param(Index rows, Index cols) {
  return BasicTensor<Scalar>(Mat<Scalar>::Zero(rows, cols), true);
}

}  // namespace amanda::nn
