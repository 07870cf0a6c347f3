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

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "amanda/nn/tensor.hpp"

namespace amanda::nn {

struct GradCheckOptions {
  double h = 1e-4;
  double tol = 1e-4;
  // Denominator floor for the relative error, so coordinates whose true
  // gradient is ~0 are judged on absolute error.
  double abs_floor = 1e-6;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool pass = false;
  std::size_t worst_tensor = 0;
  Index worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
};

// Compares `analytic` grads against central differences of `f` at the current
// values of `at`. `f` must rebuild its graph from `at` on every call.
inline GradCheckReport compare_gradients(const std::function<Tensor()>& f, std::span<Tensor> at,
                                         std::span<const Mat<double>> analytic, const GradCheckOptions& opts) {
  if (analytic.size() != at.size()) throw DimensionError("grad_check: analytic gradient count mismatch");
  const double f0 = f().item();
  const double f1 = f().item();
  if (f0 != f1) throw Error("grad_check: function is not deterministic (two forward passes disagree)");

  GradCheckReport report;
  for (std::size_t t = 0; t < at.size(); ++t) {
    auto& values = at[t].mutable_value();
    if (analytic[t].rows() != values.rows() || analytic[t].cols() != values.cols())
      throw DimensionError("grad_check: analytic gradient shape mismatch for tensor " + std::to_string(t));
    for (Index i = 0; i < values.size(); ++i) {
      const double saved = values.data()[i];
      values.data()[i] = saved + opts.h;
      const double up = f().item();
      values.data()[i] = saved - opts.h;
      const double down = f().item();
      values.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * opts.h);
      const double a = analytic[t].data()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), opts.abs_floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.coordinates;
      if (rel > report.max_rel_err || !std::isfinite(rel)) {
        report.max_rel_err = std::isfinite(rel) ? rel : INFINITY;
        report.worst_tensor = t;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  report.pass = report.max_rel_err < opts.tol;
  return report;
}

// Runs backward through `f` once for the analytic gradient, then checks it
// coordinate by coordinate.
inline GradCheckReport grad_check(const std::function<Tensor()>& f, std::span<Tensor> at,
                                  const GradCheckOptions& opts = {}) {
  for (auto& t : at) {
    t.set_requires_grad(true);
    t.mutable_grad() = Mat<double>::Zero(t.rows(), t.cols());
  }
  backward(f());
  std::vector<Mat<double>> analytic;
  analytic.reserve(at.size());
  for (auto& t : at) analytic.push_back(t.grad());
  return compare_gradients(f, at, analytic, opts);
}

inline GradCheckReport grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor at,
                                  const GradCheckOptions& opts = {}) {
  std::vector<Tensor> leaves{at};
  return grad_check([&] { return f(leaves[0]); }, std::span<Tensor>(leaves), opts);
}

}  // namespace amanda::nn
