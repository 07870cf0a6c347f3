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

#include "amanda/tts/toy_corpus.hpp"

#include <cmath>
#include <random>

namespace amanda::tts {

Mat copy_task_patterns(const CopyTaskSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Mat patterns(spec.symbols, spec.frames_per_symbol * spec.n_mels);
  for (Index i = 0; i < patterns.size(); ++i) patterns.data()[i] = d(rng);
  return patterns;
}

Example copy_task_example(const std::vector<Index>& symbol_indices, const Mat& patterns, const CopyTaskSpec& spec) {
  Example ex;
  const Index n = static_cast<Index>(symbol_indices.size());
  ex.mel.resize(n * spec.frames_per_symbol, spec.n_mels);
  for (Index i = 0; i < n; ++i) {
    const Index sym = symbol_indices[static_cast<std::size_t>(i)];
    ex.text.ids.push_back(Vocabulary::id_of(static_cast<char>('a' + sym)));
    for (Index f = 0; f < spec.frames_per_symbol; ++f)
      ex.mel.row(i * spec.frames_per_symbol + f) = patterns.row(sym).segment(f * spec.n_mels, spec.n_mels);
  }
  return ex;
}

std::vector<Example> copy_task_corpus(const CopyTaskSpec& spec, std::size_t count) {
  const Mat patterns = copy_task_patterns(spec);
  std::mt19937_64 rng(spec.seed + 1);
  std::uniform_int_distribution<Index> len(spec.min_length, spec.max_length);
  std::uniform_int_distribution<Index> sym(0, spec.symbols - 1);
  std::vector<Example> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<Index> symbols(static_cast<std::size_t>(len(rng)));
    for (auto& s : symbols) s = sym(rng);
    out.push_back(copy_task_example(symbols, patterns, spec));
  }
  return out;
}

double diagonal_mass(const Mat& alpha, double band) {
  const Index rows = alpha.rows(), cols = alpha.cols();
  if (rows == 0 || cols == 0) return 0.0;
  double mass = 0.0;
  for (Index t = 0; t < rows; ++t) {
    const double pos = (static_cast<double>(t) + 0.5) / static_cast<double>(rows);
    for (Index k = 0; k < cols; ++k) {
      const double key = (static_cast<double>(k) + 0.5) / static_cast<double>(cols);
      if (std::abs(pos - key) < band) mass += alpha(t, k);
    }
  }
  return mass / static_cast<double>(rows);
}

}  // namespace amanda::tts
