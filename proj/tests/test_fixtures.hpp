/* Copyright 2026 The hubtext Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <random>
#include <vector>

#include "hubtext/embedding.hpp"

namespace hubtext::testing {

inline std::vector<double> gaussian(std::mt19937_64& rng, std::size_t dim, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(dim);
  for (double& x : v) x = g(rng);
  return v;
}

// Images scattered around a shared direction, the situation in which hubs
// exist in practice.
inline TuningSet clustered_images(std::uint64_t seed, std::size_t count, std::size_t dim, double spread = 1.0) {
  std::mt19937_64 rng(seed);
  const auto center = gaussian(rng, dim);
  std::vector<Embedding> out;
  for (std::size_t i = 0; i < count; ++i) {
    auto v = gaussian(rng, dim, spread);
    for (std::size_t k = 0; k < dim; ++k) v[k] += center[k] / std::sqrt(static_cast<double>(dim));
    out.emplace_back(std::move(v));
  }
  return TuningSet(std::move(out));
}

}  // namespace hubtext::testing
