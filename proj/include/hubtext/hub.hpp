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

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hubtext/embedding.hpp"

namespace hubtext {

struct HubSolution {
  Embedding embedding;
  Measure measure = Measure::kCosine;
  double objective_value = 0.0;
  bool degenerate = false;
};

// Cosine hub: the direction of the mean normalized image. Returned at unit
// length; its objective is the centroid norm (the Cauchy-Schwarz bound).
inline HubSolution optimal_hub_cosine(const TuningSet& tuning) {
  const Embedding centroid = normalized_centroid(tuning);
  const double bound = centroid.norm();
  if (!(bound > kNormTolerance)) {
    throw Error(Errc::kDegenerateHub,
                "normalized image centroid is zero; every direction scores the same");
  }
  return {normalize(centroid), Measure::kCosine, bound, false};
}

// Inner-product hub at a fixed norm budget (the unconstrained problem is
// unbounded). Direction is the mean of the raw image embeddings.
inline HubSolution optimal_hub_inner_product(const TuningSet& tuning,
                                             double norm_budget = 1.0) {
  if (!(norm_budget > 0.0) || !std::isfinite(norm_budget)) {
    throw Error(Errc::kInvalidArgument, "norm budget must be positive and finite");
  }
  const Embedding mean = mean_embedding(tuning.embeddings());
  const double mean_norm = mean.norm();
  if (!(mean_norm > kNormTolerance)) {
    throw Error(Errc::kDegenerateHub, "image mean is zero; inner product is constant on the sphere");
  }
  std::vector<double> v(mean.values().begin(), mean.values().end());
  for (double& x : v) x *= norm_budget / mean_norm;
  Embedding hub(std::move(v));
  const SimilarityConfig cfg{Measure::kInnerProduct, 1.0, false};
  const double value = objective(hub, tuning, cfg);
  return {std::move(hub), Measure::kInnerProduct, value, false};
}

// Squared-Euclidean hub: the raw image mean, not re-normalized.
inline HubSolution optimal_hub_sqeuclidean(const TuningSet& tuning) {
  Embedding mean = mean_embedding(tuning.embeddings());
  const SimilarityConfig cfg{Measure::kNegSquaredEuclidean, 1.0, false};
  const double value = objective(mean, tuning, cfg);
  return {std::move(mean), Measure::kNegSquaredEuclidean, value, false};
}

inline HubSolution optimal_hub(const TuningSet& tuning, const SimilarityConfig& cfg,
                               double norm_budget = 1.0) {
  switch (cfg.measure) {
    case Measure::kCosine: return optimal_hub_cosine(tuning);
    case Measure::kInnerProduct: return optimal_hub_inner_product(tuning, norm_budget);
    case Measure::kNegSquaredEuclidean: return optimal_hub_sqeuclidean(tuning);
  }
  throw Error(Errc::kInvalidArgument, "unknown measure");
}

struct OracleOptions {
  int steps = 10000;
  double step_size = 0.5;
  std::uint64_t seed = 0;
  // Radius of the feasible ball for inner product; unset means unconstrained.
  std::optional<double> norm_budget;
};

namespace detail {

inline std::vector<double> objective_gradient(const std::vector<double>& e,
                                              const TuningSet& tuning,
                                              const SimilarityConfig& cfg) {
  const std::size_t dim = e.size();
  std::vector<double> grad(dim, 0.0);
  double e_norm_sq = 0.0;
  for (double x : e) e_norm_sq += x * x;
  const double e_norm = std::sqrt(e_norm_sq);
  for (const auto& image : tuning.embeddings()) {
    switch (cfg.measure) {
      case Measure::kCosine: {
        const double i_norm = image.norm();
        double d = 0.0;
        for (std::size_t k = 0; k < dim; ++k) d += e[k] * image[k];
        const double c = d / (e_norm * i_norm);
        if (cfg.clip_at_zero && c <= 0.0) break;
        const double weight = cfg.clip_at_zero ? cfg.scale : 1.0;
        for (std::size_t k = 0; k < dim; ++k) {
          grad[k] += weight * (image[k] / (e_norm * i_norm) - c * e[k] / e_norm_sq);
        }
        break;
      }
      case Measure::kInnerProduct:
        for (std::size_t k = 0; k < dim; ++k) grad[k] += image[k];
        break;
      case Measure::kNegSquaredEuclidean:
        for (std::size_t k = 0; k < dim; ++k) grad[k] += 2.0 * (image[k] - e[k]);
        break;
    }
  }
  for (double& g : grad) g /= static_cast<double>(tuning.size());
  return grad;
}

inline void project(std::vector<double>& e, const SimilarityConfig& cfg,
                    const std::optional<double>& norm_budget) {
  double n = 0.0;
  for (double x : e) n += x * x;
  n = std::sqrt(n);
  if (cfg.measure == Measure::kCosine) {
    if (n > kNormTolerance) {
      for (double& x : e) x /= n;
    }
  } else if (cfg.measure == Measure::kInnerProduct && norm_budget && n > *norm_budget) {
    for (double& x : e) x *= *norm_budget / n;
  }
}

}  // namespace detail

// Projected gradient ascent from a seeded Gaussian start. Used to check the
// closed-form solvers, never to produce hubs.
inline HubSolution numeric_hub_oracle(const TuningSet& tuning, const SimilarityConfig& cfg,
                                      const OracleOptions& options = {}) {
  if (options.steps < 1) throw Error(Errc::kInvalidArgument, "oracle needs steps >= 1");
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> e(tuning.dim());
  for (double& x : e) x = gauss(rng);
  if (cfg.measure == Measure::kInnerProduct && options.norm_budget) {
    double n = 0.0;
    for (double x : e) n += x * x;
    n = std::sqrt(n);
    for (double& x : e) x *= *options.norm_budget / n;
  }
  detail::project(e, cfg, options.norm_budget);

  for (int step = 0; step < options.steps; ++step) {
    const auto grad = detail::objective_gradient(e, tuning, cfg);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] += options.step_size * grad[k];
    detail::project(e, cfg, options.norm_budget);
    for (double x : e) {
      if (!std::isfinite(x)) {
        throw Error(Errc::kNonFinite, "gradient ascent diverged at step " + std::to_string(step));
      }
    }
  }
  Embedding result(std::move(e));
  const double value = objective(result, tuning, cfg);
  if (!std::isfinite(value)) throw Error(Errc::kNonFinite, "oracle objective is not finite");
  return {std::move(result), cfg.measure, value, false};
}

}  // namespace hubtext
