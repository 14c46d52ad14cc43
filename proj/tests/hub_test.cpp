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

#include "hubtext/hub.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace hubtext {
namespace {

constexpr double kHalfSqrt2 = 0.70710678118654752440;

OracleOptions opts(int steps, double step_size, std::uint64_t seed) {
  OracleOptions o;
  o.steps = steps;
  o.step_size = step_size;
  o.seed = seed;
  return o;
}

void expect_code(Errc code, const std::function<void()>& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << errc_name(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

std::vector<oracle::Vec> raw(const TuningSet& t) {
  std::vector<oracle::Vec> out;
  for (const auto& e : t.embeddings()) out.emplace_back(e.values().begin(), e.values().end());
  return out;
}

TEST(CosineHubTest, SingleImage) {
  const auto h = optimal_hub_cosine(TuningSet({Embedding{3.0, 4.0}}));
  EXPECT_DOUBLE_EQ(h.embedding[0], 0.6);
  EXPECT_DOUBLE_EQ(h.embedding[1], 0.8);
  EXPECT_DOUBLE_EQ(h.objective_value, 1.0);
  EXPECT_FALSE(h.degenerate);
}

TEST(CosineHubTest, TwoAxesMatchesGrid) {
  const TuningSet t({Embedding{1.0, 0.0}, Embedding{0.0, 1.0}});
  const auto h = optimal_hub_cosine(t);
  EXPECT_NEAR(h.embedding[0], kHalfSqrt2, 1e-15);
  EXPECT_NEAR(h.embedding[1], kHalfSqrt2, 1e-15);
  EXPECT_NEAR(h.objective_value, kHalfSqrt2, 1e-15);
  const auto images = raw(t);
  const auto grid = oracle::circle_grid_max([&](const oracle::Vec& u) { return oracle::mean_cosine(u, images); },
                                            100000);
  EXPECT_NEAR(grid.point[0], h.embedding[0], 1e-4);
  EXPECT_NEAR(grid.point[1], h.embedding[1], 1e-4);
  EXPECT_NEAR(grid.value, h.objective_value, 1e-4);
}

TEST(CosineHubTest, AntipodalIsDegenerate) {
  expect_code(Errc::kDegenerateHub, [] { optimal_hub_cosine(TuningSet({Embedding{1.0, 0.0}, Embedding{-1.0, 0.0}})); });
}

TEST(InnerProductHubTest, Examples) {
  const auto single = optimal_hub_inner_product(TuningSet({Embedding{2.0, 0.0}}), 1.0);
  EXPECT_DOUBLE_EQ(single.embedding[0], 1.0);
  EXPECT_DOUBLE_EQ(single.embedding[1], 0.0);
  EXPECT_DOUBLE_EQ(single.objective_value, 2.0);

  const TuningSet t({Embedding{1.0, 0.0}, Embedding{0.0, 2.0}});
  const auto h = optimal_hub_inner_product(t, 1.0);
  EXPECT_NEAR(h.embedding[0], 1.0 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(h.embedding[1], 2.0 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(h.objective_value, std::sqrt(5.0) / 2.0, 1e-15);
  const auto images = raw(t);
  const auto grid = oracle::circle_grid_max([&](const oracle::Vec& u) { return oracle::mean_inner(u, images); },
                                            100000);
  EXPECT_NEAR(grid.value, h.objective_value, 1e-6);
  EXPECT_GE(h.objective_value, grid.value - 1e-12);

  expect_code(Errc::kDegenerateHub,
              [] { optimal_hub_inner_product(TuningSet({Embedding{1.0, 0.0}, Embedding{-1.0, 0.0}}), 1.0); });
  expect_code(Errc::kInvalidArgument, [] { optimal_hub_inner_product(TuningSet({Embedding{1.0, 0.0}}), 0.0); });
}

TEST(InnerProductHubTest, ScalesWithBudget) {
  const TuningSet t({Embedding{1.0, 2.0}, Embedding{3.0, -1.0}});
  const auto one = optimal_hub_inner_product(t, 1.0);
  const auto three = optimal_hub_inner_product(t, 3.0);
  EXPECT_NEAR(three.embedding.norm(), 3.0, 1e-12);
  EXPECT_NEAR(three.objective_value, 3.0 * one.objective_value, 1e-12);
}

TEST(SqEuclideanHubTest, Examples) {
  const TuningSet t({Embedding{1.0, 0.0}, Embedding{3.0, 0.0}});
  const auto h = optimal_hub_sqeuclidean(t);
  EXPECT_EQ(h.embedding, (Embedding{2.0, 0.0}));
  EXPECT_DOUBLE_EQ(h.objective_value, -1.0);
  const auto images = raw(t);
  const auto grid = oracle::square_grid_max([&](const oracle::Vec& p) { return oracle::mean_neg_sq(p, images); },
                                            -5.0, 5.0, 1001);
  EXPECT_NEAR(grid.point[0], 2.0, 1e-9);
  EXPECT_NEAR(grid.point[1], 0.0, 1e-9);

  const auto single = optimal_hub_sqeuclidean(TuningSet({Embedding{5.0, 5.0}}));
  EXPECT_EQ(single.embedding, (Embedding{5.0, 5.0}));
  EXPECT_DOUBLE_EQ(single.objective_value, 0.0);

  const auto sym = optimal_hub_sqeuclidean(TuningSet({Embedding{1.0, 0.0}, Embedding{-1.0, 0.0}}));
  EXPECT_EQ(sym.embedding, (Embedding{0.0, 0.0}));
  EXPECT_DOUBLE_EQ(sym.objective_value, -1.0);
}

TEST(NumericOracleTest, AgreesWithClosedForms) {
  const SimilarityConfig cos{};
  const auto two = numeric_hub_oracle(TuningSet({Embedding{1.0, 0.0}, Embedding{0.0, 1.0}}), cos, opts(10000, 0.5, 0));
  EXPECT_NEAR(two.objective_value, kHalfSqrt2, 1e-6);

  const auto single = numeric_hub_oracle(TuningSet({Embedding{3.0, 4.0}}), cos, opts(10000, 0.5, 1));
  EXPECT_NEAR(single.embedding[0], 0.6, 1e-6);
  EXPECT_NEAR(single.embedding[1], 0.8, 1e-6);

  const SimilarityConfig sq{Measure::kNegSquaredEuclidean, 1.0, false};
  const auto mean = numeric_hub_oracle(TuningSet({Embedding{1.0, 0.0}, Embedding{3.0, 0.0}}), sq, opts(10000, 0.25, 2));
  EXPECT_NEAR(mean.embedding[0], 2.0, 1e-6);
  EXPECT_NEAR(mean.embedding[1], 0.0, 1e-6);
}

TEST(NumericOracleTest, DeterministicForSeed) {
  const TuningSet t({Embedding{1.0, 0.2, 0.3}, Embedding{0.1, 1.0, -0.4}});
  const auto a = numeric_hub_oracle(t, SimilarityConfig{}, opts(500, 0.3, 42));
  const auto b = numeric_hub_oracle(t, SimilarityConfig{}, opts(500, 0.3, 42));
  EXPECT_EQ(a.embedding, b.embedding);
  EXPECT_THROW(numeric_hub_oracle(t, SimilarityConfig{}, opts(0, 0.3, 42)), Error);
}

TEST(NumericOracleTest, UnconstrainedInnerProductDiverges) {
  const TuningSet t({Embedding{1.0, 0.0}});
  const SimilarityConfig ip{Measure::kInnerProduct, 1.0, false};
  expect_code(Errc::kNonFinite, [&] { numeric_hub_oracle(t, ip, opts(100, 1e307, 0)); });
}

TEST(HubPropertyTest, AnalyticDominatesOracleAndProbes) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t dims[] = {2, 8, 64};
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dim = dims[trial % 3];
    const std::size_t n = 1 + static_cast<std::size_t>(trial) % 32;
    std::vector<Embedding> imgs;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(dim);
      for (double& x : v) x = g(rng);
      imgs.emplace_back(std::move(v));
    }
    const TuningSet t(imgs);
    const SimilarityConfig cos{};
    const auto hub = optimal_hub_cosine(t);
    EXPECT_NEAR(hub.objective_value, objective(hub.embedding, t, cos), 1e-9);
    const auto orc = numeric_hub_oracle(t, cos, opts(2000, 0.5, static_cast<std::uint64_t>(trial)));
    EXPECT_GE(hub.objective_value, orc.objective_value - 1e-6);
    for (int p = 0; p < 100; ++p) {
      std::vector<double> u(dim);
      for (double& x : u) x = g(rng);
      EXPECT_LE(objective(Embedding(u), t, cos), hub.objective_value + 1e-12);
    }
  }
}

TEST(HubPropertyTest, PermutationInvariantBits) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Embedding> imgs;
  for (int i = 0; i < 25; ++i) {
    std::vector<double> v(12);
    for (double& x : v) x = g(rng) * (1 + i);
    imgs.emplace_back(std::move(v));
  }
  const auto cos = optimal_hub_cosine(TuningSet(imgs));
  const auto ip = optimal_hub_inner_product(TuningSet(imgs), 1.0);
  const auto sq = optimal_hub_sqeuclidean(TuningSet(imgs));
  for (int r = 0; r < 10; ++r) {
    std::shuffle(imgs.begin(), imgs.end(), rng);
    EXPECT_EQ(optimal_hub_cosine(TuningSet(imgs)).embedding, cos.embedding);
    EXPECT_EQ(optimal_hub_inner_product(TuningSet(imgs), 1.0).embedding, ip.embedding);
    EXPECT_EQ(optimal_hub_sqeuclidean(TuningSet(imgs)).embedding, sq.embedding);
  }
}

}  // namespace
}  // namespace hubtext
