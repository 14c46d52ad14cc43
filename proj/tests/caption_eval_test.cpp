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

#include "hubtext/caption_eval.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace hubtext {
namespace {

// Maps the caption text "i,j,..." straight to a vector.
class LiteralEncoder final : public Encoder {
 public:
  explicit LiteralEncoder(std::size_t dim) : dim_(dim), vocab_({"x"}) {}
  std::size_t dim() const override { return dim_; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  std::vector<Embedding> encode_sequences(std::span<const TokenSequence>) const override {
    throw Error(Errc::kInvalidArgument, "unused");
  }
  std::vector<Embedding> encode_texts(std::span<const std::string> batch) const override {
    std::vector<Embedding> out;
    for (const auto& t : batch) {
      std::istringstream in(t);
      std::ostringstream row;
      row << "x\t" << t;
      std::istringstream rin(row.str());
      out.push_back(parse_image_fixtures(rin)[0]);
    }
    return out;
  }
  std::string describe() const override { return "literal"; }

 private:
  std::size_t dim_;
  Vocabulary vocab_;
};

std::vector<EvalPair> pairs_from(const std::vector<std::pair<std::string, std::string>>& images_and_captions) {
  std::vector<EvalPair> out;
  int i = 0;
  for (const auto& [image, caption] : images_and_captions) {
    std::istringstream in("img\t" + image);
    out.push_back({"img" + std::to_string(i++), parse_image_fixtures(in)[0], {{"sys", caption}}});
  }
  return out;
}

TEST(CorpusClipScoreTest, IdenticalAndOrthogonal) {
  const LiteralEncoder enc(2);
  EXPECT_DOUBLE_EQ(corpus_clipscore(pairs_from({{"1,0", "1,0"}, {"0,3", "0,1"}}), CaptionSystem::per_image("sys"), enc), 2.5);
  EXPECT_DOUBLE_EQ(corpus_clipscore(pairs_from({{"1,0", "0,1"}, {"0,3", "-2,0"}}), CaptionSystem::per_image("sys"), enc), 0.0);
}

TEST(CorpusClipScoreTest, BroadcastHubAndOrderInvariance) {
  const LiteralEncoder enc(2);
  auto pairs = pairs_from({{"1,0", "1,0"}, {"1,1", "0,1"}, {"0,1", "1,1"}, {"-1,0", "1,0"}});
  const auto hub = CaptionSystem::broadcast("hub", "1,1");
  const double score = corpus_clipscore(pairs, hub, enc);
  const double expected = 2.5 * (std::sqrt(0.5) + 1.0 + std::sqrt(0.5) + 0.0) / 4.0;
  EXPECT_NEAR(score, expected, 1e-15);
  std::reverse(pairs.begin(), pairs.end());
  EXPECT_EQ(corpus_clipscore(pairs, hub, enc), score);
  EXPECT_GE(score, 0.0);
  EXPECT_LE(score, 2.5);
  EXPECT_THROW(corpus_clipscore(pairs, CaptionSystem::per_image("missing"), enc), Error);
}

TEST(WinRateTest, StrictAndComplementary) {
  EXPECT_DOUBLE_EQ(win_rate({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}), 0.0);
  EXPECT_DOUBLE_EQ(win_rate({2.0, 2.0, 2.0, 0.0}, {1.0, 1.0, 1.0, 1.0}), 0.75);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> u(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(20), b(20);
    bool ties = false;
    for (int i = 0; i < 20; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      ties |= a[i] == b[i];
    }
    const double sum = win_rate(a, b) + win_rate(b, a);
    EXPECT_LE(sum, 1.0 + 1e-15);
    if (ties) {
      EXPECT_LT(sum, 1.0);
    } else {
      EXPECT_DOUBLE_EQ(sum, 1.0);
    }
  }
  EXPECT_THROW(win_rate({1.0}, {1.0, 2.0}), Error);
}

TEST(WinRateTest, FromPairs) {
  const LiteralEncoder enc(2);
  auto pairs = pairs_from({{"1,0", "1,0"}, {"0,1", "1,0"}});
  const auto a = CaptionSystem::broadcast("a", "1,1");
  const auto b = CaptionSystem::per_image("sys");
  EXPECT_DOUBLE_EQ(win_rate(pairs, a, b, enc), 0.5);
}

TEST(BootstrapTest, Extremes) {
  const std::vector<double> a{0.1, 0.5, 0.3, 0.9};
  EXPECT_DOUBLE_EQ(paired_bootstrap(a, a, 1000, 0).p_value, 1.0);
  std::vector<double> b = a;
  for (double& x : b) x -= 10.0;
  const auto r = paired_bootstrap(a, b, 1000, 0);
  EXPECT_DOUBLE_EQ(r.p_value, 0.0);
  EXPECT_TRUE(r.significant);
  try {
    paired_bootstrap({1.0, 2.0}, {1.0}, 10, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kLengthMismatch);
  }
}

TEST(BootstrapTest, SeededGaussianMatchesScalarOracle) {
  std::mt19937_64 rng(0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> a(200), b(200);
  for (int i = 0; i < 200; ++i) {
    a[i] = 1.0 + g(rng);
    b[i] = g(rng);
  }
  const auto r = paired_bootstrap(a, b, 1000, 0);
  EXPECT_LT(r.p_value, 0.05);
  EXPECT_TRUE(r.significant);
  EXPECT_DOUBLE_EQ(r.p_value, oracle::scalar_bootstrap_p(a, b, 1000, 0));
  // Deterministic for a fixed seed.
  EXPECT_EQ(paired_bootstrap(a, b, 1000, 0).p_value, r.p_value);
}

TEST(BootstrapTest, NearEqualSystemsAreNotSignificant) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> a(100), b(100);
  for (int i = 0; i < 100; ++i) {
    const double shared = g(rng);
    a[i] = shared + 0.01 * g(rng);
    b[i] = shared + 0.01 * g(rng);
  }
  const auto r = paired_bootstrap(a, b, 1000, 3);
  EXPECT_GT(r.p_value, 0.05);
  EXPECT_DOUBLE_EQ(r.p_value, oracle::scalar_bootstrap_p(a, b, 1000, 3));
}

}  // namespace
}  // namespace hubtext
