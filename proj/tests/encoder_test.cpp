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

#include "hubtext/encoder.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

namespace hubtext {
namespace {

TokenSequence seq(std::initializer_list<TokenId> ids) { return TokenSequence{ids}; }

TEST(VocabularyTest, BijectionAndDuplicates) {
  const Vocabulary v({"a", "photo", "of"});
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.find("photo"), TokenId{1});
  EXPECT_EQ(v.find("dog"), std::nullopt);
  EXPECT_EQ(v.token(2), "of");
  EXPECT_THROW(Vocabulary({"a", "a"}), Error);
  EXPECT_THROW(Vocabulary(std::vector<std::string>{}), Error);
}

TEST(TokenizeTest, RoundTripAndUnknown) {
  const Vocabulary v({"a", "photo", "of", "cat"});
  const auto s = tokenize("a photo  of a cat", v);
  EXPECT_EQ(s, seq({0, 1, 2, 0, 3}));
  EXPECT_EQ(detokenize(s, v), "a photo of a cat");
  try {
    tokenize("a dog", v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTokenizationError);
  }
  EXPECT_THROW(tokenize("   ", v), Error);
}

TEST(ToyEncoderTest, Deterministic) {
  const auto a = toy_encode_text(seq({3, 1, 4, 1, 5}), 64, 99);
  const auto b = toy_encode_text(seq({3, 1, 4, 1, 5}), 64, 99);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, toy_encode_text(seq({3, 1, 4, 1, 5}), 64, 100));
}

TEST(ToyEncoderTest, SingletonIsTokenVector) {
  const auto e = toy_encode_text(seq({7}), 32, 5);
  const auto v = toy_token_vector(7, 32, 5);
  for (std::size_t k = 0; k < 32; ++k) EXPECT_NEAR(e[k], v[k], 1e-15);
  EXPECT_NEAR(e.norm(), 1.0, 1e-12);
}

TEST(ToyEncoderTest, OrderSensitive) {
  const auto ab = toy_encode_text(seq({0, 1}), 64, 0);
  const auto ba = toy_encode_text(seq({1, 0}), 64, 0);
  EXPECT_LT(cosine(ab, ba), 1.0 - 1e-6);
}

TEST(ToyEncoderTest, EmptySequence) {
  try {
    toy_encode_text(TokenSequence{}, 8, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptySequence);
  }
}

TEST(ToyEncoderTest, ClassMatchesFreeFunctionAndDimIsConstant) {
  const ToyEncoder enc(numbered_vocabulary(50), 24, 1234);
  std::mt19937_64 rng(0);
  std::uniform_int_distribution<TokenId> tok(0, 49);
  std::uniform_int_distribution<int> len(1, 12);
  for (int i = 0; i < 100; ++i) {
    TokenSequence s;
    for (int j = len(rng); j > 0; --j) s.ids.push_back(tok(rng));
    const auto e = enc.encode(s);
    ASSERT_EQ(e.dim(), 24u);
    for (double x : e.values()) EXPECT_TRUE(std::isfinite(x));
    EXPECT_EQ(e, toy_encode_text(s, 24, 1234));
  }
  EXPECT_EQ(enc.encode_text("t3 t4"), enc.encode(seq({3, 4})));
}

TEST(ToyEncoderTest, KnownValuesAcrossProcesses) {
  // Frozen values. Only libm rounding in log/cos/sin may move the last bits.
  const std::vector<std::vector<double>> expected = {
      {-0.82605295430042469, 0.21726219152412324, -0.3310324939976198, 0.40106251974398166},
      {-0.77054932625574701, -0.62646027269088633, -0.11747877487816456}};
  const auto a = toy_token_vector(0, 4, 0);
  const auto b = toy_token_vector(5, 3, 2024);
  ASSERT_EQ(a.size(), 4u);
  ASSERT_EQ(b.size(), 3u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(a[i], expected[0][i], 1e-14);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(b[i], expected[1][i], 1e-14);

  const auto e = toy_encode_text(TokenSequence{{1, 2, 1}}, 3, 7);
  const double frozen[] = {-0.2557875864557827, -0.65012935156509766, -0.71547504278533092};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(e[i], frozen[i], 1e-14);
}

TEST(ImageFixtureTest, ParsesRowsAndComments) {
  std::istringstream in("# images\nimg1\t1,0,0,0\nimg2\t0.5,0.5,0,-1e-3\n\n");
  const auto t = parse_image_fixtures(in);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.dim(), 4u);
  EXPECT_EQ(t.source_ids()[1], "img2");
  EXPECT_DOUBLE_EQ(t[1][3], -1e-3);
}

TEST(ImageFixtureTest, Errors) {
  auto code_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_image_fixtures(in);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kInvalidArgument;
  };
  EXPECT_EQ(code_of("a\t1,nan,0\n"), Errc::kParseError);
  EXPECT_EQ(code_of("a\t1,2,x\n"), Errc::kParseError);
  EXPECT_EQ(code_of("a 1,2\n"), Errc::kParseError);
  EXPECT_EQ(code_of("a\t1,2,3\nb\t1,2\n"), Errc::kDimMismatch);
  EXPECT_EQ(code_of("a\t0,0\n"), Errc::kZeroNorm);
  EXPECT_EQ(code_of("# nothing\n"), Errc::kEmptyFile);
  try {
    load_image_fixtures("/nonexistent/images.tsv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kIoError);
    EXPECT_NE(std::string(e.what()).find("/nonexistent/images.tsv"), std::string::npos);
  }
}

}  // namespace
}  // namespace hubtext
