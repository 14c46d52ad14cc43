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
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hubtext/embedding.hpp"

namespace hubtext {

using TokenId = std::uint32_t;

// Ordered token list with an index <-> surface-form bijection.
class Vocabulary {
 public:
  Vocabulary() = default;

  explicit Vocabulary(std::vector<std::string> tokens, std::string separator = " ")
      : tokens_(std::move(tokens)), separator_(std::move(separator)) {
    if (tokens_.empty()) throw Error(Errc::kInvalidArgument, "vocabulary is empty");
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (tokens_[i].empty()) throw Error(Errc::kInvalidArgument, "empty token in vocabulary");
      if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
        throw Error(Errc::kInvalidArgument, "duplicate token '" + tokens_[i] + "'");
      }
    }
  }

  // One token per line; blank lines are skipped.
  static Vocabulary from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::kIoError, "cannot open vocabulary file '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) tokens.push_back(line);
    }
    if (tokens.empty()) throw Error(Errc::kEmptyFile, "vocabulary file '" + path + "' is empty");
    return Vocabulary(std::move(tokens));
  }

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& separator() const noexcept { return separator_; }

  std::optional<TokenId> find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> tokens_;
  std::string separator_ = " ";
  std::unordered_map<std::string, TokenId> index_;
};

// Synthetic vocabulary "t0", "t1", ...
inline Vocabulary numbered_vocabulary(std::size_t size) {
  std::vector<std::string> tokens;
  tokens.reserve(size);
  for (std::size_t i = 0; i < size; ++i) tokens.push_back("t" + std::to_string(i));
  return Vocabulary(std::move(tokens));
}

struct TokenSequence {
  std::vector<TokenId> ids;

  std::size_t size() const noexcept { return ids.size(); }
  bool empty() const noexcept { return ids.empty(); }
  auto operator<=>(const TokenSequence&) const = default;
};

struct TokenSequenceHash {
  std::size_t operator()(const TokenSequence& seq) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (TokenId id : seq.ids) {
      h ^= id;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

inline std::string detokenize(const TokenSequence& seq, const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i > 0) out += vocab.separator();
    out += vocab.token(seq.ids[i]);
  }
  return out;
}

// Whitespace tokenization against the vocabulary. Throws TokenizationError
// naming the first unknown token.
inline TokenSequence tokenize(std::string_view text, const Vocabulary& vocab) {
  TokenSequence seq;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    auto id = vocab.find(word);
    if (!id) throw Error(Errc::kTokenizationError, "unknown token '" + word + "'");
    seq.ids.push_back(*id);
  }
  if (seq.empty()) throw Error(Errc::kEmptySequence, "text has no tokens");
  return seq;
}

// Text encoder f_theta. Implementations must be safe to call concurrently.
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual std::size_t dim() const = 0;
  virtual const Vocabulary& vocabulary() const = 0;
  virtual std::vector<Embedding> encode_sequences(std::span<const TokenSequence> batch) const = 0;
  virtual std::vector<Embedding> encode_texts(std::span<const std::string> batch) const = 0;
  // Short human-readable descriptor recorded in run metadata.
  virtual std::string describe() const = 0;

  Embedding encode(const TokenSequence& seq) const {
    return std::move(encode_sequences(std::span(&seq, 1)).front());
  }
  Embedding encode_text(const std::string& text) const {
    return std::move(encode_texts(std::span(&text, 1)).front());
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in (0, 1).
inline double unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

// Pseudo-random unit vector for one token, a pure function of (id, dim, seed).
inline std::vector<double> toy_token_vector(TokenId id, std::size_t dim, std::uint64_t seed) {
  std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (static_cast<std::uint64_t>(id) + 1));
  std::vector<double> v(dim);
  for (std::size_t k = 0; k < dim; k += 2) {
    const double u1 = detail::unit_open(detail::splitmix64(state));
    const double u2 = detail::unit_open(detail::splitmix64(state));
    const double r = std::sqrt(-2.0 * std::log(u1));
    v[k] = r * std::cos(2.0 * std::numbers::pi * u2);
    if (k + 1 < dim) v[k + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
  }
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

// Positive, position-dependent weight; makes the encoding order-sensitive.
inline double toy_position_weight(std::size_t position) {
  return 1.0 + 0.5 * std::sin(static_cast<double>(position) + 1.0);
}

namespace detail {

template <typename TokenVector>
Embedding toy_combine(const TokenSequence& seq, std::size_t dim, TokenVector&& token_vector) {
  if (seq.empty()) throw Error(Errc::kEmptySequence, "cannot encode an empty sequence");
  std::vector<double> sum(dim, 0.0);
  for (std::size_t p = 0; p < seq.size(); ++p) {
    const double w = toy_position_weight(p);
    std::span<const double> v = token_vector(seq.ids[p]);
    for (std::size_t k = 0; k < dim; ++k) sum[k] += w * v[k];
  }
  double n = 0.0;
  for (double x : sum) n += x * x;
  n = std::sqrt(n);
  if (!(n > kNormTolerance)) {
    // Exact cancellation; fall back to the first token so output stays unit.
    auto v = token_vector(seq.ids.front());
    return Embedding(std::vector<double>(v.begin(), v.end()));
  }
  for (double& x : sum) x /= n;
  return Embedding(std::move(sum));
}

}  // namespace detail

// Desk-scale stand-in for a real text tower: L2-normalized, position-weighted
// sum of hashed token vectors.
inline Embedding toy_encode_text(const TokenSequence& seq, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error(Errc::kInvalidArgument, "dim must be >= 1");
  std::vector<double> scratch;
  return detail::toy_combine(seq, dim, [&](TokenId id) -> std::span<const double> {
    scratch = toy_token_vector(id, dim, seed);
    return scratch;
  });
}

class ToyEncoder final : public Encoder {
 public:
  ToyEncoder(Vocabulary vocab, std::size_t dim, std::uint64_t seed)
      : vocab_(std::move(vocab)), dim_(dim), seed_(seed) {
    if (dim_ == 0) throw Error(Errc::kInvalidArgument, "dim must be >= 1");
    table_.reserve(vocab_.size() * dim_);
    for (std::size_t id = 0; id < vocab_.size(); ++id) {
      auto v = toy_token_vector(static_cast<TokenId>(id), dim_, seed_);
      table_.insert(table_.end(), v.begin(), v.end());
    }
  }

  std::size_t dim() const override { return dim_; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::span<const double> token_vector(TokenId id) const {
    if (id >= vocab_.size()) {
      throw Error(Errc::kInvalidArgument, "token id " + std::to_string(id) + " out of range");
    }
    return std::span<const double>(table_).subspan(id * dim_, dim_);
  }

  std::vector<Embedding> encode_sequences(std::span<const TokenSequence> batch) const override {
    std::vector<Embedding> out;
    out.reserve(batch.size());
    for (const auto& seq : batch) {
      out.push_back(detail::toy_combine(seq, dim_, [&](TokenId id) { return token_vector(id); }));
    }
    return out;
  }

  std::vector<Embedding> encode_texts(std::span<const std::string> batch) const override {
    std::vector<Embedding> out;
    out.reserve(batch.size());
    for (const auto& text : batch) out.push_back(encode(tokenize(text, vocab_)));
    return out;
  }

  std::string describe() const override {
    return "toy(dim=" + std::to_string(dim_) + ",seed=" + std::to_string(seed_) +
           ",vocab=" + std::to_string(vocab_.size()) + ")";
  }

 private:
  Vocabulary vocab_;
  std::size_t dim_;
  std::uint64_t seed_;
  std::vector<double> table_;
};

// Image fixture file: `<id>\t<v1>,<v2>,...` per line, `#` comments.
inline TuningSet parse_image_fixtures(std::istream& in, const std::string& origin = "<stream>") {
  std::vector<Embedding> embeddings;
  std::vector<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto where = origin + ":" + std::to_string(line_no);
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw Error(Errc::kParseError, where + ": expected '<id>\\t<values>'");
    }
    std::vector<double> values;
    std::string_view rest = std::string_view(line).substr(tab + 1);
    while (true) {
      const auto comma = rest.find(',');
      const std::string field(rest.substr(0, comma));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(field, &used);
      } catch (const std::exception&) {
        throw Error(Errc::kParseError, where + ": bad number '" + field + "'");
      }
      if (used != field.size() && field.find_first_not_of(" \t", used) != std::string::npos) {
        throw Error(Errc::kParseError, where + ": bad number '" + field + "'");
      }
      if (!std::isfinite(v)) throw Error(Errc::kParseError, where + ": non-finite value");
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (dim == 0) {
      dim = values.size();
    } else if (values.size() != dim) {
      throw Error(Errc::kDimMismatch, where + ": row has " + std::to_string(values.size()) +
                                          " values, expected " + std::to_string(dim));
    }
    ids.push_back(line.substr(0, tab));
    embeddings.emplace_back(std::move(values));
  }
  if (embeddings.empty()) throw Error(Errc::kEmptyFile, origin + ": no image rows");
  return TuningSet(std::move(embeddings), std::move(ids));
}

inline TuningSet load_image_fixtures(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open image fixture file '" + path + "'");
  return parse_image_fixtures(in, path);
}

}  // namespace hubtext
