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

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "hubtext/beam_search.hpp"
#include "hubtext/encoder.hpp"

namespace hubtext {

enum class Provenance { kInversionFile, kCorpusFallback };

inline std::string_view provenance_name(Provenance p) {
  return p == Provenance::kInversionFile ? "inversion-file" : "corpus-fallback";
}

struct Hypothesis {
  std::string text;
  TokenSequence seq;
};

struct HypothesisSet {
  std::vector<Hypothesis> hypotheses;
  Provenance provenance = Provenance::kInversionFile;
};

enum class UnknownTokenPolicy { kStrict, kLenient };

// Tokenizes candidate texts in order. Strict mode fails on the first bad
// line; lenient mode drops it and reports it through `log`.
inline std::vector<Hypothesis> tokenize_candidates(
    const std::vector<std::string>& texts, const Vocabulary& vocab, UnknownTokenPolicy policy,
    const std::function<void(const std::string&)>& log = {}) {
  std::vector<Hypothesis> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    try {
      out.push_back({texts[i], tokenize(texts[i], vocab)});
    } catch (const Error& e) {
      if (policy == UnknownTokenPolicy::kStrict) {
        throw Error(Errc::kTokenizationError, "candidate " + std::to_string(i + 1) + ": " + e.what());
      }
      if (log) log("dropping candidate " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (out.empty()) throw Error(Errc::kTokenizationError, "no candidate survived tokenization");
  return out;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(line);
  }
  return lines;
}

// Hypothesis file: one candidate text per line, as produced by an external
// inversion model.
inline HypothesisSet load_hypotheses(const std::string& path, const Vocabulary& vocab,
                                     UnknownTokenPolicy policy = UnknownTokenPolicy::kStrict,
                                     const std::function<void(const std::string&)>& log = {}) {
  auto lines = read_lines(path);
  if (lines.empty()) throw Error(Errc::kEmptyFile, "hypothesis file '" + path + "' is empty");
  return {tokenize_candidates(lines, vocab, policy, log), Provenance::kInversionFile};
}

struct ScoredHypothesis {
  Hypothesis hypothesis;
  double score = 0.0;
};

// J for every hypothesis, in input order. With a pool, contiguous slices are
// scored by workers and stitched back by position.
inline std::vector<double> score_hypotheses(const std::vector<Hypothesis>& hypotheses,
                                            const SequenceScorer& scorer, WorkerPool* pool = nullptr) {
  std::vector<TokenSequence> seqs;
  seqs.reserve(hypotheses.size());
  for (const auto& h : hypotheses) seqs.push_back(h.seq);
  if (!pool || pool->size() == 1 || seqs.size() < 2) return scorer.score(seqs);

  const auto ranges = shard_vocabulary(seqs.size(), pool->size());
  std::vector<std::future<std::vector<double>>> futures;
  for (const auto& r : ranges) {
    futures.push_back(pool->submit([&seqs, &scorer, r] {
      return scorer.score(std::span(seqs).subspan(r.begin, r.size()));
    }));
  }
  std::vector<double> out;
  out.reserve(seqs.size());
  for (auto& f : futures) {
    auto part = f.get();
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// Argmax of J; ties go to the earliest hypothesis.
inline ScoredHypothesis select_best_hypothesis(const HypothesisSet& set, const SequenceScorer& scorer,
                                               WorkerPool* pool = nullptr) {
  if (set.hypotheses.empty()) throw Error(Errc::kInvalidArgument, "hypothesis set is empty");
  const auto scores = score_hypotheses(set.hypotheses, scorer, pool);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return {set.hypotheses[best], scores[best]};
}

// The top_n corpus texts by J (descending, stable on corpus order), for runs
// without an inversion model. top_n is clamped to the corpus size.
inline std::vector<ScoredHypothesis> rank_corpus(const std::vector<std::string>& corpus,
                                                 const SequenceScorer& scorer, std::size_t top_n,
                                                 UnknownTokenPolicy policy = UnknownTokenPolicy::kStrict,
                                                 WorkerPool* pool = nullptr,
                                                 const std::function<void(const std::string&)>& log = {}) {
  if (corpus.empty()) throw Error(Errc::kEmptyFile, "corpus is empty");
  if (top_n < 1) throw Error(Errc::kInvalidArgument, "top_n must be >= 1");
  auto hypotheses = tokenize_candidates(corpus, scorer.encoder().vocabulary(), policy, log);
  const auto scores = score_hypotheses(hypotheses, scorer, pool);
  std::vector<std::size_t> order(hypotheses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(top_n, order.size()));
  std::vector<ScoredHypothesis> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back({std::move(hypotheses[i]), scores[i]});
  return out;
}

inline HypothesisSet corpus_fallback_init(const std::vector<std::string>& corpus,
                                          const SequenceScorer& scorer, std::size_t top_n,
                                          UnknownTokenPolicy policy = UnknownTokenPolicy::kStrict,
                                          WorkerPool* pool = nullptr) {
  HypothesisSet set;
  set.provenance = Provenance::kCorpusFallback;
  for (auto& r : rank_corpus(corpus, scorer, top_n, policy, pool)) {
    set.hypotheses.push_back(std::move(r.hypothesis));
  }
  return set;
}

}  // namespace hubtext
