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
#include <chrono>
#include <cstdio>
#include <functional>
#include <cstdint>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "hubtext/embedding.hpp"
#include "hubtext/encoder.hpp"
#include "hubtext/worker_pool.hpp"

namespace hubtext {

struct BeamEntry {
  TokenSequence seq;
  double score = 0.0;
  std::string text;
};

// Global candidate order: score descending, then surface text ascending.
inline bool ranks_before(double score_a, const std::string& text_a, double score_b,
                         const std::string& text_b) {
  if (score_a != score_b) return score_a > score_b;
  return text_a < text_b;
}

// Top-k with duplicates (same surface text) collapsed to their best score.
inline std::vector<BeamEntry> topk_select(std::vector<BeamEntry> candidates, std::size_t k) {
  std::sort(candidates.begin(), candidates.end(), [](const BeamEntry& a, const BeamEntry& b) {
    if (a.text != b.text) return a.text < b.text;
    if (a.score != b.score) return a.score > b.score;
    return a.seq < b.seq;
  });
  std::vector<BeamEntry> unique;
  unique.reserve(candidates.size());
  for (auto& c : candidates) {
    if (unique.empty() || unique.back().text != c.text) unique.push_back(std::move(c));
  }
  const auto keep = std::min(k, unique.size());
  std::partial_sort(unique.begin(), unique.begin() + static_cast<std::ptrdiff_t>(keep), unique.end(),
                    [](const BeamEntry& a, const BeamEntry& b) {
                      return ranks_before(a.score, a.text, b.score, b.text);
                    });
  unique.resize(keep);
  return unique;
}

using ScoreCache = std::unordered_map<TokenSequence, double, TokenSequenceHash>;

// Objective J over the tuning set for encoded sequences. Image norms are
// precomputed once; otherwise identical to objective().
class SequenceScorer {
 public:
  SequenceScorer(const Encoder& encoder, const TuningSet& tuning, SimilarityConfig cfg)
      : encoder_(&encoder), tuning_(&tuning), cfg_(cfg) {
    if (encoder.dim() != tuning.dim()) {
      throw Error(Errc::kDimMismatch, "encoder dim " + std::to_string(encoder.dim()) +
                                          " vs tuning dim " + std::to_string(tuning.dim()));
    }
    if (cfg_.measure == Measure::kCosine) {
      units_.reserve(tuning.size());
      for (const auto& image : tuning.embeddings()) units_.push_back(normalize(image));
    }
  }

  const Encoder& encoder() const noexcept { return *encoder_; }
  const TuningSet& tuning() const noexcept { return *tuning_; }
  const SimilarityConfig& config() const noexcept { return cfg_; }

  double score_embedding(const Embedding& e) const {
    if (cfg_.measure != Measure::kCosine) return objective(e, *tuning_, cfg_);
    const double n = e.norm();
    if (!(n > kNormTolerance)) throw Error(Errc::kZeroNorm, "encoder produced a zero vector");
    std::vector<double> sims;
    sims.reserve(units_.size());
    for (const auto& u : units_) {
      double c = std::clamp(dot(e, u) / n, -1.0, 1.0);
      if (cfg_.clip_at_zero) c = cfg_.scale * std::max(c, 0.0);
      sims.push_back(c);
    }
    return accurate_mean(std::move(sims));
  }

  std::vector<double> score(std::span<const TokenSequence> batch) const {
    const auto embeddings = encoder_->encode_sequences(batch);
    std::vector<double> out;
    out.reserve(embeddings.size());
    for (const auto& e : embeddings) out.push_back(score_embedding(e));
    return out;
  }

  double score(const TokenSequence& seq) const { return score(std::span(&seq, 1)).front(); }

 private:
  const Encoder* encoder_;
  const TuningSet* tuning_;
  SimilarityConfig cfg_;
  std::vector<Embedding> units_;
};

struct TokenRange {
  TokenId begin = 0;
  TokenId end = 0;  // exclusive
  std::size_t size() const noexcept { return end - begin; }
};

struct ScoredToken {
  TokenId token = 0;
  double score = 0.0;
  std::string text;
};

// Worker task: every single-token substitution of `base` at `position` with
// tokens from `shard`, returning the shard's k best in the global order.
// `cache` is read-only here; the boss owns all writes.
inline std::vector<ScoredToken> score_candidates(const TokenSequence& base, std::size_t position,
                                                 TokenRange shard, const SequenceScorer& scorer,
                                                 std::size_t k, const ScoreCache* cache = nullptr) {
  const auto& vocab = scorer.encoder().vocabulary();
  if (position >= base.size()) throw Error(Errc::kInvalidArgument, "position out of bounds");
  if (shard.size() == 0 || shard.end > vocab.size()) {
    throw Error(Errc::kInvalidArgument, "vocabulary shard is empty or out of range");
  }
  std::vector<TokenSequence> pending;
  std::vector<std::size_t> pending_slot;
  std::vector<ScoredToken> scored(shard.size());
  for (TokenId v = shard.begin; v < shard.end; ++v) {
    TokenSequence cand = base;
    cand.ids[position] = v;
    auto& slot = scored[v - shard.begin];
    slot.token = v;
    slot.text = detokenize(cand, vocab);
    if (cache) {
      if (auto it = cache->find(cand); it != cache->end()) {
        slot.score = it->second;
        continue;
      }
    }
    pending_slot.push_back(v - shard.begin);
    pending.push_back(std::move(cand));
  }
  if (!pending.empty()) {
    const auto scores = scorer.score(pending);
    for (std::size_t i = 0; i < pending.size(); ++i) scored[pending_slot[i]].score = scores[i];
  }
  std::vector<BeamEntry> entries;
  entries.reserve(scored.size());
  for (auto& s : scored) {
    TokenSequence seq;
    seq.ids = {s.token};
    entries.push_back({std::move(seq), s.score, std::move(s.text)});
  }
  auto best = topk_select(std::move(entries), k);
  std::vector<ScoredToken> out;
  out.reserve(best.size());
  for (auto& b : best) out.push_back({b.seq.ids.front(), b.score, std::move(b.text)});
  return out;
}

// Splits [0, vocab_size) into at most `shards` contiguous non-empty ranges.
inline std::vector<TokenRange> shard_vocabulary(std::size_t vocab_size, std::size_t shards) {
  shards = std::max<std::size_t>(1, std::min(shards, vocab_size));
  std::vector<TokenRange> out;
  out.reserve(shards);
  const std::size_t base = vocab_size / shards;
  const std::size_t extra = vocab_size % shards;
  std::size_t start = 0;
  for (std::size_t s = 0; s < shards; ++s) {
    const std::size_t len = base + (s < extra ? 1 : 0);
    out.push_back({static_cast<TokenId>(start), static_cast<TokenId>(start + len)});
    start += len;
  }
  return out;
}

inline std::vector<ScoredToken> merge_shard_results(std::vector<std::vector<ScoredToken>> parts,
                                                    std::size_t k) {
  std::vector<ScoredToken> all;
  for (auto& p : parts) {
    for (auto& s : p) all.push_back(std::move(s));
  }
  std::sort(all.begin(), all.end(), [](const ScoredToken& a, const ScoredToken& b) {
    if (ranks_before(a.score, a.text, b.score, b.text)) return true;
    if (ranks_before(b.score, b.text, a.score, a.text)) return false;
    return a.token < b.token;
  });
  std::vector<ScoredToken> out;
  for (auto& s : all) {
    if (out.size() == k) break;
    if (!out.empty() && out.back().text == s.text) continue;
    out.push_back(std::move(s));
  }
  return out;
}

namespace detail {

// Waits for a shard future; on failure re-runs the shard once, then gives up.
template <typename Task>
std::vector<ScoredToken> collect_with_retry(std::future<std::vector<ScoredToken>>& future,
                                            WorkerPool& pool, const Task& task, TokenRange shard) {
  try {
    return future.get();
  } catch (const std::exception& first) {
    auto retry = pool.submit(task);
    try {
      return retry.get();
    } catch (const std::exception& second) {
      throw Error(Errc::kWorkerFailure, "shard [" + std::to_string(shard.begin) + "," +
                                            std::to_string(shard.end) + ") failed twice: " +
                                            second.what());
    }
  }
}

}  // namespace detail

// Boss side: scores one position against the whole vocabulary, sharded over
// the pool. Equal to a sequential full scan's top-k for any worker count.
inline std::vector<ScoredToken> score_candidates_parallel(const TokenSequence& base, std::size_t position,
                                                          const SequenceScorer& scorer, std::size_t k,
                                                          WorkerPool& pool, const ScoreCache* cache = nullptr) {
  const auto shards = shard_vocabulary(scorer.encoder().vocabulary().size(), pool.size());
  std::vector<std::function<std::vector<ScoredToken>()>> tasks;
  std::vector<std::future<std::vector<ScoredToken>>> futures;
  for (const auto& shard : shards) {
    tasks.emplace_back([&base, position, shard, &scorer, k, cache] {
      return score_candidates(base, position, shard, scorer, k, cache);
    });
    futures.push_back(pool.submit(tasks.back()));
  }
  std::vector<std::vector<ScoredToken>> parts;
  for (std::size_t s = 0; s < shards.size(); ++s) {
    parts.push_back(detail::collect_with_retry(futures[s], pool, tasks[s], shards[s]));
  }
  return merge_shard_results(std::move(parts), k);
}

enum class PositionOrder { kRandom, kSequential };

struct SearchOptions {
  std::size_t beam_size = 5;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  // Unset: 10 * length * beam_size.
  std::optional<std::size_t> max_iterations;
  // kSequential with beam_size 1 is the greedy left-to-right baseline.
  PositionOrder position_order = PositionOrder::kRandom;
  // Expand every remaining position of a member in one pass instead of one.
  bool sweep_positions = false;
};

struct TrajectoryPoint {
  std::size_t iteration = 0;
  double best_score = 0.0;
  std::size_t substitutions = 0;  // cumulative
};

struct SearchReport {
  BeamEntry best;
  BeamEntry initial;
  std::size_t iterations = 0;
  std::size_t substitutions_applied = 0;
  std::size_t candidate_evaluations = 0;
  std::vector<TrajectoryPoint> trajectory;
  std::vector<BeamEntry> final_beam;
  double wall_time_seconds = 0.0;
};

// Beam local search over fixed-length token sequences. Each iteration draws
// one unexplored position per beam member, scores all |V| substitutions
// there, and keeps the top-k of beam plus candidates. Whenever the beam
// changes every member's position set is reset; the search stops once no
// member has an unexplored position left.
inline SearchReport beam_local_search(const TokenSequence& init, const SequenceScorer& scorer,
                                      const SearchOptions& options, WorkerPool* shared_pool = nullptr) {
  const auto start_time = std::chrono::steady_clock::now();
  if (options.beam_size < 1) throw Error(Errc::kInvalidBeamSize, "beam size must be >= 1");
  if (init.empty()) throw Error(Errc::kEmptySequence, "initial hub text is empty");
  const auto& vocab = scorer.encoder().vocabulary();
  for (TokenId id : init.ids) {
    if (id >= vocab.size()) throw Error(Errc::kInvalidArgument, "initial token id out of range");
  }
  const std::size_t k = options.beam_size;
  const std::size_t length = init.size();
  const std::size_t max_iterations = options.max_iterations.value_or(10 * length * k);

  std::optional<WorkerPool> own_pool;
  if (!shared_pool) own_pool.emplace(options.workers);
  WorkerPool& pool = shared_pool ? *shared_pool : *own_pool;

  std::mt19937_64 rng(options.seed);
  ScoreCache cache;

  auto full_positions = [length] {
    std::vector<std::size_t> all(length);
    for (std::size_t i = 0; i < length; ++i) all[i] = i;
    return all;
  };

  SearchReport report;
  BeamEntry first{init, scorer.score(init), detokenize(init, vocab)};
  cache.emplace(init, first.score);
  report.initial = first;
  std::vector<BeamEntry> beam{first};
  std::map<TokenSequence, std::vector<std::size_t>> remaining;
  remaining[init] = full_positions();

  auto converged = [&] {
    return std::all_of(beam.begin(), beam.end(),
                       [&](const BeamEntry& b) { return remaining[b.seq].empty(); });
  };

  std::size_t t = 0;
  while (!converged()) {
    if (t >= max_iterations) {
      throw Error(Errc::kTimeoutAbort, "beam search exceeded " + std::to_string(max_iterations) +
                                           " iterations");
    }
    ++t;
    std::vector<BeamEntry> candidates = beam;

    struct Expansion {
      const BeamEntry* member;
      std::size_t position;
    };
    std::vector<Expansion> expansions;
    for (const auto& member : beam) {
      auto& open = remaining[member.seq];
      if (open.empty()) continue;
      const std::size_t draws = options.sweep_positions ? open.size() : 1;
      for (std::size_t d = 0; d < draws; ++d) {
        std::size_t pick = 0;
        if (options.position_order == PositionOrder::kRandom) {
          std::uniform_int_distribution<std::size_t> dist(0, open.size() - 1);
          pick = dist(rng);
        }
        expansions.push_back({&member, open[pick]});
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
      }
    }

    // All shards of all expansions go to the pool together.
    const auto shards = shard_vocabulary(vocab.size(), pool.size());
    std::vector<std::function<std::vector<ScoredToken>()>> tasks;
    std::vector<std::future<std::vector<ScoredToken>>> futures;
    tasks.reserve(expansions.size() * shards.size());
    for (const auto& ex : expansions) {
      for (const auto& shard : shards) {
        tasks.emplace_back([&scorer, &cache, ex, shard, k] {
          return score_candidates(ex.member->seq, ex.position, shard, scorer, k, &cache);
        });
      }
    }
    for (const auto& task : tasks) futures.push_back(pool.submit(task));

    std::vector<std::pair<TokenSequence, double>> fresh;
    for (std::size_t e = 0; e < expansions.size(); ++e) {
      std::vector<std::vector<ScoredToken>> parts;
      for (std::size_t s = 0; s < shards.size(); ++s) {
        const std::size_t idx = e * shards.size() + s;
        parts.push_back(detail::collect_with_retry(futures[idx], pool, tasks[idx], shards[s]));
      }
      report.candidate_evaluations += vocab.size();
      for (auto& st : merge_shard_results(std::move(parts), k)) {
        TokenSequence seq = expansions[e].member->seq;
        seq.ids[expansions[e].position] = st.token;
        fresh.emplace_back(seq, st.score);
        candidates.push_back({std::move(seq), st.score, std::move(st.text)});
      }
    }
    for (auto& [seq, score] : fresh) cache.emplace(std::move(seq), score);

    auto next = topk_select(std::move(candidates), k);
    const bool changed =
        next.size() != beam.size() ||
        !std::equal(next.begin(), next.end(), beam.begin(),
                    [](const BeamEntry& a, const BeamEntry& b) { return a.seq == b.seq; });
    if (changed) {
      for (const auto& n : next) {
        const bool was_member = std::any_of(beam.begin(), beam.end(),
                                            [&](const BeamEntry& b) { return b.seq == n.seq; });
        if (!was_member) ++report.substitutions_applied;
      }
      remaining.clear();
      for (const auto& n : next) remaining[n.seq] = full_positions();
    }
    beam = std::move(next);
    report.trajectory.push_back({t, beam.front().score, report.substitutions_applied});
  }

  report.iterations = t;
  report.best = beam.front();
  report.final_beam = beam;
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return report;
}

inline void write_trajectory_csv(std::ostream& out, const SearchReport& report) {
  out << "iteration,best_score,substitutions\n";
  char buf[64];
  for (const auto& p : report.trajectory) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.best_score);
    out << p.iteration << ',' << buf << ',' << p.substitutions << '\n';
  }
}

}  // namespace hubtext
