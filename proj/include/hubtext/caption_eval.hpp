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

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "hubtext/embedding.hpp"
#include "hubtext/encoder.hpp"

namespace hubtext {

struct EvalPair {
  std::string image_id;
  Embedding image;
  std::map<std::string, std::string> captions;  // system name -> caption
};

// A captioning system under evaluation. A broadcast system uses one text
// (e.g. a hub text) for every image instead of per-image captions.
struct CaptionSystem {
  std::string name;
  std::optional<std::string> broadcast_text;

  static CaptionSystem per_image(std::string name) { return {std::move(name), std::nullopt}; }
  static CaptionSystem broadcast(std::string name, std::string text) {
    return {std::move(name), std::move(text)};
  }
};

// Per-pair CLIPScore of one system, in pair order.
inline std::vector<double> instance_clipscores(const std::vector<EvalPair>& pairs, const CaptionSystem& system,
                                               const Encoder& encoder,
                                               const SimilarityConfig& cfg = SimilarityConfig::clip_score_mode()) {
  if (pairs.empty()) throw Error(Errc::kInvalidArgument, "no evaluation pairs");
  std::vector<double> scores;
  scores.reserve(pairs.size());
  if (system.broadcast_text) {
    const Embedding text = encoder.encode_text(*system.broadcast_text);
    for (const auto& p : pairs) scores.push_back(clip_score(text, p.image, cfg));
    return scores;
  }
  std::vector<std::string> texts;
  texts.reserve(pairs.size());
  for (const auto& p : pairs) {
    auto it = p.captions.find(system.name);
    if (it == p.captions.end()) {
      throw Error(Errc::kInvalidArgument, "image '" + p.image_id + "' has no caption from '" + system.name + "'");
    }
    texts.push_back(it->second);
  }
  const auto embeddings = encoder.encode_texts(texts);
  for (std::size_t i = 0; i < pairs.size(); ++i) scores.push_back(clip_score(embeddings[i], pairs[i].image, cfg));
  return scores;
}

inline double corpus_clipscore(const std::vector<EvalPair>& pairs, const CaptionSystem& system,
                               const Encoder& encoder,
                               const SimilarityConfig& cfg = SimilarityConfig::clip_score_mode()) {
  return accurate_mean(instance_clipscores(pairs, system, encoder, cfg));
}

// Fraction of instances where a scores strictly above b.
inline double win_rate(const std::vector<double>& scores_a, const std::vector<double>& scores_b) {
  if (scores_a.size() != scores_b.size()) {
    throw Error(Errc::kLengthMismatch, "score lists differ in length");
  }
  if (scores_a.empty()) throw Error(Errc::kInvalidArgument, "empty score lists");
  std::size_t wins = 0;
  for (std::size_t i = 0; i < scores_a.size(); ++i) {
    if (scores_a[i] > scores_b[i]) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(scores_a.size());
}

inline double win_rate(const std::vector<EvalPair>& pairs, const CaptionSystem& a, const CaptionSystem& b,
                       const Encoder& encoder,
                       const SimilarityConfig& cfg = SimilarityConfig::clip_score_mode()) {
  return win_rate(instance_clipscores(pairs, a, encoder, cfg), instance_clipscores(pairs, b, encoder, cfg));
}

struct BootstrapResult {
  double p_value = 1.0;
  bool significant = false;  // p < 0.05
};

// Paired bootstrap: each resample draws n indices with replacement and
// compares the two means over the same indices. p is the fraction of
// resamples in which a does not beat b (ties count against a).
inline BootstrapResult paired_bootstrap(const std::vector<double>& scores_a, const std::vector<double>& scores_b,
                                        std::size_t resamples = 1000, std::uint64_t seed = 0) {
  if (scores_a.size() != scores_b.size()) {
    throw Error(Errc::kLengthMismatch, "score lists differ in length");
  }
  if (scores_a.size() < 2) throw Error(Errc::kInvalidArgument, "bootstrap needs at least 2 pairs");
  if (resamples < 1) throw Error(Errc::kInvalidArgument, "resamples must be >= 1");
  const std::size_t n = scores_a.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> sample_a(n);
  std::vector<double> sample_b(n);
  std::size_t not_better = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = pick(rng);
      sample_a[i] = scores_a[j];
      sample_b[i] = scores_b[j];
    }
    if (accurate_mean(sample_a) <= accurate_mean(sample_b)) ++not_better;
  }
  const double p = static_cast<double>(not_better) / static_cast<double>(resamples);
  return {p, p < 0.05};
}

// JSON-lines evaluation input; image_vec_ref names a row of the image
// fixture file.
inline std::vector<EvalPair> load_eval_pairs(const std::string& path, const TuningSet& images) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < images.size(); ++i) by_id.emplace(images.source_ids()[i], i);
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open evaluation pairs '" + path + "'");
  std::vector<EvalPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path + ":" + std::to_string(line_no);
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kParseError, where + ": " + e.what());
    }
    auto as_id = [&](const char* key) -> std::string {
      if (!row.contains(key)) throw Error(Errc::kParseError, where + ": missing '" + key + "'");
      const auto& v = row[key];
      return v.is_string() ? v.get<std::string>() : v.dump();
    };
    EvalPair pair;
    pair.image_id = as_id("image_id");
    const std::string ref = row.contains("image_vec_ref") ? as_id("image_vec_ref") : pair.image_id;
    auto it = by_id.find(ref);
    if (it == by_id.end()) throw Error(Errc::kParseError, where + ": unknown image_vec_ref '" + ref + "'");
    pair.image = images[it->second];
    if (!row.contains("captions") || !row["captions"].is_object()) {
      throw Error(Errc::kParseError, where + ": 'captions' must be an object");
    }
    for (const auto& [system, text] : row["captions"].items()) {
      if (!text.is_string()) throw Error(Errc::kParseError, where + ": caption for '" + system + "' is not a string");
      pair.captions[system] = text.get<std::string>();
    }
    pairs.push_back(std::move(pair));
  }
  if (pairs.empty()) throw Error(Errc::kEmptyFile, "evaluation pairs file '" + path + "' is empty");
  const auto& first = pairs.front().captions;
  for (const auto& p : pairs) {
    for (const auto& [system, text] : first) {
      if (!p.captions.count(system)) {
        throw Error(Errc::kParseError, "image '" + p.image_id + "' lacks system '" + system + "'");
      }
    }
    if (p.captions.size() != first.size()) {
      throw Error(Errc::kParseError, "image '" + p.image_id + "' has a different system set");
    }
  }
  return pairs;
}

}  // namespace hubtext
