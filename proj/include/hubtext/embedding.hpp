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
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hubtext/error.hpp"

namespace hubtext {

// Below this L2 norm a vector is treated as zero.
inline constexpr double kNormTolerance = 1e-12;

// Order-independent sum: the summands are sorted before Neumaier-compensated
// accumulation, so any permutation of the same values gives the same bits.
inline double accurate_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

inline double accurate_mean(std::vector<double> values) {
  const auto n = static_cast<double>(values.size());
  return accurate_sum(std::move(values)) / n;
}

// Fixed-dimension real vector shared by texts and images. Entries are always
// finite; arithmetic is done in double even when inputs arrive as float.
class Embedding {
 public:
  Embedding() = default;

  explicit Embedding(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
      throw Error(Errc::kInvalidArgument, "embedding must have dim >= 1");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) {
        throw Error(Errc::kNonFinite, "embedding entry is not finite");
      }
    }
  }

  Embedding(std::initializer_list<double> values)
      : Embedding(std::vector<double>(values)) {}

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double norm() const {
    double sq = 0.0;
    for (double v : values_) sq += v * v;
    return std::sqrt(sq);
  }

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<double> values_;
};

enum class Measure { kCosine, kInnerProduct, kNegSquaredEuclidean };

inline std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::kCosine: return "cosine";
    case Measure::kInnerProduct: return "inner-product";
    case Measure::kNegSquaredEuclidean: return "sqeuclidean";
  }
  return "unknown";
}

inline Measure parse_measure(std::string_view name) {
  if (name == "cosine") return Measure::kCosine;
  if (name == "inner-product" || name == "ip") return Measure::kInnerProduct;
  if (name == "sqeuclidean" || name == "neg-sqeuclidean") {
    return Measure::kNegSquaredEuclidean;
  }
  throw Error(Errc::kInvalidArgument, "unknown measure '" + std::string(name) + "'");
}

// The scale is applied only in CLIPScore mode (cosine with clip_at_zero).
struct SimilarityConfig {
  Measure measure = Measure::kCosine;
  double scale = 2.5;
  bool clip_at_zero = false;

  static SimilarityConfig clip_score_mode(double scale = 2.5) {
    return {Measure::kCosine, scale, true};
  }
};

inline void check_same_dim(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw Error(Errc::kDimMismatch, "dims " + std::to_string(a.dim()) + " and " +
                                        std::to_string(b.dim()) + " differ");
  }
}

inline double dot(const Embedding& a, const Embedding& b) {
  check_same_dim(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) sum += a[i] * b[i];
  return sum;
}

inline Embedding normalize(const Embedding& e) {
  const double n = e.norm();
  if (!(n > kNormTolerance)) {
    throw Error(Errc::kZeroNorm, "cannot normalize a zero-norm embedding");
  }
  std::vector<double> out(e.values().begin(), e.values().end());
  for (double& v : out) v /= n;
  return Embedding(std::move(out));
}

inline double cosine(const Embedding& a, const Embedding& b) {
  check_same_dim(a, b);
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > kNormTolerance) || !(nb > kNormTolerance)) {
    throw Error(Errc::kZeroNorm, "cosine of a zero-norm embedding");
  }
  const double c = dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

// CLIPScore: scale * max(cos, 0).
inline double clip_score(const Embedding& text, const Embedding& image,
                         const SimilarityConfig& cfg = SimilarityConfig::clip_score_mode()) {
  if (!(cfg.scale > 0.0)) {
    throw Error(Errc::kInvalidArgument, "CLIPScore scale must be positive");
  }
  return cfg.scale * std::max(cosine(text, image), 0.0);
}

inline double similarity(const Embedding& e, const Embedding& image,
                         const SimilarityConfig& cfg) {
  switch (cfg.measure) {
    case Measure::kCosine:
      return cfg.clip_at_zero ? clip_score(e, image, cfg) : cosine(e, image);
    case Measure::kInnerProduct:
      return dot(e, image);
    case Measure::kNegSquaredEuclidean: {
      check_same_dim(e, image);
      double sq = 0.0;
      for (std::size_t i = 0; i < e.dim(); ++i) {
        const double d = e[i] - image[i];
        sq += d * d;
      }
      return -sq;
    }
  }
  throw Error(Errc::kInvalidArgument, "unknown measure");
}

// Image embeddings the hub is optimized against.
class TuningSet {
 public:
  TuningSet(std::vector<Embedding> embeddings, std::vector<std::string> source_ids)
      : embeddings_(std::move(embeddings)), source_ids_(std::move(source_ids)) {
    if (embeddings_.empty()) {
      throw Error(Errc::kInvalidArgument, "tuning set is empty");
    }
    if (source_ids_.size() != embeddings_.size()) {
      throw Error(Errc::kInvalidArgument, "tuning ids and embeddings differ in length");
    }
    for (std::size_t i = 0; i < embeddings_.size(); ++i) {
      if (embeddings_[i].dim() != embeddings_.front().dim()) {
        throw Error(Errc::kDimMismatch, "tuning member '" + source_ids_[i] +
                                            "' has dim " +
                                            std::to_string(embeddings_[i].dim()));
      }
      if (!(embeddings_[i].norm() > kNormTolerance)) {
        throw Error(Errc::kZeroNorm, "tuning member '" + source_ids_[i] + "' has zero norm");
      }
    }
  }

  explicit TuningSet(std::vector<Embedding> embeddings)
      : TuningSet(embeddings, default_ids(embeddings.size())) {}

  std::size_t size() const noexcept { return embeddings_.size(); }
  std::size_t dim() const noexcept { return embeddings_.front().dim(); }
  const std::vector<Embedding>& embeddings() const noexcept { return embeddings_; }
  const std::vector<std::string>& source_ids() const noexcept { return source_ids_; }
  const Embedding& operator[](std::size_t i) const { return embeddings_[i]; }

 private:
  static std::vector<std::string> default_ids(std::size_t n) {
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    return ids;
  }

  std::vector<Embedding> embeddings_;
  std::vector<std::string> source_ids_;
};

// Mean similarity of e to every tuning image under cfg.
inline double objective(const Embedding& e, const TuningSet& tuning,
                        const SimilarityConfig& cfg) {
  if (e.dim() != tuning.dim()) {
    throw Error(Errc::kDimMismatch, "embedding dim " + std::to_string(e.dim()) +
                                        " vs tuning dim " + std::to_string(tuning.dim()));
  }
  std::vector<double> sims;
  sims.reserve(tuning.size());
  for (const auto& image : tuning.embeddings()) sims.push_back(similarity(e, image, cfg));
  return accurate_mean(std::move(sims));
}

// Coordinate-wise mean, order independent.
inline Embedding mean_embedding(std::span<const Embedding> members) {
  if (members.empty()) throw Error(Errc::kInvalidArgument, "mean of no embeddings");
  const std::size_t dim = members.front().dim();
  std::vector<double> out(dim);
  std::vector<double> column(members.size());
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (members[i].dim() != dim) throw Error(Errc::kDimMismatch, "mixed dims in mean");
      column[i] = members[i][d];
    }
    out[d] = accurate_mean(column);
  }
  return Embedding(std::move(out));
}

// Mean of the L2-normalized tuning images.
inline Embedding normalized_centroid(const TuningSet& tuning) {
  std::vector<Embedding> units;
  units.reserve(tuning.size());
  for (const auto& e : tuning.embeddings()) units.push_back(normalize(e));
  return mean_embedding(units);
}

}  // namespace hubtext
