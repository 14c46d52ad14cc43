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
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hubtext/embedding.hpp"
#include "hubtext/encoder.hpp"

namespace hubtext {

struct Document {
  std::string id;
  Embedding embedding;
  std::string text;
};

class RetrievalIndex {
 public:
  RetrievalIndex() = default;
  explicit RetrievalIndex(std::vector<Document> docs) {
    for (auto& d : docs) add(std::move(d));
  }

  void add(Document doc) {
    if (!docs_.empty() && doc.embedding.dim() != dim()) {
      throw Error(Errc::kDimMismatch, "document '" + doc.id + "' has dim " +
                                          std::to_string(doc.embedding.dim()));
    }
    if (!(doc.embedding.norm() > kNormTolerance)) {
      throw Error(Errc::kZeroNorm, "document '" + doc.id + "' has zero norm");
    }
    if (!ids_.insert(doc.id).second) {
      throw Error(Errc::kInvalidArgument, "duplicate document id '" + doc.id + "'");
    }
    norms_.push_back(doc.embedding.norm());
    docs_.push_back(std::move(doc));
  }

  std::size_t size() const noexcept { return docs_.size(); }
  std::size_t dim() const { return docs_.empty() ? 0 : docs_.front().embedding.dim(); }
  const std::vector<Document>& docs() const noexcept { return docs_; }
  bool contains(const std::string& id) const { return ids_.count(id) != 0; }
  double norm(std::size_t i) const { return norms_[i]; }

 private:
  std::vector<Document> docs_;
  std::vector<double> norms_;
  std::unordered_set<std::string> ids_;
};

// Encodes `text` rows ("doc_id\ttext" TSV) into an index.
inline RetrievalIndex build_index(const std::vector<std::pair<std::string, std::string>>& rows,
                                  const Encoder& encoder) {
  std::vector<std::string> texts;
  texts.reserve(rows.size());
  for (const auto& r : rows) texts.push_back(r.second);
  auto embeddings = encoder.encode_texts(texts);
  RetrievalIndex index;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    index.add({rows[i].first, std::move(embeddings[i]), rows[i].second});
  }
  return index;
}

struct ContaminationConfig {
  std::string hub_text;
  std::size_t count = 0;
};

inline std::string hub_doc_id(std::size_t i) { return "hub#" + std::to_string(i); }

// Appends `count` copies of an already encoded hub text.
inline RetrievalIndex contaminate(const RetrievalIndex& index, const std::string& hub_text,
                                  const Embedding& hub_embedding, std::size_t count) {
  RetrievalIndex out = index;
  for (std::size_t i = 0; i < count; ++i) out.add({hub_doc_id(i), hub_embedding, hub_text});
  return out;
}

inline RetrievalIndex contaminate(const RetrievalIndex& index, const ContaminationConfig& cfg,
                                  const Encoder& encoder) {
  if (cfg.count == 0) return index;
  return contaminate(index, cfg.hub_text, encoder.encode_text(cfg.hub_text), cfg.count);
}

// Exhaustive cosine ranking; ties broken by ascending doc id.
inline std::vector<std::string> retrieve_topk(const RetrievalIndex& index, const Embedding& query,
                                              std::size_t k) {
  if (k < 1) throw Error(Errc::kInvalidArgument, "k must be >= 1");
  if (index.size() == 0) return {};
  if (query.dim() != index.dim()) {
    throw Error(Errc::kDimMismatch, "query dim " + std::to_string(query.dim()) + " vs index dim " +
                                        std::to_string(index.dim()));
  }
  const double qn = query.norm();
  if (!(qn > kNormTolerance)) throw Error(Errc::kZeroNorm, "query has zero norm");
  std::vector<std::pair<double, const std::string*>> scored;
  scored.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto& d = index.docs()[i];
    scored.emplace_back(dot(query, d.embedding) / (qn * index.norm(i)), &d.id);
  }
  const auto keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return *a.second < *b.second;
                    });
  std::vector<std::string> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(*scored[i].second);
  return out;
}

using Qrels = std::map<std::string, std::set<std::string>>;
using Rankings = std::map<std::string, std::vector<std::string>>;

enum class IrMetric { kNdcg, kMap, kRecall, kPrecision, kMrr };

inline std::string_view ir_metric_name(IrMetric m) {
  switch (m) {
    case IrMetric::kNdcg: return "NDCG";
    case IrMetric::kMap: return "MAP";
    case IrMetric::kRecall: return "Recall";
    case IrMetric::kPrecision: return "Precision";
    case IrMetric::kMrr: return "MRR";
  }
  return "?";
}

struct Cutoff {
  IrMetric metric;
  std::size_t depth;
  std::string key() const { return std::string(ir_metric_name(metric)) + "@" + std::to_string(depth); }
};

inline std::vector<Cutoff> default_cutoffs() {
  return {{IrMetric::kNdcg, 1},      {IrMetric::kNdcg, 10},     {IrMetric::kMap, 1},
          {IrMetric::kMap, 10},      {IrMetric::kRecall, 1},    {IrMetric::kRecall, 1000},
          {IrMetric::kPrecision, 1}, {IrMetric::kPrecision, 5}, {IrMetric::kMrr, 1},
          {IrMetric::kMrr, 10}};
}

inline std::size_t max_depth(const std::vector<Cutoff>& cutoffs) {
  std::size_t d = 1;
  for (const auto& c : cutoffs) d = std::max(d, c.depth);
  return d;
}

// Metric key ("NDCG@10") -> value averaged over queries.
using MetricsReport = std::map<std::string, double>;

// Binary-relevance score of one ranked list at one cutoff.
inline double query_metric(const std::vector<std::string>& ranking, const std::set<std::string>& relevant,
                           const Cutoff& cutoff) {
  const std::size_t c = cutoff.depth;
  const std::size_t depth = std::min(c, ranking.size());
  std::size_t hits = 0;
  double dcg = 0.0;
  double precision_sum = 0.0;
  double reciprocal_rank = 0.0;
  for (std::size_t r = 0; r < depth; ++r) {
    if (!relevant.count(ranking[r])) continue;
    ++hits;
    const double rank = static_cast<double>(r + 1);
    dcg += 1.0 / std::log2(rank + 1.0);
    precision_sum += static_cast<double>(hits) / rank;
    if (reciprocal_rank == 0.0) reciprocal_rank = 1.0 / rank;
  }
  const std::size_t ideal_hits = std::min(relevant.size(), c);
  switch (cutoff.metric) {
    case IrMetric::kNdcg: {
      double idcg = 0.0;
      for (std::size_t r = 1; r <= ideal_hits; ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
      return dcg / idcg;
    }
    case IrMetric::kMap:
      return precision_sum / static_cast<double>(ideal_hits);
    case IrMetric::kRecall:
      return static_cast<double>(hits) / static_cast<double>(relevant.size());
    case IrMetric::kPrecision:
      return static_cast<double>(hits) / static_cast<double>(c);
    case IrMetric::kMrr:
      return reciprocal_rank;
  }
  return 0.0;
}

inline MetricsReport compute_ir_metrics(const Rankings& rankings, const Qrels& qrels,
                                        const std::vector<Cutoff>& cutoffs = default_cutoffs()) {
  if (qrels.empty()) throw Error(Errc::kInvalidArgument, "no queries with relevance judgments");
  MetricsReport report;
  for (const auto& cutoff : cutoffs) {
    if (cutoff.depth < 1) throw Error(Errc::kInvalidArgument, "cutoff must be >= 1");
    std::vector<double> per_query;
    per_query.reserve(qrels.size());
    for (const auto& [qid, relevant] : qrels) {
      if (relevant.empty()) throw Error(Errc::kInvalidArgument, "query '" + qid + "' has no relevant docs");
      auto it = rankings.find(qid);
      if (it == rankings.end()) throw Error(Errc::kMissingRanking, "no ranking for query '" + qid + "'");
      per_query.push_back(query_metric(it->second, relevant, cutoff));
    }
    report[cutoff.key()] = accurate_mean(std::move(per_query));
  }
  return report;
}

struct QuerySet {
  std::vector<std::pair<std::string, Embedding>> queries;
  Qrels qrels;
};

inline Rankings rank_all(const RetrievalIndex& index, const QuerySet& queries, std::size_t depth) {
  Rankings out;
  for (const auto& [qid, q] : queries.queries) out[qid] = retrieve_topk(index, q, depth);
  return out;
}

struct ContaminationRow {
  std::size_t count = 0;
  MetricsReport metrics;
};

// One metrics row per contamination level; the hub text is encoded once.
inline std::vector<ContaminationRow> run_contamination_experiment(
    const RetrievalIndex& index, const QuerySet& queries, const std::string& hub_text,
    const std::vector<std::size_t>& counts, const Encoder& encoder,
    const std::vector<Cutoff>& cutoffs = default_cutoffs()) {
  if (!std::is_sorted(counts.begin(), counts.end())) {
    throw Error(Errc::kInvalidArgument, "contamination counts must be ascending");
  }
  for (const auto& [qid, rel] : queries.qrels) {
    for (const auto& doc : rel) {
      if (!index.contains(doc)) {
        throw Error(Errc::kInvalidArgument, "qrels for '" + qid + "' name unknown doc '" + doc + "'");
      }
    }
  }
  const bool needs_hub = std::any_of(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
  std::optional<Embedding> hub;
  if (needs_hub) hub = encoder.encode_text(hub_text);
  const std::size_t depth = max_depth(cutoffs);
  std::vector<ContaminationRow> rows;
  for (std::size_t count : counts) {
    const RetrievalIndex contaminated = count == 0 ? index : contaminate(index, hub_text, *hub, count);
    rows.push_back({count, compute_ir_metrics(rank_all(contaminated, queries, depth), queries.qrels, cutoffs)});
  }
  return rows;
}

// Qrels TSV: `query_id\tdoc_id`, one relevant pair per line.
inline Qrels load_qrels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open qrels file '" + path + "'");
  Qrels qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw Error(Errc::kParseError, path + ":" + std::to_string(line_no) + ": expected 'query\\tdoc'");
    }
    qrels[line.substr(0, tab)].insert(line.substr(tab + 1));
  }
  if (qrels.empty()) throw Error(Errc::kEmptyFile, "qrels file '" + path + "' is empty");
  return qrels;
}

// Documents TSV: `doc_id\ttext`.
inline std::vector<std::pair<std::string, std::string>> load_documents(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open documents file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw Error(Errc::kParseError, path + ":" + std::to_string(line_no) + ": expected 'doc\\ttext'");
    }
    rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  if (rows.empty()) throw Error(Errc::kEmptyFile, "documents file '" + path + "' is empty");
  return rows;
}

}  // namespace hubtext
