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

// hubtext: batch entry point for hub acquisition, search and evaluation.
//
// Exit status: 0 on success, 1 when arguments or referenced files are
// invalid, 2 when a command fails at run time (encoder, parse, search).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <CLI11.hpp>
#include "hubtext/hubtext.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

// Thrown for problems that are the caller's fault but only show up after
// parsing, e.g. a search file without the requested k.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  // encoder
  std::string encoder = "toy";
  std::string vocab;
  std::size_t dim = 64;
  std::uint64_t encoder_seed = 2024;
  std::string bridge_cmd;
  std::string bridge_addr;
  std::size_t max_batch = 256;
  int timeout_ms = 60000;
  // similarity
  std::string measure = "cosine";
  double scale = 2.5;
  bool clip = false;
  double norm_budget = 1.0;
  // run
  std::uint64_t seed = 0;
  std::size_t workers = hubtext::WorkerPool::default_workers();
  std::string out = "out";
  // inputs
  std::string tuning;
  std::string hub;
  std::string hypotheses;
  std::string corpus;
  std::size_t top_n = 10;
  bool lenient = false;
  std::string init;
  std::string init_text;
  std::vector<std::size_t> ks{5};
  std::optional<std::size_t> max_iterations;
  bool sequential = false;
  bool sweep = false;
  std::string search;
  std::optional<std::size_t> export_k;
  std::string hub_text;
  std::string pairs;
  std::string images;
  std::size_t resamples = 1000;
  std::string docs;
  std::string queries;
  std::string qrels;
  std::vector<std::size_t> counts{0, 1, 1000};
};

hubtext::SimilarityConfig similarity(const Settings& s) {
  hubtext::SimilarityConfig cfg;
  cfg.measure = hubtext::parse_measure(s.measure);
  cfg.scale = s.scale;
  cfg.clip_at_zero = s.clip;
  return cfg;
}

std::unique_ptr<hubtext::Encoder> make_encoder(const Settings& s) {
  if (s.encoder == "toy") {
    if (s.vocab.empty()) throw UsageError("the toy encoder needs --vocab");
    return std::make_unique<hubtext::ToyEncoder>(hubtext::Vocabulary::from_file(s.vocab), s.dim, s.encoder_seed);
  }
  std::unique_ptr<hubtext::LineChannel> channel;
  if (!s.bridge_cmd.empty()) {
    channel = std::make_unique<hubtext::SubprocessChannel>(s.bridge_cmd);
  } else if (!s.bridge_addr.empty()) {
    channel = hubtext::TcpChannel::connect(s.bridge_addr);
  } else {
    throw UsageError("the remote encoder needs --bridge-cmd or --bridge-addr");
  }
  hubtext::RemoteOptions opts;
  opts.max_batch = s.max_batch;
  opts.timeout = std::chrono::milliseconds(s.timeout_ms);
  auto enc = std::make_unique<hubtext::RemoteEncoder>(std::move(channel), opts);
  if (!s.vocab.empty()) {
    enc->set_vocabulary(hubtext::Vocabulary::from_file(s.vocab));
  } else {
    enc->fetch_vocabulary();
  }
  return enc;
}

json vec_json(const hubtext::Embedding& e) { return json(std::vector<double>(e.values().begin(), e.values().end())); }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hubtext::Error(hubtext::Errc::kIoError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw hubtext::Error(hubtext::Errc::kParseError, path + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw hubtext::Error(hubtext::Errc::kIoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw hubtext::Error(hubtext::Errc::kIoError, "write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

fs::path out_dir(const Settings& s) {
  fs::create_directories(s.out);
  return s.out;
}

json encoder_json(const hubtext::Encoder& enc) {
  return {{"descriptor", enc.describe()}, {"dim", enc.dim()}, {"vocabulary_size", enc.vocabulary().size()}};
}

// Hub text for evaluation: an explicit string, or the overall best of a
// search result file.
std::string resolve_hub_text(const Settings& s) {
  if (!s.hub_text.empty()) return s.hub_text;
  if (s.search.empty()) throw UsageError("give --hub-text or --search");
  const auto j = read_json(s.search);
  if (!j.contains("best") || !j["best"].contains("text")) {
    throw hubtext::Error(hubtext::Errc::kParseError, s.search + ": no best.text");
  }
  return j["best"]["text"].get<std::string>();
}

int cmd_hub_embed(const Settings& s) {
  const auto tuning = hubtext::load_image_fixtures(s.tuning);
  const auto cfg = similarity(s);
  const auto hub = hubtext::optimal_hub(tuning, cfg, s.norm_budget);
  json j = {{"measure", std::string(hubtext::measure_name(hub.measure))},
            {"objective", hub.objective_value},
            {"degenerate", hub.degenerate},
            {"tuning_size", tuning.size()},
            {"embedding", vec_json(hub.embedding)}};
  if (cfg.measure == hubtext::Measure::kInnerProduct) j["norm_budget"] = s.norm_budget;
  write_json(out_dir(s) / "hub.json", j);
  std::printf("hub over %zu images (%s): objective %.6f%s\n", tuning.size(),
              std::string(hubtext::measure_name(hub.measure)).c_str(), hub.objective_value,
              hub.degenerate ? " [degenerate]" : "");
  return kExitOk;
}

int cmd_init(const Settings& s) {
  if (s.hypotheses.empty() == s.corpus.empty()) throw UsageError("give exactly one of --hypotheses or --corpus");
  const auto tuning = hubtext::load_image_fixtures(s.tuning);
  const auto enc = make_encoder(s);
  const hubtext::SequenceScorer scorer(*enc, tuning, similarity(s));
  hubtext::WorkerPool pool(s.workers);
  const auto policy = s.lenient ? hubtext::UnknownTokenPolicy::kLenient : hubtext::UnknownTokenPolicy::kStrict;
  auto warn = [](const std::string& msg) { std::fprintf(stderr, "warning: %s\n", msg.c_str()); };

  std::vector<hubtext::ScoredHypothesis> ranked;
  hubtext::Provenance provenance;
  if (!s.hypotheses.empty()) {
    const auto set = hubtext::load_hypotheses(s.hypotheses, enc->vocabulary(), policy, warn);
    const auto scores = hubtext::score_hypotheses(set.hypotheses, scorer, &pool);
    for (std::size_t i = 0; i < scores.size(); ++i) ranked.push_back({set.hypotheses[i], scores[i]});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.score > b.score; });
    provenance = set.provenance;
  } else {
    const auto lines = hubtext::read_lines(s.corpus);
    ranked = hubtext::rank_corpus(lines, scorer, s.top_n, policy, &pool, warn);
    provenance = hubtext::Provenance::kCorpusFallback;
  }

  std::optional<hubtext::Embedding> hub;
  if (!s.hub.empty()) hub = hubtext::Embedding(read_json(s.hub).at("embedding").get<std::vector<double>>());
  json candidates = json::array();
  for (const auto& r : ranked) {
    json c = {{"text", r.hypothesis.text}, {"score", r.score}};
    if (hub) c["hub_cosine"] = hubtext::cosine(enc->encode(r.hypothesis.seq), *hub);
    candidates.push_back(c);
  }
  const json j = {{"provenance", std::string(hubtext::provenance_name(provenance))},
                  {"best", candidates.front()},
                  {"candidates", candidates},
                  {"encoder", encoder_json(*enc)}};
  write_json(out_dir(s) / "init.json", j);
  std::printf("init (%s): %s  J=%.6f\n", std::string(hubtext::provenance_name(provenance)).c_str(),
              ranked.front().hypothesis.text.c_str(), ranked.front().score);
  return kExitOk;
}

json trajectory_json(const hubtext::SearchReport& r) {
  json rows = json::array();
  for (const auto& p : r.trajectory) rows.push_back({p.iteration, p.best_score, p.substitutions});
  return rows;
}

int cmd_search(const Settings& s) {
  std::string init_text = s.init_text;
  if (init_text.empty()) {
    if (s.init.empty()) throw UsageError("give --init or --init-text");
    init_text = read_json(s.init).at("best").at("text").get<std::string>();
  }
  const auto tuning = hubtext::load_image_fixtures(s.tuning);
  const auto enc = make_encoder(s);
  const auto cfg = similarity(s);
  const hubtext::SequenceScorer scorer(*enc, tuning, cfg);
  const auto init = hubtext::tokenize(init_text, enc->vocabulary());
  hubtext::WorkerPool pool(s.workers);

  json runs = json::array();
  json timing = json::object();
  std::optional<std::size_t> best_run;
  double best_score = 0.0;
  for (std::size_t i = 0; i < s.ks.size(); ++i) {
    hubtext::SearchOptions opts;
    opts.beam_size = s.ks[i];
    opts.seed = s.seed;
    opts.workers = s.workers;
    opts.max_iterations = s.max_iterations;
    opts.position_order = s.sequential ? hubtext::PositionOrder::kSequential : hubtext::PositionOrder::kRandom;
    opts.sweep_positions = s.sweep;
    const auto report = hubtext::beam_local_search(init, scorer, opts, &pool);
    json beam = json::array();
    for (const auto& b : report.final_beam) beam.push_back({{"text", b.text}, {"score", b.score}});
    runs.push_back({{"k", s.ks[i]},
                    {"best", {{"text", report.best.text}, {"score", report.best.score}}},
                    {"initial", {{"text", report.initial.text}, {"score", report.initial.score}}},
                    {"iterations", report.iterations},
                    {"substitutions_applied", report.substitutions_applied},
                    {"candidate_evaluations", report.candidate_evaluations},
                    {"final_beam", beam},
                    {"trajectory", trajectory_json(report)}});
    timing[std::to_string(s.ks[i])] = report.wall_time_seconds;
    // Earliest k wins ties so the choice does not depend on timing.
    if (!best_run || report.best.score > best_score) {
      best_run = i;
      best_score = report.best.score;
    }
    std::printf("k=%zu: %s  J=%.6f  (%zu iterations, %zu substitutions)\n", s.ks[i], report.best.text.c_str(),
                report.best.score, report.iterations, report.substitutions_applied);
  }
  const auto& winner = runs[*best_run];
  const json j = {{"seed", s.seed},
                  {"measure", s.measure},
                  {"clip_at_zero", s.clip},
                  {"encoder", encoder_json(*enc)},
                  {"runs", runs},
                  {"best", {{"k", winner["k"]}, {"text", winner["best"]["text"]}, {"score", winner["best"]["score"]}}}};
  const auto dir = out_dir(s);
  write_json(dir / "search.json", j);
  // Wall times live apart so search.json stays identical across reruns.
  write_json(dir / "search_timing.json", {{"wall_time_seconds", timing}});
  std::printf("best: k=%zu  %s  J=%.6f\n", winner["k"].get<std::size_t>(),
              winner["best"]["text"].get<std::string>().c_str(), best_score);
  return kExitOk;
}

int cmd_export_trajectory(const Settings& s) {
  const auto j = read_json(s.search);
  const std::size_t k = s.export_k.value_or(j.at("best").at("k").get<std::size_t>());
  const json* run = nullptr;
  for (const auto& r : j.at("runs")) {
    if (r.at("k").get<std::size_t>() == k) run = &r;
  }
  if (!run) throw UsageError(s.search + " has no run with k=" + std::to_string(k));

  hubtext::SearchReport report;
  for (const auto& row : run->at("trajectory")) {
    report.trajectory.push_back({row[0].get<std::size_t>(), row[1].get<double>(), row[2].get<std::size_t>()});
  }
  std::optional<double> wall;
  const auto timing_path = fs::path(s.search).parent_path() / "search_timing.json";
  if (fs::exists(timing_path)) {
    const auto t = read_json(timing_path.string());
    const auto key = std::to_string(k);
    if (t.contains("wall_time_seconds") && t["wall_time_seconds"].contains(key)) {
      wall = t["wall_time_seconds"][key].get<double>();
    }
  }

  const auto dir = out_dir(s);
  const auto stem = "trajectory_k" + std::to_string(k);
  std::ostringstream csv;
  hubtext::write_trajectory_csv(csv, report);
  write_text(dir / (stem + ".csv"), csv.str());
  json meta = {{"seed", j.at("seed")},
               {"k", k},
               {"measure", j.at("measure")},
               {"clip_at_zero", j.at("clip_at_zero")},
               {"encoder", j.at("encoder").at("descriptor")},
               {"iterations", run->at("iterations")},
               {"best_text", run->at("best").at("text")},
               {"best_score", run->at("best").at("score")},
               {"wall_time_seconds", wall ? json(*wall) : json(nullptr)}};
  write_json(dir / (stem + ".json"), meta);
  std::printf("wrote %s.csv (%zu rows)\n", (dir / stem).string().c_str(), report.trajectory.size());
  return kExitOk;
}

int cmd_eval_caption(const Settings& s) {
  const auto hub_text = resolve_hub_text(s);
  const auto images = hubtext::load_image_fixtures(s.images);
  const auto pairs = hubtext::load_eval_pairs(s.pairs, images);
  const auto enc = make_encoder(s);
  auto cfg = similarity(s);
  cfg.clip_at_zero = true;

  std::set<std::string> names;
  for (const auto& p : pairs) {
    for (const auto& [name, _] : p.captions) names.insert(name);
  }
  if (names.count("hub")) throw hubtext::Error(hubtext::Errc::kInvalidArgument, "pairs already contain a 'hub' system");

  const auto hub = hubtext::CaptionSystem::broadcast("hub", hub_text);
  const auto hub_scores = hubtext::instance_clipscores(pairs, hub, *enc, cfg);
  json systems = {{"hub", {{"corpus_clipscore", hubtext::accurate_mean(hub_scores)}, {"text", hub_text}}}};
  json comparisons = json::array();
  std::printf("%-12s %.6f  (%s)\n", "hub", hubtext::accurate_mean(hub_scores), hub_text.c_str());
  for (const auto& name : names) {
    const auto scores = hubtext::instance_clipscores(pairs, hubtext::CaptionSystem::per_image(name), *enc, cfg);
    const double corpus = hubtext::accurate_mean(scores);
    systems[name] = {{"corpus_clipscore", corpus}};
    const auto boot = hubtext::paired_bootstrap(hub_scores, scores, s.resamples, s.seed);
    const double win = hubtext::win_rate(hub_scores, scores);
    comparisons.push_back({{"a", "hub"},
                           {"b", name},
                           {"win_rate", win},
                           {"p_value", boot.p_value},
                           {"significant", boot.significant}});
    std::printf("%-12s %.6f  hub win rate %.3f  p=%.4f\n", name.c_str(), corpus, win, boot.p_value);
  }
  const json j = {{"pairs", pairs.size()},
                  {"scale", cfg.scale},
                  {"resamples", s.resamples},
                  {"seed", s.seed},
                  {"encoder", encoder_json(*enc)},
                  {"systems", systems},
                  {"comparisons", comparisons}};
  write_json(out_dir(s) / "eval_caption.json", j);
  return kExitOk;
}

int cmd_eval_retrieval(const Settings& s) {
  const auto hub_text = resolve_hub_text(s);
  const auto enc = make_encoder(s);
  const auto index = hubtext::build_index(hubtext::load_documents(s.docs), *enc);
  const auto query_set = hubtext::load_image_fixtures(s.queries);
  hubtext::QuerySet qs;
  for (std::size_t i = 0; i < query_set.size(); ++i) qs.queries.emplace_back(query_set.source_ids()[i], query_set[i]);
  qs.qrels = hubtext::load_qrels(s.qrels);

  const auto rows = hubtext::run_contamination_experiment(index, qs, hub_text, s.counts, *enc);
  json out_rows = json::array();
  for (const auto& row : rows) {
    out_rows.push_back({{"count", row.count}, {"metrics", row.metrics}});
    std::printf("#CT=%-6zu", row.count);
    for (const auto& key : {"Precision@1", "Recall@10", "NDCG@10", "MRR@10"}) {
      if (row.metrics.count(key)) std::printf("  %s %.4f", key, row.metrics.at(key));
    }
    std::printf("\n");
  }
  const json j = {{"hub_text", hub_text},
                  {"documents", index.size()},
                  {"queries", qs.queries.size()},
                  {"encoder", encoder_json(*enc)},
                  {"rows", out_rows}};
  write_json(out_dir(s) / "eval_retrieval.json", j);
  return kExitOk;
}


// Input paths are checked only for the command that runs, so one config file
// can describe a whole pipeline whose later inputs do not exist yet.
void check_input_paths(const CLI::App& app, const CLI::App& cmd) {
  static const std::set<std::string> kPathOptions = {"vocab", "tuning", "hypotheses", "corpus", "hub", "init",
                                                     "search", "pairs", "images", "docs", "queries", "qrels"};
  for (const auto* from : {&app, &cmd}) {
    for (const auto* opt : from->get_options()) {
      if (opt->count() == 0 || !kPathOptions.count(opt->get_single_name())) continue;
      const auto& path = opt->results().front();
      if (!fs::is_regular_file(path)) {
        throw UsageError("--" + opt->get_single_name() + ": file does not exist: " + path);
      }
    }
  }
}

std::string toml_value(const std::string& v) {
  if (v == "true" || v == "false" || (!v.empty() && v.front() == '[')) return v;
  char* end = nullptr;
  std::strtod(v.c_str(), &end);
  if (!v.empty() && end && *end == '\0') return v;
  return json(v).dump();
}

// Every option that has a value, given or default, as TOML that --config
// reads back.
std::string resolved_config(const CLI::App& app, const CLI::App& cmd) {
  std::ostringstream out;
  auto emit = [&out](const CLI::App& from) {
    for (const auto* opt : from.get_options()) {
      if (!opt->get_configurable() || opt->get_single_name() == "help" || opt->get_single_name() == "config") continue;
      std::string value;
      if (opt->count() > 0) {
        const auto& r = opt->results();
        if (opt->get_items_expected_max() > 1 || r.size() > 1) {
          value = "[";
          for (std::size_t i = 0; i < r.size(); ++i) value += (i ? "," : "") + toml_value(r[i]);
          value += "]";
        } else {
          value = opt->get_expected_min() == 0 ? (opt->as<bool>() ? "true" : "false") : r.front();
        }
      } else {
        value = opt->get_default_str();
      }
      if (value.empty()) continue;
      out << opt->get_single_name() << " = " << toml_value(value) << "\n";
    }
  };
  emit(app);
  out << "\n[" << cmd.get_name() << "]\n";
  emit(cmd);
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hubtext: find and evaluate hub texts for cross-modal encoders"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; flags given on the command line win");
  Settings s;

  app.add_option("--encoder", s.encoder, "toy or remote")->check(CLI::IsMember({"toy", "remote"}))->capture_default_str();
  app.add_option("--vocab", s.vocab, "vocabulary file, one token per line");
  app.add_option("--dim", s.dim, "toy encoder dimension")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--encoder-seed", s.encoder_seed, "toy encoder seed")->capture_default_str();
  app.add_option("--bridge-cmd", s.bridge_cmd, "command that starts a bridge process");
  app.add_option("--bridge-addr", s.bridge_addr, "host:port of a running bridge");
  app.add_option("--max-batch", s.max_batch, "bridge request batch limit")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--timeout-ms", s.timeout_ms, "bridge reply timeout")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--measure", s.measure, "cosine, inner-product or sqeuclidean")
      ->check(CLI::IsMember({"cosine", "inner-product", "ip", "sqeuclidean"}))
      ->capture_default_str();
  app.add_option("--scale", s.scale, "CLIPScore scale M")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--clip", s.clip, "optimize clipped, scaled cosine instead of raw cosine");
  app.add_option("--norm-budget", s.norm_budget, "norm of the inner-product hub")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", s.seed, "seed for search and bootstrap")->capture_default_str();
  app.add_option("--workers", s.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", s.out, "output directory")->capture_default_str();

  auto* hub_embed = app.add_subcommand("hub-embed", "closed-form hub embedding of a tuning set");
  hub_embed->add_option("--tuning", s.tuning, "tuning image fixtures")->required();

  auto* init = app.add_subcommand("init", "pick an initial hub text");
  init->add_option("--tuning", s.tuning, "tuning image fixtures")->required();
  init->add_option("--hypotheses", s.hypotheses, "inversion hypotheses, one per line");
  init->add_option("--corpus", s.corpus, "text corpus for the fallback");
  init->add_option("--top-n", s.top_n, "corpus texts to keep")->check(CLI::PositiveNumber)->capture_default_str();
  init->add_option("--hub", s.hub, "hub.json, reports each candidate's cosine to the hub");
  init->add_flag("--lenient", s.lenient, "drop texts with unknown tokens instead of failing");

  auto* search = app.add_subcommand("search", "beam local search from an initial text");
  search->add_option("--tuning", s.tuning, "tuning image fixtures")->required();
  search->add_option("--init", s.init, "init.json from the init command");
  search->add_option("--init-text", s.init_text, "initial text, overrides --init");
  search->add_option("-k,--k", s.ks, "beam sizes, e.g. 5,10,20")->delimiter(',')->check(CLI::PositiveNumber)->capture_default_str();
  search->add_option("--max-iterations", s.max_iterations, "abort after this many iterations")->check(CLI::PositiveNumber);
  search->add_flag("--sequential", s.sequential, "visit positions left to right");
  search->add_flag("--sweep", s.sweep, "expand every open position per iteration");

  auto* traj = app.add_subcommand("export-trajectory", "trajectory CSV and metadata for one search run");
  traj->add_option("--search", s.search, "search.json")->required();
  traj->add_option("--k", s.export_k, "beam size to export; default is the best run")->check(CLI::PositiveNumber);

  auto* caption = app.add_subcommand("eval-caption", "corpus CLIPScore, win rates and bootstrap tests");
  caption->add_option("--pairs", s.pairs, "evaluation pairs (JSON lines)")->required();
  caption->add_option("--images", s.images, "image fixtures referenced by the pairs")->required();
  caption->add_option("--hub-text", s.hub_text, "hub text to broadcast");
  caption->add_option("--search", s.search, "take the hub text from search.json");
  caption->add_option("--resamples", s.resamples, "bootstrap resamples")->check(CLI::PositiveNumber)->capture_default_str();

  auto* retrieval = app.add_subcommand("eval-retrieval", "image-to-text retrieval under hub contamination");
  retrieval->add_option("--docs", s.docs, "documents TSV: id, text")->required();
  retrieval->add_option("--queries", s.queries, "query image fixtures")->required();
  retrieval->add_option("--qrels", s.qrels, "relevance TSV: query id, doc id")->required();
  retrieval->add_option("--hub-text", s.hub_text, "hub text to inject");
  retrieval->add_option("--search", s.search, "take the hub text from search.json");
  retrieval->add_option("--counts", s.counts, "hub copies per run")->delimiter(',')->capture_default_str();

  for (auto* sub : app.get_subcommands({})) sub->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  auto* cmd = app.get_subcommands().front();
  try {
    check_input_paths(app, *cmd);
    const auto dir = out_dir(s);
    write_text(dir / (cmd->get_name() + ".config.toml"), resolved_config(app, *cmd));
    if (cmd == hub_embed) return cmd_hub_embed(s);
    if (cmd == init) return cmd_init(s);
    if (cmd == search) return cmd_search(s);
    if (cmd == traj) return cmd_export_trajectory(s);
    if (cmd == caption) return cmd_eval_caption(s);
    return cmd_eval_retrieval(s);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const hubtext::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(hubtext::errc_name(e.code())).c_str(), e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
