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

// Writes the desk-scale fixture set under data/toy. Images are synthesized
// from the toy text encoder: each image mixes its caption's embedding, a
// shared "photo style" direction, and noise. The shared direction is what a
// hub text can exploit.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hubtext/encoder.hpp"

namespace {

const std::vector<std::string> kFunction = {"a", "the", "of", "with", "on", "in", "and", "is"};
const std::vector<std::string> kStyle = {"photo", "image", "picture", "showing"};
const std::vector<std::string> kAdjectives = {"red", "blue", "green", "small", "large", "old", "young", "white"};
const std::vector<std::string> kNouns = {"dog",   "cat",  "man",   "woman", "child", "car",   "bus",
                                         "train", "tree", "beach", "table", "pizza", "bed",   "street",
                                         "horse", "bird", "plate", "ball",  "field", "boat"};
const std::vector<std::string> kPrepositions = {"on", "in", "with"};
const std::vector<std::string> kVerbs = {"sitting", "standing", "eating", "playing", "riding", "holding", "walking", "near"};

struct Config {
  std::string out_dir = "data/toy";
  std::size_t dim = 64;
  std::uint64_t encoder_seed = 2024;
  std::uint64_t seed = 1;
  std::size_t tune_images = 60;
  std::size_t test_images = 40;
  std::size_t corpus_size = 200;
  std::size_t hypotheses = 64;
  double caption_weight = 1.5;
  double style_weight = 1.0;
  double noise = 0.8;
};

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng)];
}

// "a <adj> <noun> <verb> on the <noun>"
std::vector<std::string> random_caption(std::mt19937_64& rng) {
  return {"a", pick(rng, kAdjectives), pick(rng, kNouns), pick(rng, kVerbs), pick(rng, kPrepositions),
          "the", pick(rng, kNouns)};
}

std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (std::size_t i = 0; i < words.size(); ++i) s += (i ? " " : "") + words[i];
  return s;
}

// Replaces two of the content slots, as an imperfect human reference would.
std::vector<std::string> perturb(std::vector<std::string> words, std::mt19937_64& rng) {
  const std::vector<std::size_t> slots = {1, 2, 3, 6};
  std::vector<std::size_t> chosen = slots;
  std::shuffle(chosen.begin(), chosen.end(), rng);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto s = chosen[i];
    if (s == 1) words[s] = pick(rng, kAdjectives);
    else if (s == 3) words[s] = pick(rng, kVerbs);
    else words[s] = pick(rng, kNouns);
  }
  return words;
}

std::string format_vector(const std::vector<double>& v) {
  std::string s;
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g", v[i]);
    s += (i ? "," : "") + std::string(buf);
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"Generate the toy fixture set"};
  app.add_option("--out", cfg.out_dir);
  app.add_option("--seed", cfg.seed);
  app.add_option("--noise", cfg.noise);
  app.add_option("--style-weight", cfg.style_weight);
  app.add_option("--caption-weight", cfg.caption_weight);
  CLI11_PARSE(app, argc, argv);

  std::vector<std::string> tokens;
  for (const auto* group : {&kFunction, &kStyle, &kAdjectives, &kNouns, &kVerbs}) {
    tokens.insert(tokens.end(), group->begin(), group->end());
  }
  const hubtext::ToyEncoder enc(hubtext::Vocabulary(tokens), cfg.dim, cfg.encoder_seed);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(0.6, 1.4);

  std::vector<double> style(cfg.dim, 0.0);
  for (const auto& w : kStyle) {
    const auto v = enc.token_vector(*enc.vocabulary().find(w));
    for (std::size_t k = 0; k < cfg.dim; ++k) style[k] += v[k];
  }
  double sn = 0.0;
  for (double x : style) sn += x * x;
  for (double& x : style) x /= std::sqrt(sn);

  auto make_image = [&](const std::string& caption) {
    const auto c = enc.encode_text(caption);
    const double a = cfg.caption_weight * jitter(rng);
    std::vector<double> v(cfg.dim);
    for (std::size_t k = 0; k < cfg.dim; ++k) {
      v[k] = a * c[k] + cfg.style_weight * style[k] + cfg.noise * gauss(rng) / std::sqrt(static_cast<double>(cfg.dim));
    }
    return v;
  };

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);

  {
    std::ofstream out(dir / "vocab.txt");
    for (const auto& t : tokens) out << t << '\n';
  }
  {
    std::ofstream out(dir / "images_tune.tsv");
    out << "# tuning images: id\\tcomma-separated vector (dim " << cfg.dim << ")\n";
    for (std::size_t i = 0; i < cfg.tune_images; ++i) {
      char id[32];
      std::snprintf(id, sizeof(id), "tune%03zu", i);
      out << id << '\t' << format_vector(make_image(join(random_caption(rng)))) << '\n';
    }
  }
  {
    std::ofstream images(dir / "images_test.tsv");
    std::ofstream pairs(dir / "pairs.jsonl");
    std::ofstream docs(dir / "docs.tsv");
    std::ofstream qrels(dir / "qrels.tsv");
    images << "# test images: id\\tcomma-separated vector (dim " << cfg.dim << ")\n";
    for (std::size_t i = 0; i < cfg.test_images; ++i) {
      char id[32];
      std::snprintf(id, sizeof(id), "img%03zu", i);
      char doc[32];
      std::snprintf(doc, sizeof(doc), "d%03zu", i);
      const auto caption = random_caption(rng);
      images << id << '\t' << format_vector(make_image(join(caption))) << '\n';
      const nlohmann::json row = {{"image_id", id},
                                  {"image_vec_ref", id},
                                  {"captions", {{"human", join(perturb(caption, rng))},
                                                {"random", join(random_caption(rng))}}}};
      pairs << row.dump() << '\n';
      docs << doc << '\t' << join(caption) << '\n';
      qrels << id << '\t' << doc << '\n';
    }
  }
  {
    std::ofstream out(dir / "corpus.txt");
    for (std::size_t i = 0; i < cfg.corpus_size; ++i) out << join(random_caption(rng)) << '\n';
  }
  {
    // Stand-in for inversion-model output: noisy captions with style words.
    std::ofstream out(dir / "hypotheses.txt");
    for (std::size_t i = 0; i < cfg.hypotheses; ++i) {
      auto words = random_caption(rng);
      words[0] = pick(rng, kStyle);
      out << join(words) << '\n';
    }
  }
  std::cout << "wrote fixtures to " << dir.string() << '\n';
  return 0;
}
