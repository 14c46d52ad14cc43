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

// Minimal encoder bridge speaking the line protocol, backed by the toy
// encoder over a numbered vocabulary. Used by the protocol tests; misbehaves
// on request through --mode.

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hubtext/encoder.hpp"

namespace {

struct Options {
  std::size_t dim = 16;
  std::size_t vocab = 32;
  std::uint64_t seed = 7;
  std::string vocab_file;
  std::string mode = "normal";
  int listen_port = 0;
};

std::string handle(const std::string& line, const Options& opt, const hubtext::ToyEncoder& enc) {
  nlohmann::json req;
  try {
    req = nlohmann::json::parse(line);
  } catch (const std::exception&) {
    return nlohmann::json{{"id", 0}, {"error", "malformed request"}}.dump();
  }
  const auto id = req.value("id", std::uint64_t{0});
  const std::string op = req.value("op", "");
  if (op == "hello") {
    if (opt.mode == "bad-hello") return R"({"id":0,"model":"fake"})";
    return nlohmann::json{{"id", 0}, {"dim", opt.dim}, {"model", "fake-toy"}}.dump();
  }
  if (opt.mode == "wrong-id") return nlohmann::json{{"id", id + 1}, {"dim", opt.dim}, {"vectors", nlohmann::json::array()}}.dump();
  if (opt.mode == "error") return nlohmann::json{{"id", id}, {"error", "model load failed"}}.dump();
  if (opt.mode == "malformed") return "{not json";
  if (opt.mode == "silent") return "";
  if (op == "vocab") return nlohmann::json{{"id", id}, {"tokens", enc.vocabulary().tokens()}}.dump();
  if (op == "encode_image") {
    return nlohmann::json{{"id", id}, {"error", "item 0: file not found"}}.dump();
  }
  if (op != "encode_text") return nlohmann::json{{"id", id}, {"error", "unknown op '" + op + "'"}}.dump();
  nlohmann::json vectors = nlohmann::json::array();
  std::size_t index = 0;
  for (const auto& item : req["items"]) {
    hubtext::Embedding e;
    try {
      e = enc.encode_text(item.get<std::string>());
    } catch (const std::exception& ex) {
      return nlohmann::json{{"id", id}, {"error", "item " + std::to_string(index) + ": " + ex.what()}}.dump();
    }
    nlohmann::json row = nlohmann::json::array();
    const std::size_t n = opt.mode == "short" ? e.dim() - 1 : e.dim();
    for (std::size_t k = 0; k < n; ++k) row.push_back(static_cast<float>(e[k]));
    vectors.push_back(std::move(row));
    ++index;
  }
  return nlohmann::json{{"id", id}, {"dim", opt.dim}, {"vectors", vectors}}.dump();
}

void serve(std::FILE* in, std::FILE* out, const Options& opt, const hubtext::ToyEncoder& enc) {
  char* buf = nullptr;
  std::size_t cap = 0;
  ssize_t len;
  while ((len = ::getline(&buf, &cap, in)) > 0) {
    std::string line(buf, static_cast<std::size_t>(len));
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    const std::string reply = handle(line, opt, enc);
    if (reply.empty()) continue;
    std::fputs(reply.c_str(), out);
    std::fputc('\n', out);
    std::fflush(out);
  }
  std::free(buf);
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"fake encoder bridge"};
  app.add_option("--dim", opt.dim);
  app.add_option("--vocab", opt.vocab);
  app.add_option("--vocab-file", opt.vocab_file, "token file; overrides --vocab");
  app.add_option("--seed", opt.seed);
  app.add_option("--mode", opt.mode);
  app.add_option("--listen", opt.listen_port, "serve one TCP client on this port (0 = stdio)");
  CLI11_PARSE(app, argc, argv);

  const hubtext::ToyEncoder enc(opt.vocab_file.empty() ? hubtext::numbered_vocabulary(opt.vocab)
                                                      : hubtext::Vocabulary::from_file(opt.vocab_file),
                               opt.dim, opt.seed);
  if (opt.listen_port == 0) {
    serve(stdin, stdout, opt, enc);
    return 0;
  }
  const int srv = ::socket(AF_INET, SOCK_STREAM, 0);
  int yes = 1;
  ::setsockopt(srv, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(opt.listen_port));
  if (::bind(srv, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(srv, 1) != 0) {
    std::perror("bind/listen");
    return 1;
  }
  std::printf("listening\n");
  std::fflush(stdout);
  const int client = ::accept(srv, nullptr, nullptr);
  std::FILE* in = ::fdopen(client, "r");
  std::FILE* out = ::fdopen(::dup(client), "w");
  serve(in, out, opt, enc);
  std::fclose(in);
  std::fclose(out);
  ::close(srv);
  return 0;
}
