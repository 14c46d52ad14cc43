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

// Client side of the newline-delimited JSON encoder protocol. A bridge process
// (spawned over stdio, or reached over TCP) owns the real model; this side
// only speaks the wire format and converts float32 vectors to Embedding.

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hubtext/encoder.hpp"

namespace hubtext {

// Bidirectional line transport. One request in flight at a time.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void write_line(const std::string& line) = 0;
  virtual std::string read_line(std::chrono::milliseconds timeout) = 0;
  virtual std::string describe() const = 0;
};

namespace detail {

inline void write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::kIoError, std::string("write failed: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

// Buffered line reader over a file descriptor with a per-call deadline.
class FdLineReader {
 public:
  explicit FdLineReader(int fd) : fd_(fd) {}

  std::string read_line(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw Error(Errc::kTimeout, "no response from encoder bridge");
      pollfd pfd{fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw Error(Errc::kIoError, std::string("poll failed: ") + std::strerror(errno));
      }
      if (ready == 0) throw Error(Errc::kTimeout, "no response from encoder bridge");
      char chunk[65536];
      const ssize_t n = ::read(fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(Errc::kIoError, std::string("read failed: ") + std::strerror(errno));
      }
      if (n == 0) throw Error(Errc::kProtocolError, "encoder bridge closed the stream");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buffer_;
};

}  // namespace detail

// Spawns `/bin/sh -c <command>` and talks to it over its stdin/stdout.
class SubprocessChannel final : public LineChannel {
 public:
  explicit SubprocessChannel(std::string command) : command_(std::move(command)) {
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
      throw Error(Errc::kIoError, std::string("pipe failed: ") + std::strerror(errno));
    }
    ::signal(SIGPIPE, SIG_IGN);
    pid_ = ::fork();
    if (pid_ < 0) throw Error(Errc::kIoError, std::string("fork failed: ") + std::strerror(errno));
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    ::fcntl(write_fd_, F_SETFD, FD_CLOEXEC);
    ::fcntl(read_fd_, F_SETFD, FD_CLOEXEC);
    reader_ = std::make_unique<detail::FdLineReader>(read_fd_);
  }

  SubprocessChannel(const SubprocessChannel&) = delete;
  SubprocessChannel& operator=(const SubprocessChannel&) = delete;

  ~SubprocessChannel() override {
    if (write_fd_ >= 0) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    if (pid_ > 0) {
      int status = 0;
      // Closing stdin ends a well-behaved bridge; give it a moment, then kill.
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid_, &status, WNOHANG) == pid_) return;
        ::usleep(10000);
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
  }

  void write_line(const std::string& line) override {
    detail::write_all(write_fd_, line + "\n");
  }
  std::string read_line(std::chrono::milliseconds timeout) override {
    return reader_->read_line(timeout);
  }
  std::string describe() const override { return "stdio:" + command_; }

 private:
  std::string command_;
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  std::unique_ptr<detail::FdLineReader> reader_;
};

class TcpChannel final : public LineChannel {
 public:
  TcpChannel(const std::string& host, std::uint16_t port) : endpoint_(host + ":" + std::to_string(port)) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    const std::string service = std::to_string(port);
    if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &result); rc != 0) {
      throw Error(Errc::kIoError, "cannot resolve " + endpoint_ + ": " + ::gai_strerror(rc));
    }
    for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
      fd_ = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd_ < 0) continue;
      if (::connect(fd_, ai->ai_addr, ai->ai_addrlen) == 0) break;
      ::close(fd_);
      fd_ = -1;
    }
    ::freeaddrinfo(result);
    if (fd_ < 0) throw Error(Errc::kIoError, "cannot connect to " + endpoint_);
    ::signal(SIGPIPE, SIG_IGN);
    reader_ = std::make_unique<detail::FdLineReader>(fd_);
  }

  // "host:port"
  static std::unique_ptr<TcpChannel> connect(const std::string& endpoint) {
    const auto colon = endpoint.rfind(':');
    if (colon == std::string::npos) {
      throw Error(Errc::kInvalidArgument, "TCP endpoint must be host:port, got '" + endpoint + "'");
    }
    const int port = std::stoi(endpoint.substr(colon + 1));
    if (port <= 0 || port > 65535) throw Error(Errc::kInvalidArgument, "bad port in '" + endpoint + "'");
    return std::make_unique<TcpChannel>(endpoint.substr(0, colon), static_cast<std::uint16_t>(port));
  }

  TcpChannel(const TcpChannel&) = delete;
  TcpChannel& operator=(const TcpChannel&) = delete;
  ~TcpChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void write_line(const std::string& line) override { detail::write_all(fd_, line + "\n"); }
  std::string read_line(std::chrono::milliseconds timeout) override {
    return reader_->read_line(timeout);
  }
  std::string describe() const override { return "tcp:" + endpoint_; }

 private:
  std::string endpoint_;
  int fd_ = -1;
  std::unique_ptr<detail::FdLineReader> reader_;
};

struct RemoteOptions {
  std::size_t max_batch = 256;
  std::chrono::milliseconds timeout{60000};
  std::string token_separator = " ";
};

// Encoder backed by a bridge process. Requests are serialized on the single
// connection; oversize batches are split transparently.
class RemoteEncoder final : public Encoder {
 public:
  RemoteEncoder(std::unique_ptr<LineChannel> channel, RemoteOptions options = {})
      : channel_(std::move(channel)), options_(std::move(options)) {
    if (options_.max_batch == 0) throw Error(Errc::kInvalidArgument, "max_batch must be >= 1");
    const auto reply = exchange({{"op", "hello"}, {"id", 0}}, 0);
    if (!reply.contains("dim") || !reply["dim"].is_number_integer() || reply["dim"].get<long long>() < 1) {
      throw Error(Errc::kProtocolError, "handshake reply lacks a positive integer dim");
    }
    dim_ = reply["dim"].get<std::size_t>();
    if (reply.contains("model") && reply["model"].is_string()) model_ = reply["model"].get<std::string>();
  }

  std::size_t dim() const override { return dim_; }
  const std::string& model() const noexcept { return model_; }

  const Vocabulary& vocabulary() const override {
    if (!vocab_) throw Error(Errc::kInvalidArgument, "remote encoder has no vocabulary; fetch or set one");
    return *vocab_;
  }

  void set_vocabulary(Vocabulary vocab) { vocab_ = std::move(vocab); }

  // Asks the bridge for its token list ({"op":"vocab"}).
  const Vocabulary& fetch_vocabulary() {
    std::lock_guard lock(mutex_);
    const auto id = next_id_++;
    const auto reply = exchange({{"op", "vocab"}, {"id", id}}, id);
    if (!reply.contains("tokens") || !reply["tokens"].is_array()) {
      throw Error(Errc::kProtocolError, "vocab reply lacks a tokens array");
    }
    vocab_ = Vocabulary(reply["tokens"].get<std::vector<std::string>>(), options_.token_separator);
    return *vocab_;
  }

  std::vector<Embedding> encode_sequences(std::span<const TokenSequence> batch) const override {
    const auto& vocab = vocabulary();
    std::vector<std::string> texts;
    texts.reserve(batch.size());
    for (const auto& seq : batch) texts.push_back(detokenize(seq, vocab));
    return encode_texts(texts);
  }

  std::vector<Embedding> encode_texts(std::span<const std::string> batch) const override {
    return encode_items("encode_text", batch);
  }

  std::vector<Embedding> encode_images(std::span<const std::string> paths) const {
    return encode_items("encode_image", paths);
  }

  std::string describe() const override {
    return "remote(" + channel_->describe() + ",model=" + model_ + ",dim=" + std::to_string(dim_) + ")";
  }

 private:
  std::vector<Embedding> encode_items(const char* op, std::span<const std::string> items) const {
    if (items.empty()) throw Error(Errc::kInvalidArgument, "empty encode batch");
    std::vector<Embedding> out;
    out.reserve(items.size());
    std::lock_guard lock(mutex_);
    for (std::size_t start = 0; start < items.size(); start += options_.max_batch) {
      const auto chunk = items.subspan(start, std::min(options_.max_batch, items.size() - start));
      const auto id = next_id_++;
      nlohmann::json request = {{"op", op}, {"id", id}, {"items", std::vector<std::string>(chunk.begin(), chunk.end())}};
      const auto reply = exchange(request, id);
      if (!reply.contains("vectors") || !reply["vectors"].is_array()) {
        throw Error(Errc::kProtocolError, "reply " + std::to_string(id) + " lacks vectors");
      }
      const auto& vectors = reply["vectors"];
      if (vectors.size() != chunk.size()) {
        throw Error(Errc::kProtocolError, "reply " + std::to_string(id) + " has " +
                                              std::to_string(vectors.size()) + " vectors for " +
                                              std::to_string(chunk.size()) + " items");
      }
      for (const auto& row : vectors) {
        if (!row.is_array() || row.size() != dim_) {
          throw Error(Errc::kProtocolError, "vector length differs from handshake dim " + std::to_string(dim_));
        }
        std::vector<double> values;
        values.reserve(dim_);
        for (const auto& x : row) {
          if (!x.is_number()) throw Error(Errc::kProtocolError, "non-numeric vector entry");
          // Vectors travel as float32; widen from the float value.
          const double v = static_cast<double>(static_cast<float>(x.get<double>()));
          if (!std::isfinite(v)) throw Error(Errc::kProtocolError, "non-finite vector entry");
          values.push_back(v);
        }
        out.emplace_back(std::move(values));
      }
    }
    return out;
  }

  nlohmann::json exchange(const nlohmann::json& request, std::uint64_t id) const {
    channel_->write_line(request.dump());
    const std::string line = channel_->read_line(options_.timeout);
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kProtocolError, std::string("malformed reply: ") + e.what());
    }
    if (!reply.is_object() || !reply.contains("id") || !reply["id"].is_number_unsigned()) {
      throw Error(Errc::kProtocolError, "reply lacks a numeric id");
    }
    if (reply["id"].get<std::uint64_t>() != id) {
      throw Error(Errc::kProtocolError, "reply id " + reply["id"].dump() + " does not match request id " +
                                            std::to_string(id));
    }
    if (reply.contains("error")) {
      throw Error(Errc::kRemoteError,
                  reply["error"].is_string() ? reply["error"].get<std::string>() : reply["error"].dump());
    }
    return reply;
  }

  std::unique_ptr<LineChannel> channel_;
  RemoteOptions options_;
  std::size_t dim_ = 0;
  std::string model_;
  std::optional<Vocabulary> vocab_;
  mutable std::mutex mutex_;
  mutable std::uint64_t next_id_ = 1;
};

}  // namespace hubtext
