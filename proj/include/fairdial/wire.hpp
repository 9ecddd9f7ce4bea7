//
// Copyright 2026 The fairdial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Line protocol for out-of-process models.
//
// Every message is one UTF-8 JSON object terminated by '\n'. The client
// sends {"id": N, "text": "..."} and waits for exactly one reply carrying
// the same id: {"id": N, "text": "..."} from a responder, or
// {"id": N, "score": p} with p in [0, 1] from a classifier. One request is
// in flight per connection. The peer is either a child process spoken to
// over its stdin/stdout, or a TCP stream.

#ifndef FAIRDIAL_WIRE_HPP_
#define FAIRDIAL_WIRE_HPP_

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
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
#include <regex>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "fairdial/error.hpp"

extern char** environ;

namespace fairdial {

using Millis = std::chrono::milliseconds;

inline constexpr Millis kDefaultWireTimeout{30000};

class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void write_line(std::string_view line) = 0;
  // Returns the next line without its terminator. Throws ProtocolError on
  // timeout or end of stream.
  virtual std::string read_line(Millis timeout) = 0;
  virtual std::string describe() const = 0;
};

namespace detail {

// Buffered newline reader over a pollable file descriptor.
class FdLineReader {
 public:
  explicit FdLineReader(int fd) : fd_(fd) {}

  std::string read_line(Millis timeout, const std::string& peer) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      if (const auto nl = buf_.find('\n'); nl != std::string::npos) {
        std::string line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto left = std::chrono::duration_cast<Millis>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        throw ProtocolError("timed out waiting for a reply from " + peer);
      }
      pollfd pfd{fd_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError("poll failed on " + peer + ": " +
                            std::strerror(errno));
      }
      if (rc == 0) continue;
      char chunk[4096];
      const ssize_t n = ::read(fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw ProtocolError("read failed on " + peer + ": " +
                            std::strerror(errno));
      }
      if (n == 0) throw ProtocolError(peer + " closed the stream");
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buf_;
};

inline void write_all(int fd, std::string_view data, const std::string& peer,
                      bool is_socket) {
  while (!data.empty()) {
    const ssize_t n = is_socket
                          ? ::send(fd, data.data(), data.size(), MSG_NOSIGNAL)
                          : ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError("write to " + peer + " failed: " +
                          std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

inline void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace detail

// Runs `/bin/sh -c command` and talks to it over its stdin/stdout. The
// child's stderr is inherited. Writing to a dead child reports a
// ProtocolError; SIGPIPE is ignored process-wide once a child is spawned.
class SubprocessChannel final : public LineChannel {
 public:
  explicit SubprocessChannel(std::string command)
      : command_(std::move(command)) {
    detail::ignore_sigpipe_once();
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0) throw ProtocolError("pipe() failed");
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw ProtocolError("pipe() failed");
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, to_child[1]);
    posix_spawn_file_actions_addclose(&actions, from_child[0]);
    std::string sh = "/bin/sh";
    std::string flag = "-c";
    char* argv[] = {sh.data(), flag.data(), command_.data(), nullptr};
    const int rc =
        ::posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv, environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(to_child[0]);
    ::close(from_child[1]);
    if (rc != 0) {
      ::close(to_child[1]);
      ::close(from_child[0]);
      throw ProtocolError("cannot spawn '" + command_ +
                          "': " + std::strerror(rc));
    }
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    reader_ = std::make_unique<detail::FdLineReader>(read_fd_);
  }

  SubprocessChannel(const SubprocessChannel&) = delete;
  SubprocessChannel& operator=(const SubprocessChannel&) = delete;

  ~SubprocessChannel() override {
    if (write_fd_ >= 0) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    if (pid_ > 0) {
      int status = 0;
      for (int i = 0; i < 100; ++i) {
        if (::waitpid(pid_, &status, WNOHANG) == pid_) return;
        std::this_thread::sleep_for(Millis(10));
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
  }

  void write_line(std::string_view line) override {
    std::string msg(line);
    msg.push_back('\n');
    detail::write_all(write_fd_, msg, describe(), false);
  }

  std::string read_line(Millis timeout) override {
    return reader_->read_line(timeout, describe());
  }

  std::string describe() const override { return "process '" + command_ + "'"; }

 private:
  std::string command_;
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  std::unique_ptr<detail::FdLineReader> reader_;
};

class TcpChannel final : public LineChannel {
 public:
  TcpChannel(std::string host, std::uint16_t port)
      : host_(std::move(host)), port_(port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string port_str = std::to_string(port_);
    if (const int rc = ::getaddrinfo(host_.c_str(), port_str.c_str(), &hints, &res);
        rc != 0) {
      throw ProtocolError("cannot resolve " + describe() + ": " +
                          ::gai_strerror(rc));
    }
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        fd_ = fd;
        break;
      }
      ::close(fd);
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw ProtocolError("cannot connect to " + describe());
    reader_ = std::make_unique<detail::FdLineReader>(fd_);
  }

  TcpChannel(const TcpChannel&) = delete;
  TcpChannel& operator=(const TcpChannel&) = delete;

  ~TcpChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void write_line(std::string_view line) override {
    std::string msg(line);
    msg.push_back('\n');
    detail::write_all(fd_, msg, describe(), true);
  }

  std::string read_line(Millis timeout) override {
    return reader_->read_line(timeout, describe());
  }

  std::string describe() const override {
    return "tcp " + host_ + ":" + std::to_string(port_);
  }

 private:
  std::string host_;
  std::uint16_t port_;
  int fd_ = -1;
  std::unique_ptr<detail::FdLineReader> reader_;
};

// "host:port" connects over TCP; anything else is run as a shell command.
inline std::unique_ptr<LineChannel> open_channel(const std::string& spec) {
  static const std::regex kHostPort(R"(^([A-Za-z0-9.\-]+):([0-9]{1,5})$)");
  std::smatch m;
  if (std::regex_match(spec, m, kHostPort)) {
    const long port = std::stol(m[2].str());
    if (port <= 0 || port > 65535) {
      throw ConfigurationError("port out of range in '" + spec + "'");
    }
    return std::make_unique<TcpChannel>(m[1].str(),
                                        static_cast<std::uint16_t>(port));
  }
  if (spec.empty()) throw ConfigurationError("empty external endpoint");
  return std::make_unique<SubprocessChannel>(spec);
}

// Request/reply session over one channel. Calls are serialized.
class WireClient {
 public:
  explicit WireClient(std::unique_ptr<LineChannel> channel,
                      Millis timeout = kDefaultWireTimeout)
      : channel_(std::move(channel)), timeout_(timeout) {}

  // Responder role: returns the reply's "text".
  std::string request_text(std::string_view text) {
    const auto reply = round_trip(text);
    const auto it = reply.find("text");
    if (it == reply.end() || !it->is_string()) {
      throw ProtocolError("reply from " + channel_->describe() +
                          " lacks a string \"text\" field");
    }
    return it->get<std::string>();
  }

  // Classifier role: returns the reply's "score", checked to lie in [0, 1].
  double request_score(std::string_view text) {
    const auto reply = round_trip(text);
    const auto it = reply.find("score");
    if (it == reply.end() || !it->is_number()) {
      throw ProtocolError("reply from " + channel_->describe() +
                          " lacks a numeric \"score\" field");
    }
    const double p = it->get<double>();
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ProtocolError("score " + std::to_string(p) + " from " +
                          channel_->describe() + " is outside [0, 1]");
    }
    return p;
  }

  std::string describe() const { return channel_->describe(); }

 private:
  nlohmann::json round_trip(std::string_view text) {
    std::lock_guard<std::mutex> lock(mu_);
    const std::uint64_t id = next_id_++;
    nlohmann::json req;
    req["id"] = id;
    req["text"] = std::string(text);
    channel_->write_line(req.dump());
    const std::string line = channel_->read_line(timeout_);
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw ProtocolError("malformed reply from " + channel_->describe() +
                          ": '" + line.substr(0, 200) + "'");
    }
    if (!reply.is_object()) {
      throw ProtocolError("reply from " + channel_->describe() +
                          " is not a JSON object");
    }
    const auto it = reply.find("id");
    if (it == reply.end() || *it != req["id"]) {
      throw ProtocolError("reply from " + channel_->describe() +
                          " does not echo request id " + std::to_string(id));
    }
    return reply;
  }

  std::unique_ptr<LineChannel> channel_;
  Millis timeout_;
  std::mutex mu_;
  std::uint64_t next_id_ = 1;
};

}  // namespace fairdial

#endif  // FAIRDIAL_WIRE_HPP_
