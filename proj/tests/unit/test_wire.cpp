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

#include <gtest/gtest.h>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "fairdial/wire.hpp"
#include "test_support.hpp"

namespace fairdial {
namespace {

using testing::fixture;
using testing::python;

std::string fake(const std::string& mode) {
  return python() + " " + fixture("fake_model.py").string() + " " + mode;
}

TEST(Wire, EchoOverSubprocess) {
  WireClient c(open_channel(fake("echo")));
  EXPECT_EQ(c.request_text("hello there"), "hello there");
  EXPECT_EQ(c.request_text("caf\xc3\xa9 \"quoted\"\nnewline"),
            "caf\xc3\xa9 \"quoted\"\nnewline");
  EXPECT_EQ(c.request_text(""), "");
}

TEST(Wire, ScoreOverSubprocess) {
  WireClient c(open_channel(fake("score idiot")));
  EXPECT_DOUBLE_EQ(c.request_score("you idiot"), 0.9);
  EXPECT_DOUBLE_EQ(c.request_score("you friend"), 0.1);
  // A responder reply without "score" is rejected.
  WireClient e(open_channel(fake("echo")));
  EXPECT_THROW(e.request_score("x"), ProtocolError);
}

TEST(Wire, MalformedReply) {
  WireClient c(open_channel(fake("malformed")));
  EXPECT_THROW(c.request_text("x"), ProtocolError);
}

TEST(Wire, WrongId) {
  WireClient c(open_channel(fake("wrong-id")));
  EXPECT_THROW(c.request_text("x"), ProtocolError);
}

TEST(Wire, PeerExits) {
  WireClient c(open_channel(fake("fail-after 1")));
  EXPECT_EQ(c.request_text("a"), "a");
  EXPECT_THROW(c.request_text("b"), ProtocolError);
}

TEST(Wire, Timeout) {
  WireClient c(open_channel(fake("silent")), Millis(200));
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(c.request_text("x"), ProtocolError);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(5));
}

TEST(Wire, SpawnFailureSurfacesOnUse) {
  WireClient c(open_channel("/nonexistent/model-binary"));
  EXPECT_THROW(c.request_text("x"), ProtocolError);
}

TEST(Wire, EndpointParsing) {
  EXPECT_THROW(open_channel(""), ConfigurationError);
  EXPECT_THROW(open_channel("localhost:70000"), ConfigurationError);
  EXPECT_THROW(open_channel("127.0.0.1:1"), ProtocolError);  // refused
}

// Minimal single-connection echo server.
class EchoServer {
 public:
  EchoServer() {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    ::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    ::listen(listen_fd_, 1);
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    thread_ = std::thread([this] { serve(); });
  }
  ~EchoServer() {
    thread_.join();
    ::close(listen_fd_);
  }
  int port() const { return port_; }

 private:
  void serve() {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) return;
    std::string buf;
    char chunk[4096];
    for (;;) {
      const ssize_t got = ::read(fd, chunk, sizeof chunk);
      if (got <= 0) break;
      buf.append(chunk, static_cast<std::size_t>(got));
      std::size_t nl;
      while ((nl = buf.find('\n')) != std::string::npos) {
        const auto req = nlohmann::json::parse(buf.substr(0, nl));
        buf.erase(0, nl + 1);
        const std::string reply =
            nlohmann::json({{"id", req["id"]}, {"text", "tcp:" + req["text"].get<std::string>()}})
                .dump() +
            "\n";
        if (::write(fd, reply.data(), reply.size()) < 0) break;
      }
    }
    ::close(fd);
  }

  int listen_fd_ = -1;
  int port_ = 0;
  std::thread thread_;
};

TEST(Wire, EchoOverTcp) {
  EchoServer server;
  {
    WireClient c(open_channel("127.0.0.1:" + std::to_string(server.port())));
    EXPECT_EQ(c.describe(), "tcp 127.0.0.1:" + std::to_string(server.port()));
    for (int i = 0; i < 50; ++i) {
      EXPECT_EQ(c.request_text("m" + std::to_string(i)), "tcp:m" + std::to_string(i));
    }
  }
}

}  // namespace
}  // namespace fairdial
