// Copyright 2026 The tlsmbt Authors.
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

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include "tlsmbt/exec.h"
#include "tlsmbt/tcio.h"

namespace tlsmbt::exec {
namespace {

using Clock = std::chrono::steady_clock;

struct FrameTimeout {};
struct FrameClosed {
  std::string reason;
};
using FrameResult = std::variant<std::string, FrameTimeout, FrameClosed>;

std::string errno_text(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

// Pops one frame from `buffer` if complete. A zero or oversized length is a
// protocol error.
std::optional<FrameResult> take_frame(std::string& buffer) {
  if (buffer.size() < 4) return std::nullopt;
  const auto* p = reinterpret_cast<const unsigned char*>(buffer.data());
  const std::uint32_t len = (std::uint32_t{p[0]} << 24) |
                            (std::uint32_t{p[1]} << 16) |
                            (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
  if (len == 0 || len > kMaxFrameBody) {
    return FrameClosed{"protocol error: frame length " + std::to_string(len)};
  }
  if (buffer.size() < 4 + std::size_t{len}) return std::nullopt;
  std::string body = buffer.substr(4, len);
  buffer.erase(0, 4 + std::size_t{len});
  return body;
}

// Reads until one frame is complete. Without a deadline it blocks.
FrameResult read_frame(int fd, std::string& buffer,
                       std::optional<Clock::time_point> deadline) {
  for (;;) {
    if (auto frame = take_frame(buffer)) return *frame;
    int wait_ms = -1;
    if (deadline) {
      auto left = std::chrono::duration_cast<milliseconds>(*deadline -
                                                           Clock::now());
      if (left.count() <= 0) return FrameTimeout{};
      wait_ms = static_cast<int>(left.count());
    }
    pollfd pfd{fd, POLLIN, 0};
    int ready = ::poll(&pfd, 1, wait_ms);
    if (ready < 0 && errno == EINTR) continue;
    if (ready < 0) return FrameClosed{errno_text("poll")};
    if (ready == 0) return FrameTimeout{};
    char chunk[4096];
    ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) return FrameClosed{errno_text("recv")};
    if (n == 0) return FrameClosed{"connection closed by peer"};
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

}  // namespace

std::string encode_frame(std::string_view body) {
  const auto len = static_cast<std::uint32_t>(body.size());
  std::string out;
  out.reserve(4 + body.size());
  out.push_back(static_cast<char>(len >> 24));
  out.push_back(static_cast<char>(len >> 16));
  out.push_back(static_cast<char>(len >> 8));
  out.push_back(static_cast<char>(len));
  out.append(body);
  return out;
}

Endpoint parse_endpoint(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw SetupError("expected host:port, got '" + std::string(text) + "'");
  }
  std::string_view port_text = text.substr(colon + 1);
  unsigned port = 0;
  auto [end, ec] = std::from_chars(port_text.data(),
                                   port_text.data() + port_text.size(), port);
  if (ec != std::errc() || end != port_text.data() + port_text.size() ||
      port > 65535) {
    throw SetupError("bad port in '" + std::string(text) + "'");
  }
  return Endpoint{std::string(text.substr(0, colon)),
                  static_cast<std::uint16_t>(port)};
}

// ---- client -----------------------------------------------------------------

TcpTransport::TcpTransport(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found)) {
    throw SetupError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  std::string last_error = "no address";
  for (addrinfo* a = found; a != nullptr; a = a->ai_next) {
    int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) {
      last_error = errno_text("socket");
      continue;
    }
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
      fd_ = fd;
      break;
    }
    last_error = errno_text("connect");
    ::close(fd);
  }
  ::freeaddrinfo(found);
  if (fd_ < 0) {
    throw SetupError("cannot connect to " + host + ":" + service + ": " +
                     last_error);
  }
  set_nodelay(fd_);
}

TcpTransport::~TcpTransport() { close(); }

void TcpTransport::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
  if (!broken_) broken_ = "closed locally";
}

bool TcpTransport::write_frame(std::string_view body) {
  if (broken_) return false;
  if (!write_all(fd_, encode_frame(body))) {
    broken_ = errno_text("send");
    return false;
  }
  return true;
}

void TcpTransport::send(const HandshakeMessage& m) {
  write_frame(tcio::encode_message(m));
}

SutEvent TcpTransport::receive(milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  if (!write_frame(kPullBody)) return ConnectionClosed{*broken_};
  FrameResult frame = read_frame(fd_, buffer_, deadline);
  if (std::holds_alternative<FrameTimeout>(frame)) return Timeout{timeout};
  if (auto* closed = std::get_if<FrameClosed>(&frame)) {
    broken_ = closed->reason;
    return ConnectionClosed{*broken_};
  }
  try {
    return tcio::decode_message(std::get<std::string>(frame));
  } catch (const tcio::WireFormatError& e) {
    broken_ = std::string("protocol error: ") + e.what();
    return ConnectionClosed{*broken_};
  }
}

// ---- server -----------------------------------------------------------------

SutServer::SutServer(const Endpoint& bind, const model::ModelConfig& cfg,
                     MutantId mutant)
    : cfg_(cfg), mutant_(mutant) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(bind.port);
  if (int rc = ::getaddrinfo(bind.host.c_str(), service.c_str(), &hints,
                             &found)) {
    throw SetupError("cannot resolve " + bind.host + ": " +
                     ::gai_strerror(rc));
  }
  std::string last_error = "no address";
  for (addrinfo* a = found; a != nullptr; a = a->ai_next) {
    int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) {
      last_error = errno_text("socket");
      continue;
    }
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, a->ai_addr, a->ai_addrlen) == 0 && ::listen(fd, 16) == 0) {
      listen_fd_ = fd;
      break;
    }
    last_error = errno_text("bind");
    ::close(fd);
  }
  ::freeaddrinfo(found);
  if (listen_fd_ < 0) {
    throw SetupError("cannot bind " + bind.host + ":" + service + ": " +
                     last_error);
  }
  sockaddr_storage addr{};
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.ss_family == AF_INET6
                    ? reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port
                    : reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

SutServer::~SutServer() { stop(); }

void SutServer::wait() {
  while (!stopping_) std::this_thread::sleep_for(milliseconds(100));
}

void SutServer::stop() {
  if (stopping_.exchange(true)) {
    if (acceptor_.joinable()) acceptor_.join();
    return;
  }
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard lock(mu_);
    for (int fd : connections_) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& w : workers_) {
    if (w.joinable()) w.join();
  }
  workers_.clear();
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = -1;
}

// Polls so that stop() is observed without relying on accept() wakeups.
void SutServer::accept_loop() {
  while (!stopping_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    int ready = ::poll(&pfd, 1, 50);
    if (ready <= 0) continue;
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    set_nodelay(fd);
    std::lock_guard lock(mu_);
    connections_.insert(fd);
    workers_.emplace_back([this, fd] { serve(fd); });
  }
}

// One session per connection; the SimulatedSut is owned by this thread.
void SutServer::serve(int fd) {
  SimulatedSut sut(cfg_, mutant_);
  std::string buffer;
  for (;;) {
    FrameResult frame = read_frame(fd, buffer, std::nullopt);
    if (!std::holds_alternative<std::string>(frame)) break;
    const std::string& body = std::get<std::string>(frame);
    if (body == kPullBody) {
      SimulatedSut::Output out = sut.next_output();
      if (auto* m = std::get_if<HandshakeMessage>(&out)) {
        if (!write_all(fd, encode_frame(tcio::encode_message(*m)))) break;
      } else if (std::holds_alternative<SimulatedSut::Closed>(out)) {
        break;
      }
      continue;
    }
    try {
      sut.send(tcio::decode_message(body));
    } catch (const tcio::WireFormatError&) {
      break;
    }
  }
  {
    std::lock_guard lock(mu_);
    connections_.erase(fd);
  }
  ::close(fd);
}

}  // namespace tlsmbt::exec
