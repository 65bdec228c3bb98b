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

// Test execution against a system under test (SUT).
//
// The runner walks a test case: stimulus edges are sent, observation edges
// are matched against what the SUT answers. The SUT is reached through
// SutAdapter, implemented in process by SimulatedSut and over TCP by
// TcpTransport talking to a SutServer.
//
// Wire protocol. Every frame is a u32 big-endian body length followed by the
// body, the canonical message text of tcio::encode_message. Before each
// receive the client sends the control body `NEXT {}`; the server answers
// with at most one message frame, stays silent while it waits for input, and
// closes the connection once its session is over. Pulling keeps the remote
// SUT in lockstep with the runner, exactly like the in-process adapter.

#ifndef TLSMBT_EXEC_H_
#define TLSMBT_EXEC_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "tlsmbt/lts.h"
#include "tlsmbt/messages.h"
#include "tlsmbt/model.h"
#include "tlsmbt/testgen.h"

namespace tlsmbt::exec {

using messages::HandshakeMessage;
using std::chrono::milliseconds;

inline constexpr milliseconds kDefaultStepTimeout{2000};
inline constexpr std::uint32_t kMaxFrameBody = 1u << 20;
inline constexpr std::string_view kPullBody = "NEXT {}";

// Raised before a run starts: bad address, unbuildable stimulus, bad config.
class SetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- adapter contract -------------------------------------------------------

struct Timeout {
  milliseconds bound;  // the deadline that elapsed
  bool operator==(const Timeout&) const = default;
};
struct ConnectionClosed {
  std::string reason;
  bool operator==(const ConnectionClosed&) const = default;
};
using SutEvent = std::variant<HandshakeMessage, Timeout, ConnectionClosed>;

// One session. receive() never blocks past `timeout` and yields events in
// arrival order. Transport failures surface as ConnectionClosed events.
class SutAdapter {
 public:
  virtual ~SutAdapter() = default;
  virtual void send(const HandshakeMessage& m) = 0;
  virtual SutEvent receive(milliseconds timeout) = 0;
  virtual void close() {}
};

// ---- simulated SUT ----------------------------------------------------------

enum class MutantId {
  conforming,
  renegotiation_tolerant,
  certrequest_rejecter,
  hrr_same_crypto,
};

std::string_view to_string(MutantId m);
std::optional<MutantId> mutant_from_string(std::string_view s);
const std::vector<MutantId>& all_mutants();

model::ServerBehavior behavior_of(MutantId m);

// Plays the server process of build_server(cfg, behavior_of(mutant)). Input
// the server cannot take is answered with a fatal unexpected_message alert,
// after which the session is over.
class SimulatedSut : public SutAdapter {
 public:
  SimulatedSut(const model::ModelConfig& cfg, MutantId mutant);

  // What the server does when asked for its next output.
  struct Quiet {};   // waits for client input
  struct Closed {};  // session over
  using Output = std::variant<HandshakeMessage, Quiet, Closed>;
  Output next_output();

  void send(const HandshakeMessage& m) override;
  SutEvent receive(milliseconds timeout) override;

 private:
  lts::Lts server_;
  lts::StateId state_;
  std::optional<HandshakeMessage> pending_;
  bool closed_ = false;
};

// ---- TCP --------------------------------------------------------------------

std::string encode_frame(std::string_view body);

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};
// "host:port"; throws SetupError.
Endpoint parse_endpoint(std::string_view text);

// Client side. The constructor connects and throws SetupError on failure.
class TcpTransport : public SutAdapter {
 public:
  TcpTransport(const std::string& host, std::uint16_t port);
  ~TcpTransport() override;
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  void send(const HandshakeMessage& m) override;
  SutEvent receive(milliseconds timeout) override;
  void close() override;

 private:
  bool write_frame(std::string_view body);
  int fd_ = -1;
  std::string buffer_;
  std::optional<std::string> broken_;
};

// Serves one SimulatedSut per connection, each on its own thread. Binding
// happens in the constructor (SetupError on failure); port 0 picks an
// ephemeral port, reported by port().
class SutServer {
 public:
  SutServer(const Endpoint& bind, const model::ModelConfig& cfg,
            MutantId mutant);
  ~SutServer();
  SutServer(const SutServer&) = delete;
  SutServer& operator=(const SutServer&) = delete;

  std::uint16_t port() const { return port_; }
  // Blocks until stop(); used by the CLI.
  void wait();
  void stop();

 private:
  void accept_loop();
  void serve(int fd);

  model::ModelConfig cfg_;
  MutantId mutant_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::set<int> connections_;
  std::vector<std::thread> workers_;
  std::thread acceptor_;
};

// ---- runner -----------------------------------------------------------------

// Payloads for stimulus edges that carry none, keyed by gate name.
using MessageDefaults = std::map<std::string, HandshakeMessage>;
MessageDefaults default_payloads(const model::ModelConfig& cfg);
// JSON object {"GATE": "<wire body>", ...} overriding `base`; SetupError on
// unknown gates, mismatched bodies or unreadable files.
MessageDefaults load_message_defaults(const std::string& path,
                                      MessageDefaults base);

enum class EndReason {
  verdict_state,  // reached a sink carrying a verdict
  unmatched,      // observed a message with no matching edge
  timeout,
  connection_closed,
  stuck,          // non-sink state without edges
};
std::string_view to_string(EndReason r);

struct ExecutionReport {
  testgen::Verdict verdict = testgen::Verdict::fail;
  lts::Trace trace;
  std::vector<std::string> log;  // "Action #k: TEXT", one per trace entry
  bool conformance = false;
  EndReason end = EndReason::stuck;
  std::string detail;
  lts::StateId final_state = 0;
  milliseconds elapsed{0};
};

// Equality of everything except elapsed time.
bool same_outcome(const ExecutionReport& a, const ExecutionReport& b);

// Throws SetupError when a stimulus edge has neither payload nor default.
void check_executable(const testgen::TestCase& tc,
                      const MessageDefaults& defaults);

// Requires a valid test case. Always yields a verdict once started; adapter
// exceptions are treated as a closed connection.
ExecutionReport run(const testgen::TestCase& tc, SutAdapter& adapter,
                    const lts::Lts& model, milliseconds step_timeout,
                    const MessageDefaults& defaults);

// Trace inclusion with direction metadata ignored on both sides.
bool check_conformance(const lts::Trace& trace, const lts::Lts& model);

// Versioned `report_v1` JSON document and a human-readable rendering.
std::string report_to_json(const ExecutionReport& r);
std::string report_to_text(const ExecutionReport& r);

}  // namespace tlsmbt::exec

#endif  // TLSMBT_EXEC_H_
