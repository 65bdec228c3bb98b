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
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <thread>

#include <gtest/gtest.h>

#include "json.hpp"
#include "tlsmbt/exec.h"
#include "tlsmbt/model.h"
#include "tlsmbt/tcio.h"
#include "tlsmbt/testgen.h"

namespace tlsmbt {
namespace {

using exec::MutantId;
using messages::ActionLabel;
using messages::AlertType;
using messages::Direction;
using testgen::Verdict;

constexpr exec::milliseconds kStep{500};

const model::ModelConfig& cfg() {
  static const model::ModelConfig c{};
  return c;
}
const lts::Lts& handshake() {
  static const lts::Lts m = model::build_handshake_model(cfg());
  return m;
}
const testgen::TestCase& tc(int which) {
  static const std::map<int, testgen::TestCase> cases = [] {
    std::map<int, testgen::TestCase> out;
    out[1] = testgen::generate(handshake(), testgen::purpose_I());
    out[2] = testgen::generate(handshake(), testgen::purpose_II());
    out[3] = testgen::generate(handshake(), testgen::purpose_III());
    return out;
  }();
  return cases.at(which);
}

exec::ExecutionReport run_local(int which, MutantId m) {
  exec::SimulatedSut sut(cfg(), m);
  return exec::run(tc(which), sut, handshake(), kStep,
                   exec::default_payloads(cfg()));
}

exec::ExecutionReport run_tcp(int which, std::uint16_t port) {
  exec::TcpTransport transport("127.0.0.1", port);
  return exec::run(tc(which), transport, handshake(), kStep,
                   exec::default_payloads(cfg()));
}

lts::Trace strip(lts::Trace t) {
  for (auto& l : t) l.direction = Direction::observation;
  return t;
}

bool is_alert(const ActionLabel& l, AlertType d) {
  const auto* a = l.payload ? std::get_if<messages::Alert>(&*l.payload)
                            : nullptr;
  return a && a->description == d && a->level == messages::AlertLevel::fatal;
}

// ---- mutants and the simulated SUT -----------------------------------------

TEST(Mutant, NamesRoundTrip) {
  EXPECT_EQ(exec::all_mutants().size(), 4u);
  for (MutantId m : exec::all_mutants()) {
    EXPECT_EQ(exec::mutant_from_string(exec::to_string(m)), m);
  }
  EXPECT_EQ(exec::mutant_from_string("openssl"), std::nullopt);
}

// Drives the server with the model's own client: at every step the client
// either takes its unique send or consumes the server's output.
TEST(SimulatedSut, SelfPlayWithModelClientFollowsModel) {
  model::ModelConfig c = cfg();
  c.enable_hrr_branch = false;  // deterministic client start
  const lts::Lts client = model::build_client(c);
  exec::SimulatedSut sut(c, MutantId::conforming);
  lts::StateId s = client.initial();
  lts::Trace trace;
  for (int guard = 0; guard < 32; ++guard) {
    const lts::Transition* send = nullptr;
    for (std::size_t i : client.outgoing(s)) {
      const auto& t = client.transitions()[i];
      if (t.label.direction == Direction::stimulus &&
          !is_alert(t.label, AlertType::illegal_parameter) &&
          !is_alert(t.label, AlertType::unexpected_message)) {
        send = &t;
        break;
      }
    }
    if (send) {
      sut.send(*send->label.payload);
      trace.push_back(send->label);
      s = send->target;
      continue;
    }
    exec::SutEvent ev = sut.receive(kStep);
    if (!std::holds_alternative<messages::HandshakeMessage>(ev)) break;
    const auto& m = std::get<messages::HandshakeMessage>(ev);
    const lts::Transition* next = nullptr;
    for (std::size_t i : client.outgoing(s)) {
      const auto& t = client.transitions()[i];
      if (t.label.payload == m) next = &t;
    }
    ASSERT_NE(next, nullptr) << "client cannot take " << tcio::encode_message(m);
    trace.push_back(next->label);
    s = next->target;
  }
  std::vector<std::string> gates;
  for (const auto& l : trace) gates.push_back(l.gate);
  EXPECT_EQ(gates, (std::vector<std::string>{
                       "CLIENTHELLO", "SERVERHELLO", "ENCRYPTEDEXTENSIONS",
                       "CERTIFICATE_S", "CERTIFICATEVERIFY_S", "FINISHED_S",
                       "FINISHED_C"}));
  EXPECT_TRUE(exec::check_conformance(trace, model::build_handshake_model(c)));
}

TEST(SimulatedSut, QuietWhileWaitingClosedWhenDone) {
  exec::SimulatedSut sut(cfg(), MutantId::conforming);
  EXPECT_EQ(sut.receive(kStep), exec::SutEvent(exec::Timeout{kStep}));
  // Garbage input: fatal unexpected_message, then the session is over.
  sut.send(messages::FinishedClient{2});
  auto ev = sut.receive(kStep);
  ASSERT_TRUE(std::holds_alternative<messages::HandshakeMessage>(ev));
  EXPECT_EQ(std::get<messages::HandshakeMessage>(ev),
            messages::HandshakeMessage(
                model::fatal_alert(AlertType::unexpected_message)));
  EXPECT_TRUE(std::holds_alternative<exec::ConnectionClosed>(sut.receive(kStep)));
  sut.send(messages::FinishedClient{2});
  EXPECT_TRUE(std::holds_alternative<exec::ConnectionClosed>(sut.receive(kStep)));
}

TEST(SimulatedSut, EchoMutantProvokesIllegalParameter) {
  exec::SimulatedSut sut(cfg(), MutantId::hrr_same_crypto);
  const auto ch = model::client_hello_crypto(cfg().cipher_suites.front(),
                                             messages::KeyShareToken::invalid_share);
  sut.send(messages::ClientHello{ch});
  auto ev = sut.receive(kStep);
  ASSERT_TRUE(std::holds_alternative<messages::HandshakeMessage>(ev));
  const auto* hrr =
      std::get_if<messages::HelloRetryRequest>(&std::get<messages::HandshakeMessage>(ev));
  ASSERT_NE(hrr, nullptr);
  EXPECT_TRUE(messages::crypto_info_equal(hrr->crypto, ch));
  // The model's client answers that HRR with illegal_parameter.
  const lts::Lts client = model::build_client(cfg());
  bool answered = false;
  for (const auto& t : client.transitions()) {
    if (t.label.payload != std::get<messages::HandshakeMessage>(ev)) continue;
    for (std::size_t i : client.outgoing(t.target)) {
      answered |= is_alert(client.transitions()[i].label,
                           AlertType::illegal_parameter);
    }
  }
  EXPECT_TRUE(answered);
}

// ---- runner -----------------------------------------------------------------

TEST(Run, RenegotiationCaseConforming) {
  const auto r = run_local(2, MutantId::conforming);
  EXPECT_EQ(r.verdict, Verdict::pass);
  ASSERT_EQ(r.log.size(), 6u);
  EXPECT_EQ(r.log.front(), "Action #1: CLIENTHELLO");
  EXPECT_EQ(r.log.back(), "Action #6: ALERT(unexpected_message)");
  EXPECT_TRUE(is_alert(r.trace.back(), AlertType::unexpected_message));
  EXPECT_TRUE(r.conformance);
}

TEST(Run, CertRequestRejecterFailsAfterEncryptedExtensions) {
  const auto r = run_local(3, MutantId::certrequest_rejecter);
  EXPECT_EQ(r.verdict, Verdict::fail);
  ASSERT_EQ(r.log.size(), 6u);
  EXPECT_EQ(r.log[4], "Action #5: ENCRYPTEDEXTENSIONS");
  EXPECT_EQ(r.log[5], "Action #6: ALERT(unexpected_message)");
  EXPECT_EQ(r.end, exec::EndReason::unmatched);
  EXPECT_FALSE(r.conformance);
}

// Oracle: the unique longest trace without alerts, retries or renegotiation,
// found by plain enumeration.
TEST(Run, HappyPathEqualsModelTrace) {
  std::set<lts::Trace> candidates;
  for (const auto& t : lts::enumerate_traces(handshake(), 12)) {
    bool ok = true;
    int hellos = 0;
    for (const auto& l : t) {
      ok &= l.gate != "ALERT" && l.gate != "HELLORETRYREQUEST";
      hellos += l.gate == "CLIENTHELLO";
    }
    if (ok && hellos <= 1) candidates.insert(strip(t));
  }
  std::size_t longest = 0;
  for (const auto& t : candidates) longest = std::max(longest, t.size());
  std::vector<lts::Trace> maximal;
  for (const auto& t : candidates) {
    if (t.size() == longest) maximal.push_back(t);
  }
  ASSERT_EQ(maximal.size(), 1u);
  const auto r = run_local(1, MutantId::conforming);
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_EQ(strip(r.trace), maximal.front());
}

TEST(Run, VerdictTable) {
  const std::map<MutantId, std::array<Verdict, 3>> expected{
      {MutantId::conforming, {Verdict::pass, Verdict::pass, Verdict::pass}},
      {MutantId::renegotiation_tolerant,
       {Verdict::pass, Verdict::fail, Verdict::pass}},
      {MutantId::certrequest_rejecter,
       {Verdict::fail, Verdict::fail, Verdict::fail}},
      {MutantId::hrr_same_crypto, {Verdict::pass, Verdict::pass, Verdict::fail}},
  };
  for (const auto& [m, verdicts] : expected) {
    for (int which = 1; which <= 3; ++which) {
      const auto r = run_local(which, m);
      EXPECT_EQ(r.verdict, verdicts[which - 1])
          << "TC " << which << " vs " << exec::to_string(m) << "\n"
          << exec::report_to_text(r);
      EXPECT_EQ(r.trace.size(), r.log.size());
    }
  }
}

TEST(Run, ConformanceFlagMatchesEnumeration) {
  std::set<lts::Trace> all;
  for (const auto& t : lts::enumerate_traces(handshake(), 12)) {
    all.insert(strip(t));
  }
  for (MutantId m : exec::all_mutants()) {
    for (int which = 1; which <= 3; ++which) {
      const auto r = run_local(which, m);
      EXPECT_EQ(r.conformance, all.contains(strip(r.trace)))
          << exec::report_to_text(r);
      EXPECT_EQ(r.conformance, exec::check_conformance(r.trace, handshake()));
    }
  }
}

TEST(Run, TimeoutIsFail) {
  // Expects a server message first; the SUT waits for a ClientHello.
  testgen::TestCase t;
  t.lts.add_state();
  t.lts.add_state();
  t.lts.set_initial(0);
  t.lts.add_transition(
      0, ActionLabel{"SERVERHELLO", Direction::observation, std::nullopt}, 1);
  t.lts.annotate(1, std::string(testgen::kVerdictKey), "pass");
  exec::SimulatedSut sut(cfg(), MutantId::conforming);
  const auto r = exec::run(t, sut, handshake(), exec::milliseconds(50),
                           exec::default_payloads(cfg()));
  EXPECT_EQ(r.verdict, Verdict::fail);
  EXPECT_EQ(r.end, exec::EndReason::timeout);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_TRUE(r.conformance);
}

TEST(Run, PayloadFreeStimulusUsesDefaults) {
  const auto t = tcio::parse_dot(
      "digraph g { 0 -> 1 [label=\"CLIENTHELLO\", kind=\"stimulus\"]; "
      "1 -> 2 [label=\"SERVERHELLO\"]; 2 [verdict=pass]; }");
  exec::SimulatedSut sut(cfg(), MutantId::conforming);
  const auto r = exec::run(t, sut, handshake(), kStep,
                           exec::default_payloads(cfg()));
  EXPECT_EQ(r.verdict, Verdict::pass) << exec::report_to_text(r);
  ASSERT_EQ(r.trace.size(), 2u);
  EXPECT_EQ(r.trace[0].payload,
            exec::default_payloads(cfg()).at("CLIENTHELLO"));
}

TEST(Run, UnbuildableStimulusIsSetupError) {
  const auto t = tcio::parse_dot(
      "digraph g { 0 -> 1 [label=\"SERVERHELLODONE\", kind=\"stimulus\"]; "
      "1 [verdict=pass]; }");
  exec::SimulatedSut sut(cfg(), MutantId::conforming);
  EXPECT_THROW(exec::run(t, sut, handshake(), kStep,
                         exec::default_payloads(cfg())),
               exec::SetupError);
}

TEST(Defaults, LoadOverrides) {
  const auto path =
      std::filesystem::temp_directory_path() / "tlsmbt_defaults_test.json";
  {
    std::ofstream out(path);
    out << R"({"FINISHED_C": "FINISHED_C {mac_id=42}"})";
  }
  const auto d = exec::load_message_defaults(path.string(),
                                             exec::default_payloads(cfg()));
  EXPECT_EQ(d.at("FINISHED_C"),
            messages::HandshakeMessage(messages::FinishedClient{42}));
  {
    std::ofstream out(path);
    out << R"({"FINISHED_C": "FINISHED_S {mac_id=42}"})";
  }
  EXPECT_THROW(exec::load_message_defaults(path.string(), {}), exec::SetupError);
  {
    std::ofstream out(path);
    out << R"({"BOGUS": "FINISHED_S {mac_id=42}"})";
  }
  EXPECT_THROW(exec::load_message_defaults(path.string(), {}), exec::SetupError);
  std::filesystem::remove(path);
  EXPECT_THROW(exec::load_message_defaults(path.string(), {}), exec::SetupError);
}

TEST(Conformance, Examples) {
  EXPECT_TRUE(exec::check_conformance({}, handshake()));
  // Renegotiation answered with an alert is model behaviour.
  const auto pass = run_local(2, MutantId::conforming);
  lts::Trace short_trace;
  for (const auto& l : pass.trace) {
    if (l.gate != "CERTIFICATE_S") short_trace.push_back(l);
  }
  // CH SH EE CH ALERT
  ASSERT_EQ(short_trace.size(), 5u);
  EXPECT_TRUE(exec::check_conformance(short_trace, handshake()));
  const auto tolerant = run_local(2, MutantId::renegotiation_tolerant);
  EXPECT_EQ(tolerant.trace.back().gate, "SERVERHELLO");
  EXPECT_FALSE(exec::check_conformance(tolerant.trace, handshake()));
}

TEST(Report, JsonSchema) {
  const auto r = run_local(2, MutantId::conforming);
  const auto j = nlohmann::json::parse(exec::report_to_json(r));
  EXPECT_EQ(j.at("schema"), "report_v1");
  EXPECT_EQ(j.at("verdict"), "pass");
  EXPECT_EQ(j.at("conformance"), true);
  ASSERT_EQ(j.at("log").size(), 6u);
  ASSERT_EQ(j.at("actions").size(), 6u);
  EXPECT_EQ(j.at("log")[5], "Action #6: ALERT(unexpected_message)");
  EXPECT_EQ(j.at("actions")[5].at("message"),
            "ALERT {level=fatal,description=unexpected_message}");
  EXPECT_NE(exec::report_to_text(r).find("Verdict: pass"), std::string::npos);
}

// ---- TCP --------------------------------------------------------------------

TEST(Frame, BigEndianLengthPrefix) {
  EXPECT_EQ(exec::encode_frame("NEXT {}"), std::string("\0\0\0\7NEXT {}", 11));
  EXPECT_EQ(exec::encode_frame(std::string(258, 'x')).substr(0, 4),
            std::string("\0\0\1\2", 4));
}

TEST(Endpoint, Parse) {
  const auto e = exec::parse_endpoint("127.0.0.1:4433");
  EXPECT_EQ(e.host, "127.0.0.1");
  EXPECT_EQ(e.port, 4433);
  for (const char* bad : {"localhost", ":1", "h:", "h:70000", "h:12x"}) {
    EXPECT_THROW(exec::parse_endpoint(bad), exec::SetupError) << bad;
  }
}

// A raw peer that answers the first pull with `reply` bytes.
class RawPeer {
 public:
  explicit RawPeer(std::string reply) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    ::listen(fd_, 1);
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    thread_ = std::thread([this, reply] {
      int c = ::accept(fd_, nullptr, nullptr);
      char buf[64];
      (void)::recv(c, buf, sizeof buf, 0);
      (void)::send(c, reply.data(), reply.size(), MSG_NOSIGNAL);
      (void)::recv(c, buf, sizeof buf, 0);  // until the client hangs up
      ::close(c);
    });
  }
  ~RawPeer() {
    thread_.join();
    ::close(fd_);
  }
  std::uint16_t port() const { return port_; }

 private:
  int fd_;
  std::uint16_t port_ = 0;
  std::thread thread_;
};

TEST(Tcp, DegenerateFramesCloseTheSession) {
  for (const std::string reply :
       {std::string("\0\0\0\0", 4), std::string("\xff\xff\xff\xff", 4),
        exec::encode_frame("NOT A MESSAGE")}) {
    RawPeer peer(reply);
    exec::TcpTransport t("127.0.0.1", peer.port());
    EXPECT_TRUE(std::holds_alternative<exec::ConnectionClosed>(
        t.receive(exec::milliseconds(2000))));
    // Stays closed.
    EXPECT_TRUE(std::holds_alternative<exec::ConnectionClosed>(
        t.receive(exec::milliseconds(10))));
    t.close();
  }
}

TEST(Tcp, ConnectFailureIsSetupError) {
  std::uint16_t port;
  {
    exec::SutServer s({"127.0.0.1", 0}, cfg(), MutantId::conforming);
    port = s.port();
  }
  EXPECT_THROW(exec::TcpTransport("127.0.0.1", port), exec::SetupError);
  EXPECT_THROW(exec::TcpTransport("no-such-host.invalid", 1), exec::SetupError);
}

TEST(Tcp, BindFailureIsSetupError) {
  exec::SutServer s({"127.0.0.1", 0}, cfg(), MutantId::conforming);
  EXPECT_THROW(exec::SutServer({"127.0.0.1", s.port()}, cfg(),
                               MutantId::conforming),
               exec::SetupError);
}

TEST(Tcp, TimeoutHonoursDeadline) {
  exec::SutServer s({"127.0.0.1", 0}, cfg(), MutantId::conforming);
  exec::TcpTransport t("127.0.0.1", s.port());
  const auto start = std::chrono::steady_clock::now();
  EXPECT_EQ(t.receive(exec::milliseconds(100)),
            exec::SutEvent(exec::Timeout{exec::milliseconds(100)}));
  const auto took = std::chrono::steady_clock::now() - start;
  EXPECT_GE(took, exec::milliseconds(90));
  EXPECT_LT(took, exec::milliseconds(1000));
}

TEST(Tcp, SameReportsAsInProcess) {
  for (MutantId m : exec::all_mutants()) {
    exec::SutServer server({"127.0.0.1", 0}, cfg(), m);
    for (int which = 1; which <= 3; ++which) {
      const auto local = run_local(which, m);
      const auto remote = run_tcp(which, server.port());
      EXPECT_TRUE(exec::same_outcome(local, remote))
          << exec::to_string(m) << " TC " << which << "\n"
          << exec::report_to_text(local) << "--\n"
          << exec::report_to_text(remote);
    }
  }
}

TEST(Tcp, ConcurrentSessionsAreIndependent) {
  exec::SutServer server({"127.0.0.1", 0}, cfg(), MutantId::conforming);
  std::vector<std::future<exec::ExecutionReport>> runs;
  for (int i = 0; i < 8; ++i) {
    runs.push_back(std::async(std::launch::async, [&, i] {
      return run_tcp(1 + i % 3, server.port());
    }));
  }
  for (auto& f : runs) EXPECT_EQ(f.get().verdict, Verdict::pass);
}

}  // namespace
}  // namespace tlsmbt
