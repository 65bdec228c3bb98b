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

#include "tlsmbt/model.h"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace tlsmbt::model {
namespace {

using messages::Alert;
using messages::AlertType;
using messages::CertificateClient;
using messages::CertificateRequest;
using messages::CertificateServer;
using messages::CertificateVerifyClient;
using messages::CertificateVerifyServer;
using messages::ClientHello;
using messages::EncryptedExtensions;
using messages::ExtensionType;
using messages::FinishedClient;
using messages::FinishedServer;
using messages::Gate;
using messages::HelloRetryRequest;
using messages::ProtocolVersion;
using messages::Sender;
using messages::ServerHello;

// Fixed symbolic ids of the non-negotiated payloads.
constexpr std::uint32_t kServerCertId = 1;
constexpr std::uint32_t kClientCertId = 2;
constexpr std::uint32_t kServerSignatureId = 1;
constexpr std::uint32_t kClientSignatureId = 2;
constexpr std::uint32_t kServerMacId = 1;
constexpr std::uint32_t kClientMacId = 2;
constexpr std::uint32_t kCertificateRequestId = 1;
constexpr std::uint32_t kSupportedGroupsPayload = 29;  // x25519

// Descriptions a server may abort with, as seen by the client.
constexpr AlertType kServerAlerts[] = {
    AlertType::missing_extension, AlertType::unexpected_message,
    AlertType::unsupported_certificate, AlertType::illegal_parameter,
    AlertType::handshake_failure, AlertType::decode_error};
// Descriptions the model client aborts with.
constexpr AlertType kClientAlerts[] = {AlertType::illegal_parameter,
                                       AlertType::unexpected_message};

// Label-building helper around an Lts with optional named states.
class Builder {
 public:
  StateId state(const std::string& name) {
    auto [it, inserted] = named_.try_emplace(name, 0);
    if (inserted) it->second = lts_.add_state();
    return it->second;
  }
  StateId fresh() { return lts_.add_state(); }

  void send(StateId from, Sender who, const HandshakeMessage& m, StateId to) {
    lts_.add_transition(from, messages::label_of(m, who), to);
  }

  void raw(StateId from, ActionLabel label, StateId to) {
    lts_.add_transition(from, std::move(label), to);
  }

  Lts take(StateId initial) {
    lts_.set_initial(initial);
    return std::move(lts_);
  }

 private:
  Lts lts_;
  std::map<std::string, StateId> named_;
};

CryptoInfo legacy_client_hello_crypto(CipherSuite suite) {
  CryptoInfo c = client_hello_crypto(suite, KeyShareToken::valid_share);
  std::erase_if(c.extensions, [](const messages::Extension& e) {
    return e.extension_type == ExtensionType::supported_versions;
  });
  return c;
}

std::vector<KeyShareToken> initial_shares(const ModelConfig& cfg) {
  std::vector<KeyShareToken> shares{cfg.key_share_initial};
  if (cfg.enable_hrr_branch &&
      cfg.key_share_initial != KeyShareToken::invalid_share) {
    shares.push_back(KeyShareToken::invalid_share);
  }
  return shares;
}

// Every HRR payload a client is prepared to read after sending `sent`:
// a proper retry for each configured suite, an echo of its own hello, and
// the unset crypto slot.
std::vector<CryptoInfo> hrr_candidates(const ModelConfig& cfg,
                                       const CryptoInfo& sent) {
  std::vector<CryptoInfo> out;
  for (CipherSuite suite : cfg.cipher_suites) {
    out.push_back(hello_retry_crypto(suite));
  }
  out.push_back(sent);
  out.push_back(unset_server_crypto());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void accept_alerts(Builder& b, StateId at, Sender from,
                   std::span<const AlertType> descriptions, StateId to) {
  for (AlertType d : descriptions) b.send(at, from, fatal_alert(d), to);
}

// States after the negotiated ServerHello, shared by every client path.
void build_client_content(Builder& b, StateId negotiated, bool client_auth) {
  const StateId aborted = b.state("aborted");
  const StateId connected = b.state("connected");
  const ModelConfig defaults;
  auto msg = [&](Gate g) { return default_message(g, defaults); };
  auto waiting = [&](StateId s) {
    accept_alerts(b, s, Sender::server, kServerAlerts, aborted);
  };

  const StateId ee = b.fresh();
  const StateId cert = b.fresh();
  const StateId verify = b.fresh();
  const StateId finished = b.fresh();
  b.send(negotiated, Sender::server, msg(Gate::ENCRYPTEDEXTENSIONS), ee);
  b.send(ee, Sender::server, msg(Gate::CERTIFICATE_S), cert);
  b.send(cert, Sender::server, msg(Gate::CERTIFICATEVERIFY_S), verify);
  b.send(verify, Sender::server, msg(Gate::FINISHED_S), finished);
  b.send(finished, Sender::client, msg(Gate::FINISHED_C), connected);
  for (StateId s : {negotiated, ee, cert, verify}) waiting(s);
  if (!client_auth) return;

  // CertificateRequest, when present, comes directly after
  // EncryptedExtensions.
  const StateId requested = b.fresh();
  const StateId cert_auth = b.fresh();
  const StateId verify_auth = b.fresh();
  const StateId finished_auth = b.fresh();
  const StateId sent_empty = b.fresh();
  const StateId sent_cert = b.fresh();
  const StateId sent_verify = b.fresh();
  b.send(ee, Sender::server, msg(Gate::CERTIFICATEREQUEST), requested);
  b.send(requested, Sender::server, msg(Gate::CERTIFICATE_S), cert_auth);
  b.send(cert_auth, Sender::server, msg(Gate::CERTIFICATEVERIFY_S),
         verify_auth);
  b.send(verify_auth, Sender::server, msg(Gate::FINISHED_S), finished_auth);
  // An empty certificate is not followed by a CertificateVerify.
  b.send(finished_auth, Sender::client, CertificateClient{std::nullopt},
         sent_empty);
  b.send(sent_empty, Sender::client, msg(Gate::FINISHED_C), connected);
  b.send(finished_auth, Sender::client, CertificateClient{kClientCertId},
         sent_cert);
  b.send(sent_cert, Sender::client, msg(Gate::CERTIFICATEVERIFY_C),
         sent_verify);
  b.send(sent_verify, Sender::client, msg(Gate::FINISHED_C), connected);
  for (StateId s : {requested, cert_auth, verify_auth}) waiting(s);
}

}  // namespace

void ModelConfig::validate() const {
  if (cipher_suites.empty()) {
    throw std::invalid_argument("model config: cipher_suites is empty");
  }
  if (cipher_suites.size() > 3) {
    throw std::invalid_argument("model config: at most 3 cipher suites");
  }
  std::set<CipherSuite> unique(cipher_suites.begin(), cipher_suites.end());
  if (unique.size() != cipher_suites.size()) {
    throw std::invalid_argument("model config: duplicate cipher suite");
  }
}

CryptoInfo client_hello_crypto(CipherSuite suite, KeyShareToken share) {
  using namespace messages;
  return CryptoInfo{
      ProtocolVersion::TLS13,
      suite,
      share,
      {make_extension(SupportedVersions{{ProtocolVersion::TLS13}}),
       make_extension(SignatureAlgorithms{{0x0403, 0x0804}}),
       make_extension(SupportedGroups{kSupportedGroupsPayload}),
       make_extension(KeyShare{share})}};
}

CryptoInfo server_hello_crypto(CipherSuite suite, KeyShareToken share) {
  using namespace messages;
  return CryptoInfo{
      ProtocolVersion::TLS13,
      suite,
      share,
      {make_extension(SupportedVersions{{ProtocolVersion::TLS13}}),
       make_extension(KeyShare{share})}};
}

CryptoInfo hello_retry_crypto(CipherSuite suite) {
  return server_hello_crypto(suite, KeyShareToken::corrected_share);
}

CryptoInfo unset_server_crypto() {
  return CryptoInfo{ProtocolVersion::TLS12,
                    CipherSuite::TLS_AES_128_GCM_SHA256,
                    KeyShareToken::valid_share,
                    {}};
}

HandshakeMessage fatal_alert(AlertType description) {
  return Alert{messages::AlertLevel::fatal, description};
}

HandshakeMessage default_message(Gate gate, const ModelConfig& cfg) {
  const CipherSuite suite = cfg.cipher_suites.empty()
                                ? CipherSuite::TLS_AES_128_GCM_SHA256
                                : cfg.cipher_suites.front();
  switch (gate) {
    case Gate::CLIENTHELLO:
      return ClientHello{client_hello_crypto(suite, cfg.key_share_initial)};
    case Gate::SERVERHELLO:
      return ServerHello{server_hello_crypto(suite, cfg.key_share_initial)};
    case Gate::HELLORETRYREQUEST:
      return HelloRetryRequest{hello_retry_crypto(suite)};
    case Gate::ENCRYPTEDEXTENSIONS:
      return EncryptedExtensions{{messages::make_extension(
          messages::ServerName{0})}};
    case Gate::CERTIFICATEREQUEST:
      return CertificateRequest{
          kCertificateRequestId,
          {messages::make_extension(
              messages::SignatureAlgorithms{{0x0403, 0x0804}})}};
    case Gate::CERTIFICATE_S:
      return CertificateServer{kServerCertId};
    case Gate::CERTIFICATE_C:
      return CertificateClient{kClientCertId};
    case Gate::CERTIFICATEVERIFY_S:
      return CertificateVerifyServer{kServerSignatureId};
    case Gate::CERTIFICATEVERIFY_C:
      return CertificateVerifyClient{kClientSignatureId};
    case Gate::FINISHED_S:
      return FinishedServer{kServerMacId};
    case Gate::FINISHED_C:
      return FinishedClient{kClientMacId};
    case Gate::ALERT:
      return fatal_alert(AlertType::unexpected_message);
  }
  throw std::invalid_argument("default_message: unknown gate");
}

ActionLabel renegotiation_trigger(const ModelConfig& cfg) {
  return messages::label_of(default_message(Gate::CLIENTHELLO, cfg),
                            Sender::client);
}

ModelConfig parse_model_config(std::string_view json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("model config: ") + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("model config: top level must be an object");
  }
  ModelConfig cfg;
  try {
    for (const auto& [name, value] : j.items()) {
      if (name == "enable_hrr_branch") {
        cfg.enable_hrr_branch = value.get<bool>();
      } else if (name == "enable_client_auth") {
        cfg.enable_client_auth = value.get<bool>();
      } else if (name == "inject_hrr_crypto_bug") {
        cfg.inject_hrr_crypto_bug = value.get<bool>();
      } else if (name == "key_share_initial") {
        auto share = messages::key_share_from_string(value.get<std::string>());
        if (!share) {
          throw std::invalid_argument("model config: unknown key share " +
                                      value.get<std::string>());
        }
        cfg.key_share_initial = *share;
      } else if (name == "cipher_suites") {
        cfg.cipher_suites.clear();
        for (const auto& item : value) {
          auto suite = messages::cipher_suite_from_string(item.get<std::string>());
          if (!suite) {
            throw std::invalid_argument("model config: unknown cipher suite " +
                                        item.get<std::string>());
          }
          cfg.cipher_suites.push_back(*suite);
        }
      } else {
        throw std::invalid_argument("model config: unknown key " + name);
      }
    }
  } catch (const json::type_error& e) {
    throw std::invalid_argument(std::string("model config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("model config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model_config(buffer.str());
}

std::string model_config_to_json(const ModelConfig& cfg) {
  nlohmann::ordered_json j;
  j["enable_hrr_branch"] = cfg.enable_hrr_branch;
  j["enable_client_auth"] = cfg.enable_client_auth;
  auto& suites = j["cipher_suites"] = nlohmann::ordered_json::array();
  for (CipherSuite s : cfg.cipher_suites) suites.push_back(to_string(s));
  j["key_share_initial"] = to_string(cfg.key_share_initial);
  j["inject_hrr_crypto_bug"] = cfg.inject_hrr_crypto_bug;
  return j.dump(2) + "\n";
}

Lts build_client(const ModelConfig& cfg) {
  cfg.validate();
  Builder b;
  const StateId start = b.state("start");
  const StateId aborted = b.state("aborted");
  const StateId negotiated = b.state("negotiated");

  for (CipherSuite suite : cfg.cipher_suites) {
    for (KeyShareToken share : initial_shares(cfg)) {
      const CryptoInfo hello = client_hello_crypto(suite, share);
      const StateId await_first = b.fresh();
      b.send(start, Sender::client, ClientHello{hello}, await_first);
      accept_alerts(b, await_first, Sender::server, kServerAlerts, aborted);
      b.send(await_first, Sender::server,
             ServerHello{server_hello_crypto(suite, share)}, negotiated);
      if (!cfg.enable_hrr_branch) continue;

      for (const CryptoInfo& retry : hrr_candidates(cfg, hello)) {
        const StateId got_retry = b.fresh();
        b.send(await_first, Sender::server, HelloRetryRequest{retry},
               got_retry);
        if (messages::crypto_info_equal(retry, hello)) {
          // A retry that changes nothing is an illegal parameter.
          b.send(got_retry, Sender::client,
                 fatal_alert(AlertType::illegal_parameter), aborted);
          continue;
        }
        const CryptoInfo second =
            client_hello_crypto(suite, KeyShareToken::corrected_share);
        const StateId await_second = b.fresh();
        b.send(got_retry, Sender::client, ClientHello{second}, await_second);
        accept_alerts(b, await_second, Sender::server, kServerAlerts, aborted);
        // The ServerHello must repeat the retry's version and suite.
        for (CipherSuite offered : cfg.cipher_suites) {
          const CryptoInfo hello_back =
              server_hello_crypto(offered, KeyShareToken::corrected_share);
          if (hello_back.version == retry.version &&
              hello_back.cipher_suite == retry.cipher_suite) {
            b.send(await_second, Sender::server, ServerHello{hello_back},
                   negotiated);
          } else {
            const StateId mismatch = b.fresh();
            b.send(await_second, Sender::server, ServerHello{hello_back},
                   mismatch);
            b.send(mismatch, Sender::client,
                   fatal_alert(AlertType::illegal_parameter), aborted);
          }
        }
        // At most one retry per handshake.
        for (const CryptoInfo& again : hrr_candidates(cfg, second)) {
          const StateId twice = b.fresh();
          b.send(await_second, Sender::server, HelloRetryRequest{again},
                 twice);
          b.send(twice, Sender::client,
                 fatal_alert(AlertType::unexpected_message), aborted);
        }
      }
    }
  }
  build_client_content(b, negotiated, cfg.enable_client_auth);
  return b.take(start);
}

Lts build_server(const ModelConfig& cfg) {
  return build_server(cfg, ServerBehavior{});
}

Lts build_server(const ModelConfig& cfg, const ServerBehavior& behavior) {
  cfg.validate();
  Builder b;
  const StateId start = b.state("start");
  const StateId closed = b.state("closed");
  const StateId hello_sent = b.state("hello-sent");
  const StateId connected = b.state("connected");
  std::vector<StateId> open_states{start, hello_sent};

  std::vector<CryptoInfo> hellos;
  for (CipherSuite suite : cfg.cipher_suites) {
    for (KeyShareToken share :
         {KeyShareToken::valid_share, KeyShareToken::invalid_share,
          KeyShareToken::corrected_share}) {
      hellos.push_back(client_hello_crypto(suite, share));
    }
  }

  for (const CryptoInfo& hello : hellos) {
    const StateId got = b.fresh();
    open_states.push_back(got);
    b.send(start, Sender::client, ClientHello{hello}, got);
    if (hello.key_share != KeyShareToken::invalid_share) {
      b.send(got, Sender::server,
             ServerHello{server_hello_crypto(hello.cipher_suite,
                                             hello.key_share)},
             hello_sent);
      continue;
    }
    if (!cfg.enable_hrr_branch) {
      b.send(got, Sender::server, fatal_alert(AlertType::handshake_failure),
             closed);
      continue;
    }
    CryptoInfo retry = hello_retry_crypto(hello.cipher_suite);
    if (behavior.hrr_payload == HrrPayload::echo_client_hello) {
      retry = hello;
    } else if (cfg.inject_hrr_crypto_bug) {
      retry = unset_server_crypto();
    }
    const StateId retry_sent = b.fresh();
    open_states.push_back(retry_sent);
    b.send(got, Sender::server, HelloRetryRequest{retry}, retry_sent);
    for (const CryptoInfo& second : hellos) {
      const StateId got_second = b.fresh();
      open_states.push_back(got_second);
      b.send(retry_sent, Sender::client, ClientHello{second}, got_second);
      if (second.key_share == KeyShareToken::invalid_share) {
        b.send(got_second, Sender::server,
               fatal_alert(AlertType::handshake_failure), closed);
      } else {
        // The suite was fixed by the retry.
        b.send(got_second, Sender::server,
               ServerHello{server_hello_crypto(hello.cipher_suite,
                                               second.key_share)},
               hello_sent);
      }
    }
  }

  // A ClientHello without supported_versions is refused outright.
  for (CipherSuite suite : cfg.cipher_suites) {
    const StateId got_legacy = b.fresh();
    open_states.push_back(got_legacy);
    // Not a valid message, so the label is built without label_of().
    b.raw(start,
          ActionLabel{std::string(messages::gate_name(Gate::CLIENTHELLO)),
                      messages::Direction::stimulus,
                      ClientHello{legacy_client_hello_crypto(suite)}},
          got_legacy);
    b.send(got_legacy, Sender::server,
           fatal_alert(AlertType::missing_extension), closed);
  }

  auto msg = [&](Gate g) { return default_message(g, cfg); };
  const StateId ee_sent = b.fresh();
  b.send(hello_sent, Sender::server, msg(Gate::ENCRYPTEDEXTENSIONS), ee_sent);
  open_states.push_back(ee_sent);
  if (behavior.reject_at_certificate_request) {
    b.send(ee_sent, Sender::server, fatal_alert(AlertType::unexpected_message),
           closed);
  } else {
    StateId before_cert = ee_sent;
    if (cfg.enable_client_auth) {
      before_cert = b.fresh();
      open_states.push_back(before_cert);
      b.send(ee_sent, Sender::server, msg(Gate::CERTIFICATEREQUEST),
             before_cert);
    }
    const StateId cert_sent = b.fresh();
    const StateId verify_sent = b.fresh();
    const StateId finished_sent = b.fresh();
    open_states.insert(open_states.end(),
                       {cert_sent, verify_sent, finished_sent});
    b.send(before_cert, Sender::server, msg(Gate::CERTIFICATE_S), cert_sent);
    b.send(cert_sent, Sender::server, msg(Gate::CERTIFICATEVERIFY_S),
           verify_sent);
    b.send(verify_sent, Sender::server, msg(Gate::FINISHED_S), finished_sent);
    if (cfg.enable_client_auth) {
      const StateId got_empty = b.fresh();
      const StateId got_cert = b.fresh();
      const StateId got_verify = b.fresh();
      open_states.insert(open_states.end(), {got_empty, got_cert, got_verify});
      b.send(finished_sent, Sender::client, CertificateClient{std::nullopt},
             got_empty);
      b.send(finished_sent, Sender::client, CertificateClient{kClientCertId},
             got_cert);
      b.send(got_cert, Sender::client, msg(Gate::CERTIFICATEVERIFY_C),
             got_verify);
      b.send(got_empty, Sender::client, msg(Gate::FINISHED_C), connected);
      b.send(got_verify, Sender::client, msg(Gate::FINISHED_C), connected);
    } else {
      b.send(finished_sent, Sender::client, msg(Gate::FINISHED_C), connected);
    }
  }

  for (StateId s : open_states) {
    accept_alerts(b, s, Sender::client, kClientAlerts, closed);
  }
  Lts server = b.take(start);
  if (!behavior.guard_renegotiation) return server;

  const ActionLabel trigger = renegotiation_trigger(cfg);
  const HandshakeMessage reply =
      behavior.renegotiation == RenegotiationResponse::alert
          ? fatal_alert(AlertType::unexpected_message)
          : HandshakeMessage{ServerHello{server_hello_crypto(
                cfg.cipher_suites.front(), cfg.key_share_initial)}};
  return disrupt_within(server, content_states(server), trigger,
                        single_reply_handler(reply));
}

Lts compose_handshake(const Lts& client, const Lts& server) {
  // Every handshake gate synchronizes; configs may leave some gates unused.
  std::set<std::string> used = client.gates();
  used.merge(server.gates());
  std::set<std::string> gates;
  for (Gate g : messages::all_gates()) {
    std::string name(messages::gate_name(g));
    if (used.contains(name)) gates.insert(std::move(name));
  }
  return lts::compose(client, server, gates);
}

Lts build_handshake_model(const ModelConfig& cfg) {
  Lts composed = compose_handshake(build_client(cfg), build_server(cfg));
  // TLS 1.3 refuses renegotiation without a HelloRetryRequest.
  return disrupt_within(
      composed, content_states(composed), renegotiation_trigger(cfg),
      single_reply_handler(fatal_alert(AlertType::unexpected_message)));
}

std::vector<StateId> content_states(const Lts& l) {
  std::vector<StateId> out;
  if (l.empty()) return out;
  const std::string server_hello(messages::gate_name(Gate::SERVERHELLO));
  const std::string alert(messages::gate_name(Gate::ALERT));
  std::vector<bool> reachable(l.state_count(), false);
  for (StateId s : lts::reachable_states(l)) reachable[s] = true;

  std::vector<bool> in_block(l.state_count(), false);
  std::vector<bool> alerted(l.state_count(), false);
  std::deque<StateId> queue;
  for (const auto& t : l.transitions()) {
    if (!reachable[t.source]) continue;
    if (t.label.gate == alert) alerted[t.target] = true;
    if (t.label.gate == server_hello && !in_block[t.target]) {
      in_block[t.target] = true;
      queue.push_back(t.target);
    }
  }
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (std::size_t i : l.outgoing(s)) {
      const auto& t = l.transitions()[i];
      if (t.label.gate == alert || in_block[t.target]) continue;
      in_block[t.target] = true;
      queue.push_back(t.target);
    }
  }
  for (StateId s = 0; s < l.state_count(); ++s) {
    if (in_block[s] && !alerted[s] && !l.is_sink(s)) out.push_back(s);
  }
  return out;
}

Lts disrupt_within(const Lts& l, const std::vector<StateId>& scope,
                   const ActionLabel& trigger, const Lts& handler) {
  if (scope.empty()) return l;
  std::map<StateId, StateId> local;
  Lts body;
  for (StateId s : scope) local.emplace(s, body.add_state());
  body.set_initial(local.at(scope.front()));
  for (const auto& t : l.transitions()) {
    if (!local.contains(t.source)) continue;
    if (t.label == trigger) {
      throw lts::LtsError("disrupt_within: trigger already leaves state " +
                          std::to_string(t.source));
    }
    if (local.contains(t.target)) {
      body.add_transition(local.at(t.source), t.label, local.at(t.target));
    }
  }
  const Lts disrupted = lts::disrupt(body, trigger, handler);

  // Graft the handler copy and the trigger edges back onto `l`.
  Lts out = l;
  std::vector<StateId> global(disrupted.state_count());
  for (const auto& [outer, inner] : local) global[inner] = outer;
  for (StateId s = static_cast<StateId>(body.state_count());
       s < disrupted.state_count(); ++s) {
    global[s] = out.add_state();
    for (const auto& [k, v] : disrupted.annotations(s)) {
      out.annotate(global[s], k, v);
    }
  }
  for (const auto& t : disrupted.transitions()) {
    if (t.source >= body.state_count() || t.target >= body.state_count()) {
      out.add_transition(global[t.source], t.label, global[t.target]);
    }
  }
  return out;
}

Lts single_reply_handler(const HandshakeMessage& message) {
  Lts handler;
  const StateId waiting = handler.add_state();
  const StateId done = handler.add_state();
  handler.set_initial(waiting);
  handler.add_transition(waiting, messages::label_of(message, Sender::server),
                         done);
  return handler;
}

}  // namespace tlsmbt::model
