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

// TLS 1.3 handshake client and server processes over the symbolic message
// domain, and their rendezvous composition.
//
// Abort semantics: a violated requirement produces exactly one ALERT
// transition into a deadlocked state.

#ifndef TLSMBT_MODEL_H_
#define TLSMBT_MODEL_H_

#include <string>
#include <string_view>
#include <vector>

#include "tlsmbt/lts.h"
#include "tlsmbt/messages.h"

namespace tlsmbt::model {

using lts::Lts;
using lts::StateId;
using messages::ActionLabel;
using messages::CipherSuite;
using messages::CryptoInfo;
using messages::HandshakeMessage;
using messages::KeyShareToken;

struct ModelConfig {
  bool enable_hrr_branch = true;
  bool enable_client_auth = false;
  std::vector<CipherSuite> cipher_suites{CipherSuite::TLS_AES_128_GCM_SHA256};
  KeyShareToken key_share_initial = KeyShareToken::valid_share;
  // Reintroduces the HelloRetryRequest defect: the server fills the HRR from
  // its ServerHello crypto slot, which is still unset at that point.
  bool inject_hrr_crypto_bug = false;

  // Throws std::invalid_argument on an empty or oversized suite list.
  void validate() const;
};

ModelConfig parse_model_config(std::string_view json_text);
ModelConfig load_model_config(const std::string& path);
std::string model_config_to_json(const ModelConfig& cfg);

// Symbolic payloads.
CryptoInfo client_hello_crypto(CipherSuite suite, KeyShareToken share);
CryptoInfo server_hello_crypto(CipherSuite suite, KeyShareToken share);
CryptoInfo hello_retry_crypto(CipherSuite suite);
// What an uninitialized ServerHello slot holds.
CryptoInfo unset_server_crypto();
// Fixed default message for every gate, used to concretize abstract labels.
HandshakeMessage default_message(messages::Gate gate, const ModelConfig& cfg);
HandshakeMessage fatal_alert(messages::AlertType description);

// The ClientHello that, arriving mid-handshake, counts as renegotiation.
ActionLabel renegotiation_trigger(const ModelConfig& cfg);

// Server deviations used by the simulated SUT's mutants. The default value
// is the conforming server.
enum class HrrPayload { negotiated, echo_client_hello };
enum class RenegotiationResponse { alert, server_hello };
struct ServerBehavior {
  HrrPayload hrr_payload = HrrPayload::negotiated;
  RenegotiationResponse renegotiation = RenegotiationResponse::alert;
  // Abort with ALERT where the CertificateRequest slot follows
  // EncryptedExtensions.
  bool reject_at_certificate_request = false;
  // Add the renegotiation disruption to the server process itself. The
  // composed model adds it after composition instead.
  bool guard_renegotiation = false;
};

Lts build_client(const ModelConfig& cfg);
Lts build_server(const ModelConfig& cfg);
Lts build_server(const ModelConfig& cfg, const ServerBehavior& behavior);

// compose(client, server, G) where G holds every handshake gate either side
// uses.
Lts compose_handshake(const Lts& client, const Lts& server);

// compose_handshake(client, server) with the renegotiation disruption over
// the post-ServerHello content block.
Lts build_handshake_model(const ModelConfig& cfg);

// States after a ServerHello that are neither terminal nor entered by an
// ALERT: the block a mid-handshake ClientHello may disrupt.
std::vector<StateId> content_states(const Lts& l);

// disrupt() restricted to `scope`; all other states are left untouched.
Lts disrupt_within(const Lts& l, const std::vector<StateId>& scope,
                   const ActionLabel& trigger, const Lts& handler);

// A two-state handler that emits `message` (sent by the server) and stops.
Lts single_reply_handler(const HandshakeMessage& message);

}  // namespace tlsmbt::model

#endif  // TLSMBT_MODEL_H_
