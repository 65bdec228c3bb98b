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

#include <array>
#include <utility>

#include "tlsmbt/exec.h"

namespace tlsmbt::exec {
namespace {

using messages::Direction;

constexpr std::array<std::pair<MutantId, std::string_view>, 4> kMutantNames{{
    {MutantId::conforming, "conforming"},
    {MutantId::renegotiation_tolerant, "renegotiation_tolerant"},
    {MutantId::certrequest_rejecter, "certrequest_rejecter"},
    {MutantId::hrr_same_crypto, "hrr_same_crypto"},
}};

}  // namespace

std::string_view to_string(MutantId m) {
  for (const auto& [id, name] : kMutantNames) {
    if (id == m) return name;
  }
  return "?";
}

std::optional<MutantId> mutant_from_string(std::string_view s) {
  for (const auto& [id, name] : kMutantNames) {
    if (name == s) return id;
  }
  return std::nullopt;
}

const std::vector<MutantId>& all_mutants() {
  static const std::vector<MutantId> all = [] {
    std::vector<MutantId> v;
    for (const auto& entry : kMutantNames) v.push_back(entry.first);
    return v;
  }();
  return all;
}

model::ServerBehavior behavior_of(MutantId m) {
  model::ServerBehavior b;
  b.guard_renegotiation = true;
  switch (m) {
    case MutantId::conforming:
      break;
    case MutantId::renegotiation_tolerant:
      b.renegotiation = model::RenegotiationResponse::server_hello;
      break;
    case MutantId::certrequest_rejecter:
      b.reject_at_certificate_request = true;
      break;
    case MutantId::hrr_same_crypto:
      b.hrr_payload = model::HrrPayload::echo_client_hello;
      break;
  }
  return b;
}

SimulatedSut::SimulatedSut(const model::ModelConfig& cfg, MutantId mutant)
    : server_(model::build_server(cfg, behavior_of(mutant))),
      state_(server_.initial()) {}

// The server process is deterministic on its outputs: every state has at
// most one server-sent edge, so the first one found is the only one.
SimulatedSut::Output SimulatedSut::next_output() {
  if (pending_) {
    HandshakeMessage m = std::move(*pending_);
    pending_.reset();
    return m;
  }
  if (closed_) return Closed{};
  for (std::size_t i : server_.outgoing(state_)) {
    const lts::Transition& t = server_.transitions()[i];
    if (t.label.direction == Direction::observation && t.label.payload) {
      state_ = t.target;
      return *t.label.payload;
    }
  }
  if (server_.is_sink(state_)) {
    closed_ = true;
    return Closed{};
  }
  return Quiet{};
}

void SimulatedSut::send(const HandshakeMessage& m) {
  if (closed_) return;
  for (std::size_t i : server_.outgoing(state_)) {
    const lts::Transition& t = server_.transitions()[i];
    if (t.label.direction == Direction::stimulus && t.label.payload == m) {
      state_ = t.target;
      return;
    }
  }
  pending_ = model::fatal_alert(messages::AlertType::unexpected_message);
  closed_ = true;
}

SutEvent SimulatedSut::receive(milliseconds timeout) {
  Output out = next_output();
  if (auto* m = std::get_if<HandshakeMessage>(&out)) return std::move(*m);
  if (std::holds_alternative<Quiet>(out)) return Timeout{timeout};
  return ConnectionClosed{"session closed by peer"};
}

}  // namespace tlsmbt::exec
