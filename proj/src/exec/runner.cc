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

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tlsmbt/exec.h"
#include "tlsmbt/tcio.h"

namespace tlsmbt::exec {
namespace {

using messages::ActionLabel;
using messages::Direction;
using testgen::Verdict;

ActionLabel strip_direction(ActionLabel l) {
  l.direction = Direction::observation;
  return l;
}

// Exact label first; a payload-free edge matches on the gate alone.
const lts::Transition* match_observation(const lts::Lts& l, lts::StateId s,
                                         const ActionLabel& seen) {
  const lts::Transition* by_gate = nullptr;
  for (std::size_t i : l.outgoing(s)) {
    const lts::Transition& t = l.transitions()[i];
    if (t.label.direction != Direction::observation ||
        t.label.gate != seen.gate) {
      continue;
    }
    if (t.label.payload == seen.payload) return &t;
    if (!t.label.payload && by_gate == nullptr) by_gate = &t;
  }
  return by_gate;
}

std::optional<HandshakeMessage> stimulus_payload(
    const ActionLabel& label, const MessageDefaults& defaults) {
  if (label.payload) return label.payload;
  auto it = defaults.find(label.gate);
  if (it == defaults.end()) return std::nullopt;
  return it->second;
}

}  // namespace

std::string_view to_string(EndReason r) {
  switch (r) {
    case EndReason::verdict_state: return "verdict_state";
    case EndReason::unmatched: return "unmatched";
    case EndReason::timeout: return "timeout";
    case EndReason::connection_closed: return "connection_closed";
    case EndReason::stuck: return "stuck";
  }
  return "?";
}

bool same_outcome(const ExecutionReport& a, const ExecutionReport& b) {
  return a.verdict == b.verdict && a.trace == b.trace && a.log == b.log &&
         a.conformance == b.conformance && a.end == b.end &&
         a.detail == b.detail && a.final_state == b.final_state;
}

MessageDefaults default_payloads(const model::ModelConfig& cfg) {
  MessageDefaults out;
  for (messages::Gate g : messages::all_gates()) {
    out.emplace(std::string(messages::gate_name(g)),
                model::default_message(g, cfg));
  }
  return out;
}

MessageDefaults load_message_defaults(const std::string& path,
                                      MessageDefaults base) {
  std::ifstream in(path);
  if (!in) throw SetupError("cannot read defaults file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SetupError("defaults file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw SetupError("defaults file must hold an object");
  for (const auto& [gate, body] : j.items()) {
    if (!messages::gate_from_name(gate)) {
      throw SetupError("defaults file: unknown gate " + gate);
    }
    if (!body.is_string()) {
      throw SetupError("defaults file: body of " + gate + " is not a string");
    }
    HandshakeMessage m;
    try {
      m = tcio::decode_message(body.get<std::string>());
    } catch (const tcio::WireFormatError& e) {
      throw SetupError("defaults file: " + gate + ": " + e.what());
    }
    if (messages::gate_name(messages::gate_of(m)) != gate) {
      throw SetupError("defaults file: body for " + gate +
                       " encodes another gate");
    }
    base[gate] = std::move(m);
  }
  return base;
}

void check_executable(const testgen::TestCase& tc,
                      const MessageDefaults& defaults) {
  for (const auto& t : tc.lts.transitions()) {
    if (t.label.direction == Direction::stimulus &&
        !stimulus_payload(t.label, defaults)) {
      throw SetupError("no message for stimulus " + t.label.text());
    }
  }
}

bool check_conformance(const lts::Trace& trace, const lts::Lts& model) {
  if (model.empty()) return trace.empty();
  lts::Lts plain;
  for (std::size_t i = 0; i < model.state_count(); ++i) plain.add_state();
  for (const auto& t : model.transitions()) {
    plain.add_transition(t.source, strip_direction(t.label), t.target);
  }
  plain.set_initial(model.initial());
  lts::Trace stripped;
  stripped.reserve(trace.size());
  for (const auto& l : trace) stripped.push_back(strip_direction(l));
  return lts::trace_included(plain, stripped);
}

ExecutionReport run(const testgen::TestCase& tc, SutAdapter& adapter,
                    const lts::Lts& model, milliseconds step_timeout,
                    const MessageDefaults& defaults) {
  check_executable(tc, defaults);
  const auto started = std::chrono::steady_clock::now();
  const lts::Lts& l = tc.lts;
  ExecutionReport r;

  auto record = [&](ActionLabel label) {
    r.log.push_back("Action #" + std::to_string(r.log.size() + 1) + ": " +
                    label.text());
    r.trace.push_back(std::move(label));
  };
  auto finish = [&](Verdict v, EndReason end, std::string detail) {
    r.verdict = v;
    r.end = end;
    r.detail = std::move(detail);
  };

  lts::StateId s = l.initial();
  // Acyclic, so a walk visits every state at most once.
  for (std::size_t steps = 0;; ++steps) {
    if (auto v = tc.verdict(s)) {
      finish(*v, EndReason::verdict_state,
             "reached " + std::string(testgen::to_string(*v)) + " state " +
                 std::to_string(s));
      break;
    }
    const lts::Transition* internal = nullptr;
    const lts::Transition* stimulus = nullptr;
    const lts::Transition* otherwise = nullptr;
    bool observes = false;
    for (std::size_t i : l.outgoing(s)) {
      const lts::Transition& t = l.transitions()[i];
      if (t.label.gate == testgen::kOtherwise) {
        otherwise = &t;
      } else if (t.label.direction == Direction::internal) {
        internal = internal ? internal : &t;
      } else if (t.label.direction == Direction::stimulus) {
        stimulus = stimulus ? stimulus : &t;
      } else {
        observes = true;
      }
    }
    if (steps > l.state_count() ||
        (!internal && !stimulus && !observes && !otherwise)) {
      finish(Verdict::fail, EndReason::stuck,
             "no way on from state " + std::to_string(s));
      break;
    }
    if (internal) {
      s = internal->target;
      continue;
    }
    if (stimulus) {
      ActionLabel label = stimulus->label;
      label.payload = stimulus_payload(label, defaults);
      try {
        adapter.send(*label.payload);
      } catch (const std::exception&) {
        // Surfaces as ConnectionClosed on the next receive.
      }
      record(std::move(label));
      s = stimulus->target;
      continue;
    }

    SutEvent ev;
    try {
      ev = adapter.receive(step_timeout);
    } catch (const std::exception& e) {
      ev = ConnectionClosed{e.what()};
    }
    if (const auto* t = std::get_if<Timeout>(&ev)) {
      finish(Verdict::fail, EndReason::timeout,
             "no answer within " + std::to_string(t->bound.count()) +
                 " ms at state " + std::to_string(s));
      break;
    }
    if (std::holds_alternative<ConnectionClosed>(ev)) {
      finish(Verdict::fail, EndReason::connection_closed,
             "connection closed at state " + std::to_string(s));
      break;
    }
    const HandshakeMessage& m = std::get<HandshakeMessage>(ev);
    ActionLabel seen{std::string(messages::gate_name(messages::gate_of(m))),
                     Direction::observation, m};
    const lts::Transition* next = match_observation(l, s, seen);
    const std::string text = seen.text();
    record(std::move(seen));
    if (next) {
      s = next->target;
      continue;
    }
    finish(Verdict::fail, EndReason::unmatched,
           "unexpected " + text + " at state " + std::to_string(s));
    if (otherwise) s = otherwise->target;
    break;
  }
  r.final_state = s;
  r.conformance = check_conformance(r.trace, model);
  r.elapsed = std::chrono::duration_cast<milliseconds>(
      std::chrono::steady_clock::now() - started);
  return r;
}

std::string report_to_json(const ExecutionReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "report_v1";
  j["verdict"] = testgen::to_string(r.verdict);
  j["conformance"] = r.conformance;
  j["end"] = to_string(r.end);
  j["detail"] = r.detail;
  j["final_state"] = r.final_state;
  auto actions = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const ActionLabel& l = r.trace[i];
    nlohmann::ordered_json a;
    a["index"] = i + 1;
    a["label"] = l.text();
    a["direction"] = messages::to_string(l.direction);
    a["message"] = l.payload ? tcio::encode_message(*l.payload) : "";
    actions.push_back(std::move(a));
  }
  j["actions"] = std::move(actions);
  j["log"] = r.log;
  j["elapsed_ms"] = r.elapsed.count();
  return j.dump(2) + "\n";
}

std::string report_to_text(const ExecutionReport& r) {
  std::ostringstream out;
  for (const auto& line : r.log) out << line << "\n";
  out << "Verdict: " << testgen::to_string(r.verdict) << "\n";
  out << "Conformance: " << (r.conformance ? "conform" : "non-conform")
      << "\n";
  out << "End: " << to_string(r.end) << " (" << r.detail << ")\n";
  return out.str();
}

}  // namespace tlsmbt::exec
