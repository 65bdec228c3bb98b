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

#include "tlsmbt/testgen.h"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

namespace tlsmbt::testgen {
namespace {

using messages::Direction;

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// A purpose built from a chain of labels; the last state accepts.
TestPurpose chain(const std::vector<std::string_view>& texts) {
  TestPurpose tp;
  StateId s = tp.lts.add_state();
  tp.lts.set_initial(s);
  for (std::string_view text : texts) {
    StateId next = tp.lts.add_state();
    tp.lts.add_transition(s, purpose_label(text), next);
    s = next;
  }
  tp.accept_states.insert(s);
  return tp;
}

// Deterministic order for choosing among equally short continuations.
bool spine_before(const lts::Transition& a, const lts::Transition& b) {
  return std::forward_as_tuple(a.label.text(), a.label, a.target) <
         std::forward_as_tuple(b.label.text(), b.label, b.target);
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

std::optional<Verdict> verdict_from_string(std::string_view s) {
  for (Verdict v : {Verdict::pass, Verdict::fail, Verdict::inconclusive}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

ActionLabel otherwise_label() {
  return ActionLabel{std::string(kOtherwise), Direction::observation,
                     std::nullopt};
}

ActionLabel exit_label() {
  return ActionLabel{std::string(kExit), Direction::internal, std::nullopt};
}

ActionLabel purpose_label(std::string_view text) {
  using namespace messages;
  if (text.starts_with("ALERT(") && text.ends_with(")")) {
    auto d = alert_type_from_string(text.substr(6, text.size() - 7));
    if (!d || *d == AlertType::undefined) {
      throw InvalidPurpose("purpose: unknown alert in " + std::string(text));
    }
    return label_of(Alert{AlertLevel::fatal, *d}, Sender::server);
  }
  auto gate = gate_from_name(text);
  if (!gate) {
    throw InvalidPurpose("purpose: unknown label " + std::string(text));
  }
  Direction d = is_client_only(*gate) ? Direction::stimulus
                                      : Direction::observation;
  return ActionLabel{std::string(text), d, std::nullopt};
}

void TestPurpose::validate() const {
  if (lts.empty()) throw InvalidPurpose("purpose: no states");
  if (accept_states.empty()) throw InvalidPurpose("purpose: no accept state");
  for (const auto* set : {&accept_states, &refuse_states}) {
    for (StateId s : *set) {
      if (!lts.contains(s)) {
        throw InvalidPurpose("purpose: state " + std::to_string(s) +
                             " does not exist");
      }
    }
  }
  for (StateId s : accept_states) {
    if (!lts.is_sink(s)) {
      throw InvalidPurpose("purpose: accept state " + std::to_string(s) +
                           " has outgoing edges");
    }
    if (refuse_states.contains(s)) {
      throw InvalidPurpose("purpose: state " + std::to_string(s) +
                           " both accepts and refuses");
    }
  }
  for (const auto& t : lts.transitions()) {
    purpose_label(t.label.text());
  }
}

TestPurpose purpose_I() {
  TestPurpose tp = chain({"FINISHED_C"});
  StateId refuse = tp.lts.add_state();
  tp.lts.add_transition(tp.lts.initial(), purpose_label("HELLORETRYREQUEST"),
                        refuse);
  tp.refuse_states.insert(refuse);
  return tp;
}

TestPurpose purpose_II() {
  return chain({"CLIENTHELLO", "CERTIFICATE_S", "CLIENTHELLO",
                "ALERT(unexpected_message)"});
}

TestPurpose purpose_III() {
  return chain({"HELLORETRYREQUEST", "FINISHED_C"});
}

TestPurpose accept_all() { return chain({}); }

TestPurpose purpose_by_name(std::string_view name) {
  if (name == "I") return purpose_I();
  if (name == "II") return purpose_II();
  if (name == "III") return purpose_III();
  throw InvalidPurpose("unknown purpose " + std::string(name));
}

bool purpose_label_matches(const ActionLabel& purpose,
                           const ActionLabel& model) {
  if (purpose.payload) return purpose.text() == model.text();
  return purpose.gate == model.gate;
}

Lts product(const Lts& model, const TestPurpose& tp) {
  tp.validate();
  if (model.empty()) throw UnreachableAccept("product: model has no states");
  Lts out;
  std::map<std::pair<StateId, StateId>, StateId> index;
  std::deque<std::pair<StateId, StateId>> queue;
  bool accepting = false;
  auto intern = [&](StateId m, StateId p) {
    auto [it, inserted] = index.try_emplace({m, p}, 0);
    if (inserted) {
      it->second = out.add_state();
      if (tp.accept_states.contains(p)) {
        out.annotate(it->second, std::string(kAcceptKey), "true");
        accepting = true;
      }
      if (tp.refuse_states.contains(p)) {
        out.annotate(it->second, std::string(kRefuseKey), "true");
      } else {
        queue.emplace_back(m, p);
      }
    }
    return it->second;
  };
  out.set_initial(intern(model.initial(), tp.lts.initial()));

  while (!queue.empty()) {
    auto [m, p] = queue.front();
    queue.pop_front();
    const StateId from = index.at({m, p});
    const bool absorbing = tp.accept_states.contains(p);
    for (std::size_t i : model.outgoing(m)) {
      const lts::Transition& t = model.transitions()[i];
      bool matched = false;
      if (!absorbing) {
        for (std::size_t j : tp.lts.outgoing(p)) {
          const lts::Transition& pt = tp.lts.transitions()[j];
          if (purpose_label_matches(pt.label, t.label)) {
            matched = true;
            out.add_transition(from, t.label, intern(t.target, pt.target));
          }
        }
      }
      if (!matched && (absorbing || tp.wildcard)) {
        out.add_transition(from, t.label, intern(t.target, p));
      }
    }
  }
  if (!accepting) {
    throw UnreachableAccept(
        "product: no accepting state of the test purpose is reachable");
  }
  return out;
}

std::optional<Verdict> TestCase::verdict(StateId s) const {
  auto v = lts.annotation(s, kVerdictKey);
  if (!v) return std::nullopt;
  return verdict_from_string(*v);
}

std::optional<std::string> validate_test_case(const TestCase& tc) {
  const Lts& l = tc.lts;
  if (l.empty()) return "test case has no states";
  if (!lts::is_acyclic(l)) return "test case graph has a cycle";
  bool has_pass = false;
  for (StateId s = 0; s < l.state_count(); ++s) {
    auto raw = l.annotation(s, kVerdictKey);
    const std::string name = std::to_string(s);
    if (l.is_sink(s)) {
      if (!raw) return "sink " + name + " has no verdict";
      auto v = verdict_from_string(*raw);
      if (!v) return "sink " + name + " has unknown verdict " + *raw;
      has_pass |= *v == Verdict::pass;
      continue;
    }
    if (raw) return "non-sink " + name + " carries a verdict";
    std::size_t stimuli = 0;
    std::size_t observations = 0;
    std::size_t internal = 0;
    for (std::size_t i : l.outgoing(s)) {
      switch (l.transitions()[i].label.direction) {
        case Direction::stimulus:
          ++stimuli;
          break;
        case Direction::observation:
          ++observations;
          break;
        case Direction::internal:
          ++internal;
          break;
      }
    }
    if ((stimuli > 0) + (observations > 0) + (internal > 0) > 1) {
      return "state " + name + " mixes edge kinds";
    }
    if (stimuli > 1) return "state " + name + " offers several stimuli";
  }
  if (!has_pass) return "test case has no pass sink";
  return std::nullopt;
}

TestCase extract_test_case(const Lts& p) {
  if (p.empty()) throw UnreachableAccept("extract: empty product");
  // Distance to the nearest accepting state, by reverse BFS.
  std::vector<std::vector<std::size_t>> incoming(p.state_count());
  for (std::size_t i = 0; i < p.transitions().size(); ++i) {
    incoming[p.transitions()[i].target].push_back(i);
  }
  std::vector<std::size_t> dist(p.state_count(), kUnreached);
  std::deque<StateId> queue;
  for (StateId s = 0; s < p.state_count(); ++s) {
    if (p.annotation(s, kAcceptKey)) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (std::size_t i : incoming[s]) {
      StateId src = p.transitions()[i].source;
      if (dist[src] == kUnreached) {
        dist[src] = dist[s] + 1;
        queue.push_back(src);
      }
    }
  }
  if (dist[p.initial()] == kUnreached) {
    throw UnreachableAccept(
        "extract: no accepting state of the test purpose is reachable");
  }

  std::vector<const lts::Transition*> path;
  for (StateId s = p.initial(); dist[s] > 0;) {
    const lts::Transition* best = nullptr;
    for (std::size_t i : p.outgoing(s)) {
      const lts::Transition& t = p.transitions()[i];
      if (dist[t.target] + 1 != dist[s]) continue;
      if (best == nullptr || spine_before(t, *best)) best = &t;
    }
    path.push_back(best);
    s = best->target;
  }

  TestCase tc;
  Lts& l = tc.lts;
  const auto n = static_cast<StateId>(path.size());
  for (StateId i = 0; i <= n + 1; ++i) l.add_state();
  l.set_initial(0);
  l.add_transition(n, exit_label(), n + 1);
  l.annotate(n + 1, std::string(kVerdictKey), "pass");
  std::optional<StateId> inconclusive;
  std::optional<StateId> fail;
  auto sink = [&](std::optional<StateId>& slot, Verdict v) {
    if (!slot) {
      slot = l.add_state();
      l.annotate(*slot, std::string(kVerdictKey), std::string(to_string(v)));
    }
    return *slot;
  };

  for (StateId i = 0; i < n; ++i) {
    const lts::Transition& step = *path[i];
    l.add_transition(i, step.label, i + 1);
    if (step.label.direction != Direction::observation) continue;
    std::set<ActionLabel> others;
    for (std::size_t j : p.outgoing(step.source)) {
      const ActionLabel& alt = p.transitions()[j].label;
      if (alt.direction == Direction::observation && alt != step.label) {
        others.insert(alt);
      }
    }
    for (const ActionLabel& alt : others) {
      l.add_transition(i, alt, sink(inconclusive, Verdict::inconclusive));
    }
    l.add_transition(i, otherwise_label(), sink(fail, Verdict::fail));
  }
  return tc;
}

lts::Trace spine(const TestCase& tc) {
  lts::Trace out;
  const Lts& l = tc.lts;
  if (l.empty()) return out;
  StateId s = l.initial();
  while (!l.is_sink(s)) {
    const lts::Transition* next = nullptr;
    for (std::size_t i : l.outgoing(s)) {
      const lts::Transition& t = l.transitions()[i];
      if (t.label.gate == kExit) return out;
      if (t.label.gate == kOtherwise) continue;
      auto v = tc.verdict(t.target);
      if (v == Verdict::fail || v == Verdict::inconclusive) continue;
      next = &t;
      break;
    }
    if (next == nullptr) break;
    out.push_back(next->label);
    s = next->target;
  }
  return out;
}

}  // namespace tlsmbt::testgen
