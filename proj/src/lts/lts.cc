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

#include "tlsmbt/lts.h"

#include <algorithm>
#include <deque>
#include <utility>

namespace tlsmbt::lts {

StateId Lts::add_state() {
  outgoing_.emplace_back();
  annotations_.emplace_back();
  return static_cast<StateId>(outgoing_.size() - 1);
}

bool Lts::add_transition(StateId source, ActionLabel label, StateId target) {
  check(source);
  check(target);
  for (std::size_t index : outgoing_[source]) {
    const Transition& t = transitions_[index];
    if (t.target == target && t.label == label) return false;
  }
  outgoing_[source].push_back(transitions_.size());
  transitions_.push_back(Transition{source, std::move(label), target});
  return true;
}

void Lts::set_initial(StateId state) {
  check(state);
  initial_ = state;
}

const std::vector<std::size_t>& Lts::outgoing(StateId state) const {
  check(state);
  return outgoing_[state];
}

void Lts::annotate(StateId state, std::string key, std::string value) {
  check(state);
  annotations_[state].insert_or_assign(std::move(key), std::move(value));
}

std::optional<std::string> Lts::annotation(StateId state,
                                           std::string_view key) const {
  check(state);
  auto it = annotations_[state].find(key);
  if (it == annotations_[state].end()) return std::nullopt;
  return it->second;
}

const Lts::Annotations& Lts::annotations(StateId state) const {
  check(state);
  return annotations_[state];
}

std::set<std::string> Lts::gates() const {
  std::set<std::string> out;
  for (const Transition& t : transitions_) out.insert(t.label.gate);
  return out;
}

void Lts::check(StateId state) const {
  if (state >= outgoing_.size()) {
    throw LtsError("state " + std::to_string(state) + " does not exist");
  }
}

Lts compose(const Lts& left, const Lts& right,
            const std::set<std::string>& sync_gates) {
  if (left.empty() || right.empty()) {
    throw LtsError("compose: operand LTS has no states");
  }
  std::set<std::string> alphabet = left.gates();
  alphabet.merge(right.gates());
  for (const std::string& gate : sync_gates) {
    if (!alphabet.contains(gate)) {
      throw LtsError("compose: sync gate " + gate + " used by neither side");
    }
  }

  Lts out;
  std::map<std::pair<StateId, StateId>, StateId> index;
  std::deque<std::pair<StateId, StateId>> queue;
  auto intern = [&](StateId a, StateId b) {
    auto [it, inserted] = index.try_emplace({a, b}, 0);
    if (inserted) {
      it->second = out.add_state();
      queue.emplace_back(a, b);
    }
    return it->second;
  };
  out.set_initial(intern(left.initial(), right.initial()));

  while (!queue.empty()) {
    auto [a, b] = queue.front();
    queue.pop_front();
    StateId from = index.at({a, b});
    for (std::size_t i : left.outgoing(a)) {
      const Transition& ta = left.transitions()[i];
      if (sync_gates.contains(ta.label.gate)) {
        for (std::size_t j : right.outgoing(b)) {
          const Transition& tb = right.transitions()[j];
          if (tb.label == ta.label) {
            out.add_transition(from, ta.label, intern(ta.target, tb.target));
          }
        }
      } else {
        out.add_transition(from, ta.label, intern(ta.target, b));
      }
    }
    for (std::size_t j : right.outgoing(b)) {
      const Transition& tb = right.transitions()[j];
      if (!sync_gates.contains(tb.label.gate)) {
        out.add_transition(from, tb.label, intern(a, tb.target));
      }
    }
  }
  return out;
}

Lts disrupt(const Lts& body, const ActionLabel& trigger, const Lts& handler) {
  if (body.empty() || handler.empty()) {
    throw LtsError("disrupt: operand LTS has no states");
  }
  for (const Transition& t : body.transitions()) {
    if (t.label == trigger) {
      throw LtsError("disrupt: trigger " + trigger.text() +
                     " already leaves body state " + std::to_string(t.source));
    }
  }
  for (std::size_t i : handler.outgoing(handler.initial())) {
    if (handler.transitions()[i].label == trigger) {
      throw LtsError("disrupt: handler starts with the trigger label");
    }
  }

  Lts out;
  for (StateId s = 0; s < body.state_count(); ++s) {
    out.add_state();
    for (const auto& [k, v] : body.annotations(s)) out.annotate(s, k, v);
  }
  out.set_initial(body.initial());
  for (const Transition& t : body.transitions()) {
    out.add_transition(t.source, t.label, t.target);
  }
  const auto offset = static_cast<StateId>(body.state_count());
  for (StateId s = 0; s < handler.state_count(); ++s) {
    StateId copy = out.add_state();
    for (const auto& [k, v] : handler.annotations(s)) out.annotate(copy, k, v);
  }
  for (const Transition& t : handler.transitions()) {
    out.add_transition(t.source + offset, t.label, t.target + offset);
  }
  for (StateId s = 0; s < offset; ++s) {
    out.add_transition(s, trigger, handler.initial() + offset);
  }
  return out;
}

std::set<Trace> enumerate_traces(const Lts& l, std::size_t max_depth,
                                 std::size_t cap) {
  if (max_depth < 1) throw LtsError("enumerate_traces: max_depth must be >= 1");
  std::set<Trace> out;
  if (l.empty()) return out;

  // Subset construction level by level: each trace is extended once per
  // distinct label, whatever the number of paths realizing it.
  struct Frontier {
    Trace trace;
    std::set<StateId> states;
  };
  std::vector<Frontier> level{{Trace{}, {l.initial()}}};
  out.insert(Trace{});
  for (std::size_t depth = 0; depth < max_depth && !level.empty(); ++depth) {
    std::vector<Frontier> next;
    for (const Frontier& f : level) {
      std::map<ActionLabel, std::set<StateId>> successors;
      for (StateId s : f.states) {
        for (std::size_t i : l.outgoing(s)) {
          const Transition& t = l.transitions()[i];
          successors[t.label].insert(t.target);
        }
      }
      for (auto& [label, states] : successors) {
        Trace trace = f.trace;
        trace.push_back(label);
        out.insert(trace);
        if (out.size() > cap) {
          throw TraceLimitExceeded("enumerate_traces: more than " +
                                   std::to_string(cap) + " traces");
        }
        next.push_back(Frontier{std::move(trace), std::move(states)});
      }
    }
    level = std::move(next);
  }
  return out;
}

bool trace_included(const Lts& l, const Trace& t) {
  if (t.empty()) return true;
  if (l.empty()) return false;
  std::set<StateId> current{l.initial()};
  for (const ActionLabel& label : t) {
    std::set<StateId> next;
    for (StateId s : current) {
      for (std::size_t i : l.outgoing(s)) {
        const Transition& tr = l.transitions()[i];
        if (tr.label == label) next.insert(tr.target);
      }
    }
    if (next.empty()) return false;
    current = std::move(next);
  }
  return true;
}

std::vector<StateId> reachable_states(const Lts& l) {
  std::vector<StateId> out;
  if (l.empty()) return out;
  std::vector<bool> seen(l.state_count(), false);
  std::deque<StateId> queue{l.initial()};
  seen[l.initial()] = true;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    out.push_back(s);
    for (std::size_t i : l.outgoing(s)) {
      StateId target = l.transitions()[i].target;
      if (!seen[target]) {
        seen[target] = true;
        queue.push_back(target);
      }
    }
  }
  return out;
}

bool is_acyclic(const Lts& l) {
  // Kahn's algorithm over the whole state set.
  std::vector<std::size_t> indegree(l.state_count(), 0);
  for (const Transition& t : l.transitions()) ++indegree[t.target];
  std::deque<StateId> queue;
  for (StateId s = 0; s < l.state_count(); ++s) {
    if (indegree[s] == 0) queue.push_back(s);
  }
  std::size_t visited = 0;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    ++visited;
    for (std::size_t i : l.outgoing(s)) {
      if (--indegree[l.transitions()[i].target] == 0) {
        queue.push_back(l.transitions()[i].target);
      }
    }
  }
  return visited == l.state_count();
}

std::string to_string(const Trace& t) {
  if (t.empty()) return "<empty>";
  std::string out;
  for (const ActionLabel& label : t) {
    if (!out.empty()) out += " . ";
    out += label.text();
  }
  return out;
}

}  // namespace tlsmbt::lts
