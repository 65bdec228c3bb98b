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

// Finite labeled transition systems and the handful of process-algebra
// operators the handshake model needs: rendezvous composition, disruption,
// bounded trace enumeration and trace inclusion.

#ifndef TLSMBT_LTS_H_
#define TLSMBT_LTS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tlsmbt/messages.h"

namespace tlsmbt::lts {

using messages::ActionLabel;

// State ids are opaque; they carry no meaning beyond identity.
using StateId = std::uint32_t;

struct Transition {
  StateId source = 0;
  ActionLabel label;
  StateId target = 0;
  auto operator<=>(const Transition&) const = default;
};

using Trace = std::vector<ActionLabel>;

class LtsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TraceLimitExceeded : public LtsError {
 public:
  using LtsError::LtsError;
};

class Lts {
 public:
  using Annotations = std::map<std::string, std::string, std::less<>>;

  StateId add_state();
  // Returns false if the identical transition already exists.
  bool add_transition(StateId source, ActionLabel label, StateId target);
  void set_initial(StateId state);

  StateId initial() const { return initial_; }
  std::size_t state_count() const { return outgoing_.size(); }
  bool empty() const { return outgoing_.empty(); }
  bool contains(StateId state) const { return state < outgoing_.size(); }

  const std::vector<Transition>& transitions() const { return transitions_; }
  // Indices into transitions(), in insertion order.
  const std::vector<std::size_t>& outgoing(StateId state) const;
  bool is_sink(StateId state) const { return outgoing(state).empty(); }

  void annotate(StateId state, std::string key, std::string value);
  std::optional<std::string> annotation(StateId state,
                                        std::string_view key) const;
  const Annotations& annotations(StateId state) const;

  // Distinct gate names used on transitions.
  std::set<std::string> gates() const;

 private:
  void check(StateId state) const;

  StateId initial_ = 0;
  std::vector<Transition> transitions_;
  std::vector<std::vector<std::size_t>> outgoing_;
  std::vector<Annotations> annotations_;
};

// Rendezvous product. Labels whose gate is in `sync_gates` fire only when both
// sides offer an identical label (payload included); all others interleave.
// Only reachable product states are built.
Lts compose(const Lts& left, const Lts& right,
            const std::set<std::string>& sync_gates);

// Every state of `body` gains a `trigger` edge to the initial state of a
// disjoint copy of `handler`. Body state ids are preserved; handler states
// are renumbered after them. Handler states are not themselves disruptable.
Lts disrupt(const Lts& body, const ActionLabel& trigger, const Lts& handler);

inline constexpr std::size_t kDefaultTraceCap = 1'000'000;

// All label sequences of length <= max_depth from the initial state.
// Throws TraceLimitExceeded when the set grows beyond `cap`.
std::set<Trace> enumerate_traces(const Lts& l, std::size_t max_depth,
                                 std::size_t cap = kDefaultTraceCap);

bool trace_included(const Lts& l, const Trace& t);

std::vector<StateId> reachable_states(const Lts& l);
bool is_acyclic(const Lts& l);

// Canonical texts of a trace, e.g. for diagnostics.
std::string to_string(const Trace& t);

}  // namespace tlsmbt::lts

#endif  // TLSMBT_LTS_H_
