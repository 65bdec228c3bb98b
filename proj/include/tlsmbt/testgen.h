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

// Test purposes, their synchronous product with the handshake model, and
// extraction of verdict-annotated test cases.

#ifndef TLSMBT_TESTGEN_H_
#define TLSMBT_TESTGEN_H_

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tlsmbt/lts.h"
#include "tlsmbt/messages.h"

namespace tlsmbt::testgen {

using lts::Lts;
using lts::StateId;
using messages::ActionLabel;

enum class Verdict { pass, fail, inconclusive };

std::string_view to_string(Verdict v);
std::optional<Verdict> verdict_from_string(std::string_view s);

// Reserved labels. OTHERWISE matches every observation not listed at a
// state; `exit` closes the spine of a test case.
inline constexpr std::string_view kOtherwise = "OTHERWISE";
inline constexpr std::string_view kExit = "exit";
ActionLabel otherwise_label();
ActionLabel exit_label();

// Annotation keys used on product and test-case states.
inline constexpr std::string_view kAcceptKey = "accept";
inline constexpr std::string_view kRefuseKey = "refuse";
inline constexpr std::string_view kVerdictKey = "verdict";

class InvalidPurpose : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnreachableAccept : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A purpose edge matches a model label with the same canonical text; an
// edge without payload matches every label of its gate.
struct TestPurpose {
  Lts lts;
  std::set<StateId> accept_states;
  // Product paths entering a refuse state are cut there.
  std::set<StateId> refuse_states;
  // Labels without a matching purpose edge leave the purpose state unchanged.
  bool wildcard = true;

  // Throws InvalidPurpose: no accept state, unknown state, non-sink accept
  // state, or a label outside the handshake vocabulary.
  void validate() const;
};

// Builds a purpose edge label from canonical text (`GATE` or
// `ALERT(description)`). Throws InvalidPurpose on unknown text.
ActionLabel purpose_label(std::string_view text);

// Classical order without HelloRetryRequest, up to FINISHED_C.
TestPurpose purpose_I();
// Renegotiating CLIENTHELLO after CERTIFICATE_S, refused with
// ALERT(unexpected_message).
TestPurpose purpose_II();
// HELLORETRYREQUEST, then a completed handshake.
TestPurpose purpose_III();
// Accepts immediately; the product equals the model.
TestPurpose accept_all();
// "I", "II" or "III".
TestPurpose purpose_by_name(std::string_view name);

bool purpose_label_matches(const ActionLabel& purpose, const ActionLabel& model);

// Reachable synchronous product. States whose purpose component accepts are
// annotated accept=true, refused ones refuse=true (and have no successors).
// Throws UnreachableAccept if no accepting state is reachable.
Lts product(const Lts& model, const TestPurpose& tp);

// Acyclic controllable graph whose sinks carry a `verdict` annotation.
struct TestCase {
  Lts lts;

  std::optional<Verdict> verdict(StateId s) const;
};

// First violated structural invariant, or nullopt.
std::optional<std::string> validate_test_case(const TestCase& tc);

// Spine = shortest accepting path, ties broken by label text then label
// order then target id. Spine states are numbered 0..n; n reaches the pass
// sink n+1 through `exit`. At each observation step the other model-legal
// observations lead to one inconclusive sink and OTHERWISE to one fail sink.
TestCase extract_test_case(const Lts& product);

inline TestCase generate(const Lts& model, const TestPurpose& tp) {
  return extract_test_case(product(model, tp));
}

// Labels along the spine, `exit` excluded.
lts::Trace spine(const TestCase& tc);

}  // namespace tlsmbt::testgen

#endif  // TLSMBT_TESTGEN_H_
