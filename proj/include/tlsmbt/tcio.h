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

// Test-case interchange: DOT import/export, the transition table, and the
// canonical text body of a symbolic message.
//
// DOT schema. Graph attribute `initial` names the initial node. Node
// attribute `verdict` is one of pass|fail|inconclusive and marks sinks.
// Edge attribute `label` holds the canonical action text, `kind` one of
// stimulus|observation|internal, `message` the wire body of the payload.
// Only `label` is required on edges.

#ifndef TLSMBT_TCIO_H_
#define TLSMBT_TCIO_H_

#include <compare>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tlsmbt/messages.h"
#include "tlsmbt/testgen.h"

namespace tlsmbt::tcio {

using messages::HandshakeMessage;
using testgen::TestCase;

class DotSyntaxError : public std::runtime_error {
 public:
  DotSyntaxError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class DotSemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WireFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical body `GATE {field=value,...}`; newline free.
std::string encode_message(const HandshakeMessage& m);
// Inverse of encode_message. Does not validate the decoded message.
HandshakeMessage decode_message(std::string_view body);

// Generic DOT syntax tree. Attributes keep their source order; later
// assignments of the same key win on lookup.
using DotAttributes = std::vector<std::pair<std::string, std::string>>;

struct DotNode {
  std::string id;
  DotAttributes attributes;
};

struct DotEdge {
  std::string from;
  std::string to;
  DotAttributes attributes;
  std::size_t line = 0;
};

struct DotGraph {
  bool directed = true;
  std::string name;
  DotAttributes attributes;
  // In order of first mention, with node statements merged.
  std::vector<DotNode> nodes;
  std::vector<DotEdge> edges;
};

const std::string* find_attribute(const DotAttributes& attrs,
                                  std::string_view key);

// Throws DotSyntaxError. Subgraphs and ports are not supported.
DotGraph parse_dot_graph(std::string_view text);

// Byte-deterministic: nodes in id order, edges by (source, target, label,
// message).
std::string export_dot(const TestCase& tc);

// Node names map to state ids in numeric order when every name is a
// non-negative integer, lexicographic order otherwise. Sinks without a
// verdict are an error unless `lenient`, which makes them inconclusive.
// Labels outside the handshake vocabulary are kept as payload-free
// observations.
TestCase parse_dot(std::string_view text, bool lenient = false);

// Node attributes accept=true / refuse=true; graph attribute wildcard.
testgen::TestPurpose parse_purpose_dot(std::string_view text);

struct TransitionRow {
  lts::StateId pre = 0;
  std::string action;
  lts::StateId post = 0;
  auto operator<=>(const TransitionRow&) const = default;
};

// Rows along the spine from the initial state, skipping edges into fail or
// inconclusive sinks. The last row is `exit`; it is synthesized as
// (last, exit, last + 1) when the graph has none.
std::vector<TransitionRow> transition_table(const TestCase& tc);

// UTF-8, header `pre,action,post`, LF line ends.
std::string table_to_csv(const std::vector<TransitionRow>& rows);

}  // namespace tlsmbt::tcio

#endif  // TLSMBT_TCIO_H_
