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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <tuple>

#include "tlsmbt/tcio.h"

namespace tlsmbt::tcio {
namespace {

using messages::ActionLabel;
using messages::Direction;
using testgen::Verdict;

// ---- lexer ----------------------------------------------------------------

enum class Tok { id, lbrace, rbrace, lbracket, rbracket, equal, semi, comma,
                 edge_op, colon, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  bool quoted = false;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    skip_space_and_comments();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= s_.size()) return t;
    char c = s_[pos_];
    auto single = [&](Tok k) {
      advance();
      t.kind = k;
      t.text = std::string(1, c);
      return t;
    };
    switch (c) {
      case '{': return single(Tok::lbrace);
      case '}': return single(Tok::rbrace);
      case '[': return single(Tok::lbracket);
      case ']': return single(Tok::rbracket);
      case '=': return single(Tok::equal);
      case ';': return single(Tok::semi);
      case ',': return single(Tok::comma);
      case ':': return single(Tok::colon);
      case '"': return quoted(t);
      case '<': return html(t);
      default: break;
    }
    if (c == '-' && pos_ + 1 < s_.size() &&
        (s_[pos_ + 1] == '>' || s_[pos_ + 1] == '-')) {
      t.kind = Tok::edge_op;
      t.text = s_.substr(pos_, 2);
      advance();
      advance();
      return t;
    }
    if (is_id_char(c) || c == '-' || c == '.') {
      t.kind = Tok::id;
      while (pos_ < s_.size() && (is_id_char(s_[pos_]) || s_[pos_] == '.' ||
                                  (s_[pos_] == '-' && t.text.empty()))) {
        t.text += s_[pos_];
        advance();
      }
      return t;
    }
    throw DotSyntaxError(std::string("unexpected character '") + c + "'",
                         t.line, t.column);
  }

 private:
  static bool is_id_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           static_cast<unsigned char>(c) >= 0x80;
  }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#' && column_ == 1) {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (s_.substr(pos_, 2) == "//") {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (s_.substr(pos_, 2) == "/*") {
        std::size_t line = line_;
        std::size_t column = column_;
        advance();
        advance();
        while (pos_ < s_.size() && s_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= s_.size()) {
          throw DotSyntaxError("unterminated comment", line, column);
        }
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  Token quoted(Token t) {
    advance();
    t.kind = Tok::id;
    t.quoted = true;
    while (true) {
      if (pos_ >= s_.size()) {
        throw DotSyntaxError("unterminated string", t.line, t.column);
      }
      char c = s_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\' && pos_ + 1 < s_.size()) {
        char n = s_[pos_ + 1];
        if (n == '"' || n == '\\') {
          t.text += n;
          advance();
          advance();
          continue;
        }
        if (n == '\n') {  // line continuation
          advance();
          advance();
          continue;
        }
      }
      t.text += c;
      advance();
    }
    return t;
  }

  Token html(Token t) {
    advance();
    t.kind = Tok::id;
    t.quoted = true;
    int depth = 1;
    while (depth > 0) {
      if (pos_ >= s_.size()) {
        throw DotSyntaxError("unterminated HTML string", t.line, t.column);
      }
      char c = s_[pos_];
      if (c == '<') ++depth;
      if (c == '>') --depth;
      if (depth > 0) t.text += c;
      advance();
    }
    return t;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// ---- parser ---------------------------------------------------------------

bool keyword(const Token& t, std::string_view k) {
  if (t.kind != Tok::id || t.quoted || t.text.size() != k.size()) return false;
  return std::equal(t.text.begin(), t.text.end(), k.begin(), [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == b;
  });
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { shift(); }

  DotGraph parse() {
    if (keyword(tok_, "strict")) shift();
    if (keyword(tok_, "digraph")) {
      graph_.directed = true;
    } else if (keyword(tok_, "graph")) {
      graph_.directed = false;
    } else {
      fail("expected 'graph' or 'digraph'");
    }
    shift();
    if (tok_.kind == Tok::id) {
      graph_.name = tok_.text;
      shift();
    }
    expect(Tok::lbrace, "'{'");
    while (tok_.kind != Tok::rbrace) {
      if (tok_.kind == Tok::end) fail("missing '}'");
      statement();
      if (tok_.kind == Tok::semi) shift();
    }
    shift();
    if (tok_.kind != Tok::end) fail("content after the closing '}'");
    return std::move(graph_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DotSyntaxError(what + " at line " + std::to_string(tok_.line) +
                             ", column " + std::to_string(tok_.column),
                         tok_.line, tok_.column);
  }

  void shift() { tok_ = lexer_.next(); }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind) fail(std::string("expected ") + what);
    shift();
  }

  std::string id(const char* what) {
    if (tok_.kind != Tok::id) fail(std::string("expected ") + what);
    std::string text = tok_.text;
    shift();
    return text;
  }

  void statement() {
    if (keyword(tok_, "subgraph") || tok_.kind == Tok::lbrace) {
      fail("subgraphs are not supported");
    }
    if (keyword(tok_, "graph") || keyword(tok_, "node") ||
        keyword(tok_, "edge")) {
      std::string which = tok_.text;
      std::transform(which.begin(), which.end(), which.begin(), ::tolower);
      shift();
      DotAttributes attrs = attribute_lists(true);
      DotAttributes& target = which == "graph"  ? graph_.attributes
                              : which == "node" ? node_defaults_
                                                : edge_defaults_;
      target.insert(target.end(), attrs.begin(), attrs.end());
      return;
    }
    const std::size_t line = tok_.line;
    std::string first = id("a node id or attribute");
    if (tok_.kind == Tok::equal) {
      shift();
      graph_.attributes.emplace_back(first, id("an attribute value"));
      return;
    }
    if (tok_.kind == Tok::colon) fail("node ports are not supported");
    if (tok_.kind != Tok::edge_op) {
      DotAttributes attrs = attribute_lists(false);
      DotNode& node = touch(first);
      node.attributes.insert(node.attributes.end(), attrs.begin(), attrs.end());
      return;
    }
    std::vector<std::string> chain{first};
    while (tok_.kind == Tok::edge_op) {
      if ((tok_.text == "->") != graph_.directed) {
        fail("edge operator " + tok_.text + " does not match the graph kind");
      }
      shift();
      if (keyword(tok_, "subgraph") || tok_.kind == Tok::lbrace) {
        fail("subgraphs are not supported");
      }
      chain.push_back(id("a node id after the edge operator"));
      if (tok_.kind == Tok::colon) fail("node ports are not supported");
    }
    DotAttributes attrs = edge_defaults_;
    DotAttributes own = attribute_lists(false);
    attrs.insert(attrs.end(), own.begin(), own.end());
    for (const auto& name : chain) touch(name);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      graph_.edges.push_back(DotEdge{chain[i], chain[i + 1], attrs, line});
    }
  }

  // One or more `[a=b, ...]` blocks; `required` demands at least one.
  DotAttributes attribute_lists(bool required) {
    DotAttributes out;
    if (required && tok_.kind != Tok::lbracket) fail("expected '['");
    while (tok_.kind == Tok::lbracket) {
      shift();
      while (tok_.kind != Tok::rbracket) {
        std::string key = id("an attribute name");
        std::string value = "true";
        if (tok_.kind == Tok::equal) {
          shift();
          value = id("an attribute value");
        }
        out.emplace_back(std::move(key), std::move(value));
        if (tok_.kind == Tok::comma || tok_.kind == Tok::semi) shift();
        if (tok_.kind == Tok::end) fail("missing ']'");
      }
      shift();
    }
    return out;
  }

  DotNode& touch(const std::string& name) {
    auto [it, inserted] = node_index_.try_emplace(name, graph_.nodes.size());
    if (inserted) graph_.nodes.push_back(DotNode{name, node_defaults_});
    return graph_.nodes[it->second];
  }

  Lexer lexer_;
  Token tok_;
  DotGraph graph_;
  DotAttributes node_defaults_;
  DotAttributes edge_defaults_;
  std::map<std::string, std::size_t> node_index_;
};

// ---- test-case mapping ----------------------------------------------------

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::optional<std::uint64_t> as_index(const std::string& s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Node name -> state id, in numeric or lexicographic order.
std::map<std::string, lts::StateId> number_nodes(const DotGraph& g) {
  std::vector<std::string> names;
  for (const auto& n : g.nodes) names.push_back(n.id);
  const bool numeric = std::all_of(names.begin(), names.end(),
                                   [](const auto& n) { return as_index(n); });
  if (numeric) {
    std::sort(names.begin(), names.end(), [](const auto& a, const auto& b) {
      return *as_index(a) < *as_index(b);
    });
  } else {
    std::sort(names.begin(), names.end());
  }
  std::map<std::string, lts::StateId> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    out.emplace(names[i], static_cast<lts::StateId>(i));
  }
  return out;
}

std::optional<Direction> direction_from_kind(const std::string& kind) {
  if (kind == "stimulus") return Direction::stimulus;
  if (kind == "observation" || kind == "otherwise") return Direction::observation;
  if (kind == "internal") return Direction::internal;
  return std::nullopt;
}

ActionLabel edge_label(const DotEdge& e) {
  const std::string* text = find_attribute(e.attributes, "label");
  if (text == nullptr) {
    throw DotSemanticError("edge " + e.from + " -> " + e.to + " (line " +
                           std::to_string(e.line) + ") has no label");
  }
  std::optional<Direction> kind;
  if (const std::string* k = find_attribute(e.attributes, "kind")) {
    kind = direction_from_kind(*k);
    if (!kind) {
      throw DotSemanticError("edge on line " + std::to_string(e.line) +
                             ": unknown kind " + *k);
    }
  }
  if (*text == testgen::kOtherwise) return testgen::otherwise_label();
  if (*text == testgen::kExit) return testgen::exit_label();

  ActionLabel label{*text, Direction::observation, std::nullopt};
  if (const std::string* body = find_attribute(e.attributes, "message")) {
    try {
      label.payload = decode_message(*body);
    } catch (const WireFormatError& err) {
      throw DotSemanticError("edge on line " + std::to_string(e.line) + ": " +
                             err.what());
    }
    label.gate = std::string(messages::gate_name(messages::gate_of(*label.payload)));
    if (label.text() != *text) {
      throw DotSemanticError("edge on line " + std::to_string(e.line) +
                             ": label " + *text + " disagrees with message " +
                             label.text());
    }
  } else if (text->starts_with("ALERT(") && text->ends_with(")")) {
    auto d = messages::alert_type_from_string(
        std::string_view(*text).substr(6, text->size() - 7));
    if (d) {
      label.gate = "ALERT";
      label.payload = messages::Alert{messages::AlertLevel::fatal, *d};
    }
  }
  auto gate = messages::gate_from_name(label.gate);
  label.direction = kind.value_or(gate && messages::is_client_only(*gate)
                                      ? Direction::stimulus
                                      : Direction::observation);
  return label;
}

std::string_view kind_name(const ActionLabel& l) {
  if (l.gate == testgen::kOtherwise) return "otherwise";
  return messages::to_string(l.direction);
}

}  // namespace

DotSyntaxError::DotSyntaxError(const std::string& what, std::size_t line,
                               std::size_t column)
    : std::runtime_error(what), line_(line), column_(column) {}

const std::string* find_attribute(const DotAttributes& attrs,
                                  std::string_view key) {
  for (auto it = attrs.rbegin(); it != attrs.rend(); ++it) {
    if (it->first == key) return &it->second;
  }
  return nullptr;
}

DotGraph parse_dot_graph(std::string_view text) { return Parser(text).parse(); }

std::string export_dot(const TestCase& tc) {
  const lts::Lts& l = tc.lts;
  std::string out = "digraph testcase {\n";
  out += "  initial=" + quote(std::to_string(l.initial())) + ";\n";
  for (lts::StateId s = 0; s < l.state_count(); ++s) {
    out += "  " + std::to_string(s);
    if (auto v = l.annotation(s, testgen::kVerdictKey)) {
      out += " [verdict=" + quote(*v) + "]";
    }
    out += ";\n";
  }
  struct Row {
    lts::StateId source;
    lts::StateId target;
    std::string text;
    std::string kind;
    std::string message;
    auto operator<=>(const Row&) const = default;
  };
  std::vector<Row> rows;
  for (const auto& t : l.transitions()) {
    rows.push_back(Row{t.source, t.target, t.label.text(),
                       std::string(kind_name(t.label)),
                       t.label.payload ? encode_message(*t.label.payload) : ""});
  }
  std::sort(rows.begin(), rows.end());
  for (const Row& r : rows) {
    out += "  " + std::to_string(r.source) + " -> " + std::to_string(r.target) +
           " [label=" + quote(r.text) + ", kind=" + quote(r.kind);
    if (!r.message.empty()) out += ", message=" + quote(r.message);
    out += "];\n";
  }
  return out + "}\n";
}

TestCase parse_dot(std::string_view text, bool lenient) {
  DotGraph g = parse_dot_graph(text);
  if (!g.directed) throw DotSemanticError("test case must be a digraph");
  if (g.nodes.empty()) throw DotSemanticError("test case has no nodes");
  auto ids = number_nodes(g);

  TestCase tc;
  for (std::size_t i = 0; i < ids.size(); ++i) tc.lts.add_state();
  std::set<lts::StateId> has_incoming;
  for (const DotEdge& e : g.edges) {
    const lts::StateId to = ids.at(e.to);
    tc.lts.add_transition(ids.at(e.from), edge_label(e), to);
    has_incoming.insert(to);
  }

  if (const std::string* initial = find_attribute(g.attributes, "initial")) {
    auto it = ids.find(*initial);
    if (it == ids.end()) {
      throw DotSemanticError("initial node " + *initial + " does not exist");
    }
    tc.lts.set_initial(it->second);
  } else {
    std::vector<lts::StateId> roots;
    for (lts::StateId s = 0; s < tc.lts.state_count(); ++s) {
      if (!has_incoming.contains(s)) roots.push_back(s);
    }
    if (roots.size() != 1) {
      throw DotSemanticError(
          "no initial attribute and " + std::to_string(roots.size()) +
          " candidate root nodes");
    }
    tc.lts.set_initial(roots.front());
  }

  for (const DotNode& n : g.nodes) {
    const lts::StateId s = ids.at(n.id);
    if (const std::string* v = find_attribute(n.attributes, "verdict")) {
      if (!testgen::verdict_from_string(*v)) {
        throw DotSemanticError("node " + n.id + " has unknown verdict " + *v);
      }
      tc.lts.annotate(s, std::string(testgen::kVerdictKey), *v);
    } else if (tc.lts.is_sink(s)) {
      if (!lenient) {
        throw DotSemanticError("sink node " + n.id + " has no verdict");
      }
      tc.lts.annotate(s, std::string(testgen::kVerdictKey),
                      std::string(testgen::to_string(Verdict::inconclusive)));
    }
  }
  return tc;
}

testgen::TestPurpose parse_purpose_dot(std::string_view text) {
  DotGraph g = parse_dot_graph(text);
  if (!g.directed) throw DotSemanticError("test purpose must be a digraph");
  if (g.nodes.empty()) throw DotSemanticError("test purpose has no nodes");
  auto ids = number_nodes(g);
  testgen::TestPurpose tp;
  for (std::size_t i = 0; i < ids.size(); ++i) tp.lts.add_state();
  std::set<lts::StateId> has_incoming;
  for (const DotEdge& e : g.edges) {
    const std::string* label = find_attribute(e.attributes, "label");
    if (label == nullptr) {
      throw DotSemanticError("purpose edge on line " + std::to_string(e.line) +
                             " has no label");
    }
    try {
      tp.lts.add_transition(ids.at(e.from), testgen::purpose_label(*label),
                            ids.at(e.to));
    } catch (const testgen::InvalidPurpose& err) {
      throw DotSemanticError(err.what());
    }
    has_incoming.insert(ids.at(e.to));
  }
  if (const std::string* initial = find_attribute(g.attributes, "initial")) {
    if (!ids.contains(*initial)) {
      throw DotSemanticError("initial node " + *initial + " does not exist");
    }
    tp.lts.set_initial(ids.at(*initial));
  } else {
    std::optional<lts::StateId> root;
    for (lts::StateId s = 0; s < tp.lts.state_count(); ++s) {
      if (has_incoming.contains(s)) continue;
      if (root) throw DotSemanticError("test purpose has several root nodes");
      root = s;
    }
    if (!root) throw DotSemanticError("test purpose has no root node");
    tp.lts.set_initial(*root);
  }
  for (const DotNode& n : g.nodes) {
    auto flag = [&](std::string_view key) {
      const std::string* v = find_attribute(n.attributes, key);
      return v != nullptr && *v == "true";
    };
    if (flag("accept")) tp.accept_states.insert(ids.at(n.id));
    if (flag("refuse")) tp.refuse_states.insert(ids.at(n.id));
  }
  if (const std::string* w = find_attribute(g.attributes, "wildcard")) {
    tp.wildcard = *w != "false";
  }
  try {
    tp.validate();
  } catch (const testgen::InvalidPurpose& err) {
    throw DotSemanticError(err.what());
  }
  return tp;
}

}  // namespace tlsmbt::tcio
