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
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include <gtest/gtest.h>

#include "test_support.h"
#include "tlsmbt/model.h"
#include "tlsmbt/tcio.h"

namespace tlsmbt {
namespace {

using messages::ActionLabel;
using messages::Direction;
using testing::plain;
using testing::random_message;
using testing::random_test_case;

std::string read_file(const std::string& name) {
  std::ifstream in(std::string(TLSMBT_DATA_DIR) + "/" + name, std::ios::binary);
  EXPECT_TRUE(in.good()) << name;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

using EdgeKey = std::tuple<lts::StateId, std::string, Direction, std::string,
                           lts::StateId>;

// Structural view used as the isomorphism oracle: ids, full labels, verdicts.
std::set<EdgeKey> edge_set(const testgen::TestCase& tc) {
  std::set<EdgeKey> out;
  for (const auto& t : tc.lts.transitions()) {
    out.emplace(t.source, t.label.gate, t.label.direction,
                t.label.payload ? tcio::encode_message(*t.label.payload) : "",
                t.target);
  }
  return out;
}

std::map<lts::StateId, testgen::Verdict> verdicts(const testgen::TestCase& tc) {
  std::map<lts::StateId, testgen::Verdict> out;
  for (lts::StateId s = 0; s < tc.lts.state_count(); ++s) {
    if (auto v = tc.verdict(s)) out[s] = *v;
  }
  return out;
}

testgen::TestCase tc_three() {
  return testgen::generate(model::build_handshake_model(model::ModelConfig{}),
                           testgen::purpose_III());
}

// ---- wire body --------------------------------------------------------------

TEST(Wire, RoundTripsGeneratedMessages) {
  std::mt19937 rng(20261016);
  for (int i = 0; i < 1000; ++i) {
    const messages::HandshakeMessage m = random_message(rng);
    const std::string body = tcio::encode_message(m);
    ASSERT_EQ(body.find('\n'), std::string::npos) << body;
    ASSERT_EQ(tcio::decode_message(body), m) << body;
    ASSERT_EQ(tcio::encode_message(tcio::decode_message(body)), body);
  }
}

TEST(Wire, KnownBodies) {
  EXPECT_EQ(tcio::encode_message(messages::Alert{
                messages::AlertLevel::fatal,
                messages::AlertType::unexpected_message}),
            "ALERT {level=fatal,description=unexpected_message}");
  EXPECT_EQ(tcio::encode_message(messages::CertificateClient{std::nullopt}),
            "CERTIFICATE_C {cert_id=none}");
  EXPECT_EQ(tcio::encode_message(messages::FinishedServer{7}),
            "FINISHED_S {mac_id=7}");
}

TEST(Wire, RejectsMalformedBodies) {
  for (const char* bad :
       {"", "ALERT", "ALERT {", "NOPE {}", "FINISHED_S {mac_id=x}",
        "FINISHED_S {mac_id=1,mac_id=2}", "FINISHED_S {mac_id=1} trailing",
        "ALERT {level=fatal,description=bogus}",
        "FINISHED_S {mac_id=99999999999}"}) {
    EXPECT_THROW(tcio::decode_message(bad), tcio::WireFormatError) << bad;
  }
}

// ---- DOT export -------------------------------------------------------------

TEST(DotExport, SingleEdgeCase) {
  testgen::TestCase tc;
  tc.lts.add_state();
  tc.lts.add_state();
  tc.lts.set_initial(0);
  tc.lts.add_transition(0, testgen::exit_label(), 1);
  tc.lts.annotate(1, std::string(testgen::kVerdictKey), "pass");
  EXPECT_EQ(tcio::export_dot(tc),
            "digraph testcase {\n"
            "  initial=\"0\";\n"
            "  0;\n"
            "  1 [verdict=\"pass\"];\n"
            "  0 -> 1 [label=\"exit\", kind=\"internal\"];\n"
            "}\n");
}

TEST(DotExport, ServerMessagesKeepSenderSuffix) {
  const std::string dot = tcio::export_dot(tc_three());
  EXPECT_NE(dot.find("label=\"CERTIFICATE_S\""), std::string::npos);
  EXPECT_NE(dot.find("label=\"FINISHED_S\""), std::string::npos);
  EXPECT_NE(dot.find("label=\"OTHERWISE\", kind=\"otherwise\""),
            std::string::npos);
}

TEST(DotExport, ByteDeterministic) {
  const auto tc = tc_three();
  EXPECT_EQ(tcio::export_dot(tc), tcio::export_dot(tc_three()));
}

TEST(DotExport, MatchesGoldenTestCaseThree) {
  EXPECT_EQ(tcio::export_dot(tc_three()), read_file("tc3_generated.dot"));
}

// ---- DOT round trip ---------------------------------------------------------

TEST(DotRoundTrip, ParseInvertsExportOnRandomCases) {
  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto tc = random_test_case(rng);
    const std::string dot = tcio::export_dot(tc);
    const auto back = tcio::parse_dot(dot);
    ASSERT_EQ(back.lts.state_count(), tc.lts.state_count()) << dot;
    ASSERT_EQ(back.lts.initial(), tc.lts.initial());
    ASSERT_EQ(edge_set(back), edge_set(tc)) << dot;
    ASSERT_EQ(verdicts(back), verdicts(tc)) << dot;
    ASSERT_EQ(tcio::export_dot(back), dot);
  }
}

TEST(DotRoundTrip, GeneratedCasesSurvive) {
  const auto model = model::build_handshake_model(model::ModelConfig{});
  for (const auto& tp : {testgen::purpose_I(), testgen::purpose_II(),
                         testgen::purpose_III()}) {
    const auto tc = testgen::generate(model, tp);
    const auto back = tcio::parse_dot(tcio::export_dot(tc));
    EXPECT_EQ(edge_set(back), edge_set(tc));
    EXPECT_EQ(verdicts(back), verdicts(tc));
    EXPECT_EQ(testgen::validate_test_case(back), std::nullopt);
    EXPECT_EQ(tcio::transition_table(back), tcio::transition_table(tc));
  }
}

// ---- DOT import -------------------------------------------------------------

TEST(DotImport, LegacyTableCase) {
  const auto tc = tcio::parse_dot(read_file("table1_tc3.dot"));
  EXPECT_EQ(tc.lts.state_count(), 11u);
  EXPECT_EQ(tc.lts.transitions().size(), 10u);
  EXPECT_EQ(tc.lts.initial(), 0u);
  EXPECT_EQ(tc.verdict(10), testgen::Verdict::pass);
  // The foreign label survives verbatim.
  bool foreign = false;
  for (const auto& t : tc.lts.transitions()) {
    foreign |= t.label.gate == "SERVERHELLODONE" && !t.label.payload;
  }
  EXPECT_TRUE(foreign);
  EXPECT_EQ(tcio::table_to_csv(tcio::transition_table(tc)),
            read_file("table1_tc3.csv"));
}

TEST(DotImport, AcceptsCommonSyntax) {
  const auto tc = tcio::parse_dot(
      "/* block */ strict digraph \"g\" {\n"
      "# hash comment\n"
      "  edge [kind=observation];\n"
      "  a -> b -> c [label=\"FINISHED_S\"];  // chain\n"
      "  c [verdict=pass]\n"
      "}\n");
  EXPECT_EQ(tc.lts.state_count(), 3u);
  EXPECT_EQ(tc.lts.initial(), 0u);  // unique root
  EXPECT_EQ(tc.lts.transitions().size(), 2u);
  EXPECT_EQ(tc.verdict(2), testgen::Verdict::pass);
}

TEST(DotImport, MalformedEdgeReportsLine) {
  try {
    tcio::parse_dot("digraph g {\n  0 -> 1 [label=\"A\"];\n  1 -> [label=\"B\"];\n}\n");
    FAIL() << "expected a syntax error";
  } catch (const tcio::DotSyntaxError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(DotImport, UnterminatedInputIsSyntaxError) {
  EXPECT_THROW(tcio::parse_dot("digraph g { 0 -> 1"), tcio::DotSyntaxError);
  EXPECT_THROW(tcio::parse_dot("digraph g { \"open }"), tcio::DotSyntaxError);
  EXPECT_THROW(tcio::parse_dot("digraph g { subgraph s { a } }"),
               tcio::DotSyntaxError);
}

TEST(DotImport, SinkWithoutVerdict) {
  const char* dot = "digraph g { 0 -> 1 [label=\"FINISHED_S\"]; }";
  EXPECT_THROW(tcio::parse_dot(dot), tcio::DotSemanticError);
  const auto tc = tcio::parse_dot(dot, /*lenient=*/true);
  EXPECT_EQ(tc.verdict(1), testgen::Verdict::inconclusive);
}

TEST(DotImport, SemanticErrors) {
  EXPECT_THROW(tcio::parse_dot("graph g { 0 -- 1 [label=\"A\"]; 1 [verdict=pass]; }"),
               tcio::DotSemanticError);
  EXPECT_THROW(tcio::parse_dot("digraph g { initial=\"9\"; 0 -> 1 [label=\"A\"]; "
                               "1 [verdict=pass]; }"),
               tcio::DotSemanticError);
  EXPECT_THROW(tcio::parse_dot("digraph g { 0 -> 1; 1 [verdict=pass]; }"),
               tcio::DotSemanticError);  // unlabeled edge
  EXPECT_THROW(tcio::parse_dot("digraph g { 0 -> 1 [label=\"A\"]; "
                               "1 [verdict=maybe]; }"),
               tcio::DotSemanticError);
  // Label text must agree with the attached message.
  EXPECT_THROW(
      tcio::parse_dot("digraph g { 0 -> 1 [label=\"FINISHED_C\", "
                      "message=\"FINISHED_S {mac_id=1}\"]; 1 [verdict=pass]; }"),
      tcio::DotSemanticError);
}

TEST(DotImport, AlertLabelWithoutMessageGetsPayload) {
  const auto tc = tcio::parse_dot(
      "digraph g { 0 -> 1 [label=\"ALERT(unexpected_message)\"]; "
      "1 [verdict=pass]; }");
  const ActionLabel& l = tc.lts.transitions().at(0).label;
  ASSERT_TRUE(l.payload.has_value());
  EXPECT_EQ(l.text(), "ALERT(unexpected_message)");
  EXPECT_EQ(l.direction, Direction::observation);
}

TEST(DotImport, PurposeGraph) {
  const auto tp = tcio::parse_purpose_dot(
      "digraph tp { wildcard=true; 0 -> 1 [label=\"FINISHED_C\"]; "
      "0 -> 2 [label=\"HELLORETRYREQUEST\"]; 1 [accept=true]; "
      "2 [refuse=true]; }");
  EXPECT_TRUE(tp.wildcard);
  EXPECT_EQ(tp.accept_states, std::set<lts::StateId>{1});
  EXPECT_EQ(tp.refuse_states, std::set<lts::StateId>{2});
  const auto model = model::build_handshake_model(model::ModelConfig{});
  EXPECT_EQ(testgen::spine(testgen::generate(model, tp)),
            testgen::spine(testgen::generate(model, testgen::purpose_I())));
  EXPECT_THROW(tcio::parse_purpose_dot("digraph tp { 0 -> 1 [label=\"A\"]; }"),
               std::exception);  // no accept state
}

// ---- transition table -------------------------------------------------------

TEST(Table, GeneratedCaseThree) {
  const auto rows = tcio::transition_table(tc_three());
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows.front(), (tcio::TransitionRow{0, "CLIENTHELLO", 1}));
  EXPECT_EQ(rows.back(), (tcio::TransitionRow{9, "exit", 10}));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].pre, i);
    EXPECT_EQ(rows[i].post, i + 1);
  }
}

TEST(Table, SingleEdgeGraphGetsExitRow) {
  const auto tc = tcio::parse_dot(
      "digraph g { 0 -> 1 [label=\"FINISHED_S\"]; 1 [verdict=pass]; }");
  const auto rows = tcio::transition_table(tc);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (tcio::TransitionRow{1, "exit", 2}));
}

TEST(Table, RowCountIsSpinePlusOne) {
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto tc = random_test_case(rng);
    const auto rows = tcio::transition_table(tc);
    std::size_t spine_len = 0;
    for (const auto& t : tc.lts.transitions()) {
      if (t.target == t.source + 1 && t.label.gate != testgen::kExit &&
          !tc.verdict(t.target).has_value()) {
        ++spine_len;
      } else if (t.target == t.source + 1 && t.label.gate != testgen::kExit &&
                 tc.verdict(t.target) == testgen::Verdict::pass) {
        ++spine_len;  // last step of a case without exit
      }
    }
    ASSERT_EQ(rows.size(), spine_len + 1) << tcio::export_dot(tc);
    EXPECT_EQ(rows.back().action, "exit");
    EXPECT_EQ(tcio::transition_table(tcio::parse_dot(tcio::export_dot(tc))),
              rows);
  }
}

TEST(Table, CsvQuoting) {
  EXPECT_EQ(tcio::table_to_csv({{0, "A,B", 1}, {1, "say \"hi\"", 2}}),
            "pre,action,post\n0,\"A,B\",1\n1,\"say \"\"hi\"\"\",2\n");
}

}  // namespace
}  // namespace tlsmbt
