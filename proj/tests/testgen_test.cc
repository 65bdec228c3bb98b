#include "tlsmbt/testgen.h"

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "tlsmbt/model.h"

namespace tlsmbt::testgen {
namespace {

using model::ModelConfig;

std::vector<std::string> texts(const lts::Trace& t) {
  std::vector<std::string> out;
  for (const auto& l : t) out.push_back(l.text());
  return out;
}

const Lts& default_model() {
  static const Lts m = model::build_handshake_model(ModelConfig{});
  return m;
}

TEST(Verdict, Names) {
  EXPECT_EQ(to_string(Verdict::pass), "pass");
  EXPECT_EQ(verdict_from_string("inconclusive"), Verdict::inconclusive);
  EXPECT_FALSE(verdict_from_string("incomplete"));
}

TEST(Purposes, AreValid) {
  for (const TestPurpose& tp :
       {purpose_I(), purpose_II(), purpose_III(), accept_all()}) {
    EXPECT_NO_THROW(tp.validate());
  }
  EXPECT_THROW(purpose_by_name("IV"), InvalidPurpose);
}

TEST(Purposes, ValidationErrors) {
  TestPurpose tp = purpose_III();
  tp.accept_states.clear();
  EXPECT_THROW(tp.validate(), InvalidPurpose);
  tp = purpose_III();
  tp.accept_states = {0};  // has an outgoing edge
  EXPECT_THROW(tp.validate(), InvalidPurpose);
  tp = purpose_III();
  tp.accept_states.insert(42);
  EXPECT_THROW(tp.validate(), InvalidPurpose);
  EXPECT_THROW(purpose_label("SERVERHELLODONE"), InvalidPurpose);
  EXPECT_THROW(purpose_label("ALERT(undefined)"), InvalidPurpose);
}

TEST(Purposes, GateOnlyEdgeMatchesEveryPayload) {
  ActionLabel any_alert = purpose_label("ALERT");
  ActionLabel um = purpose_label("ALERT(unexpected_message)");
  ActionLabel ip = messages::label_of(
      model::fatal_alert(messages::AlertType::illegal_parameter),
      messages::Sender::client);
  EXPECT_TRUE(purpose_label_matches(any_alert, ip));
  EXPECT_FALSE(purpose_label_matches(um, ip));
  EXPECT_TRUE(purpose_label_matches(um, um));
}

TEST(PurposeI, AcceptsTheHappyPath) {
  TestCase tc = generate(default_model(), purpose_I());
  EXPECT_EQ(texts(spine(tc)),
            (std::vector<std::string>{"CLIENTHELLO", "SERVERHELLO",
                                      "ENCRYPTEDEXTENSIONS", "CERTIFICATE_S",
                                      "CERTIFICATEVERIFY_S", "FINISHED_S",
                                      "FINISHED_C"}));
  for (const auto& l : spine(tc)) EXPECT_NE(l.gate, "HELLORETRYREQUEST");
}

TEST(PurposeII, SixActionsThenExit) {
  TestCase tc = generate(default_model(), purpose_II());
  EXPECT_EQ(texts(spine(tc)),
            (std::vector<std::string>{"CLIENTHELLO", "SERVERHELLO",
                                      "ENCRYPTEDEXTENSIONS", "CERTIFICATE_S",
                                      "CLIENTHELLO",
                                      "ALERT(unexpected_message)"}));
  // Seven chain transitions including exit, one pass sink.
  std::size_t pass_sinks = 0;
  for (StateId s = 0; s < tc.lts.state_count(); ++s) {
    pass_sinks += tc.verdict(s) == Verdict::pass;
  }
  EXPECT_EQ(pass_sinks, 1u);
  EXPECT_EQ(tc.verdict(7), Verdict::pass);
}

TEST(PurposeIII, TenChainTransitions) {
  TestCase tc = generate(default_model(), purpose_III());
  auto s = texts(spine(tc));
  EXPECT_EQ(s, (std::vector<std::string>{
                   "CLIENTHELLO", "HELLORETRYREQUEST", "CLIENTHELLO",
                   "SERVERHELLO", "ENCRYPTEDEXTENSIONS", "CERTIFICATE_S",
                   "CERTIFICATEVERIFY_S", "FINISHED_S", "FINISHED_C"}));
  // Nine actions plus exit.
  bool exit_found = false;
  for (const auto& t : tc.lts.transitions()) {
    if (t.label.gate == kExit) {
      exit_found = true;
      EXPECT_EQ(t.source, 9u);
      EXPECT_EQ(t.target, 10u);
      EXPECT_EQ(tc.verdict(10), Verdict::pass);
    }
  }
  EXPECT_TRUE(exit_found);
  // The first hello carries the share that provokes the retry.
  const auto& ch = std::get<messages::ClientHello>(*spine(tc)[0].payload);
  EXPECT_EQ(ch.crypto.key_share, messages::KeyShareToken::invalid_share);
}

TEST(PurposeIII, NeverAcceptsWithoutRetry) {
  ModelConfig cfg;
  cfg.enable_hrr_branch = false;
  EXPECT_THROW(product(model::build_handshake_model(cfg), purpose_III()),
               UnreachableAccept);
}

TEST(PurposeIII, InjectedRetryBugMakesAcceptUnreachable) {
  ModelConfig bugged;
  bugged.inject_hrr_crypto_bug = true;
  EXPECT_THROW(product(model::build_handshake_model(bugged), purpose_III()),
               UnreachableAccept);
  EXPECT_NO_THROW(product(default_model(), purpose_III()));
  // The other purposes do not depend on the retry.
  EXPECT_NO_THROW(product(model::build_handshake_model(bugged), purpose_I()));
}

TEST(Product, NeutralPurposeKeepsTraces) {
  Lts p = product(default_model(), accept_all());
  EXPECT_EQ(lts::enumerate_traces(p, 10),
            lts::enumerate_traces(default_model(), 10));
}

TEST(Product, AcceptAnnotationsMarkPurposeAcceptance) {
  Lts p = product(default_model(), purpose_II());
  std::size_t accepting = 0;
  for (StateId s = 0; s < p.state_count(); ++s) {
    accepting += p.annotation(s, kAcceptKey).has_value();
  }
  EXPECT_GT(accepting, 0u);
  EXPECT_FALSE(p.annotation(p.initial(), kAcceptKey));
}

TEST(Product, RefusedStatesHaveNoSuccessors) {
  Lts p = product(default_model(), purpose_I());
  std::size_t refused = 0;
  for (StateId s = 0; s < p.state_count(); ++s) {
    if (p.annotation(s, kRefuseKey)) {
      ++refused;
      EXPECT_TRUE(p.is_sink(s));
    }
  }
  EXPECT_GT(refused, 0u);
}

class AllPurposes : public ::testing::TestWithParam<std::string> {};

TEST_P(AllPurposes, StructurallyValid) {
  TestCase tc = generate(default_model(), purpose_by_name(GetParam()));
  EXPECT_EQ(validate_test_case(tc), std::nullopt);
  EXPECT_TRUE(lts::is_acyclic(tc.lts));
  for (StateId s = 0; s < tc.lts.state_count(); ++s) {
    EXPECT_EQ(tc.lts.is_sink(s), tc.verdict(s).has_value());
  }
}

TEST_P(AllPurposes, Reproducible) {
  TestCase a = generate(default_model(), purpose_by_name(GetParam()));
  TestCase b = generate(model::build_handshake_model(ModelConfig{}),
                        purpose_by_name(GetParam()));
  EXPECT_EQ(a.lts.transitions(), b.lts.transitions());
  for (StateId s = 0; s < a.lts.state_count(); ++s) {
    EXPECT_EQ(a.lts.annotations(s), b.lts.annotations(s));
  }
}

// Every path that avoids the fail sink labels a model trace.
void check_paths(const TestCase& tc, const Lts& m, StateId s,
                 lts::Trace& prefix, std::size_t& checked) {
  EXPECT_TRUE(lts::trace_included(m, prefix)) << lts::to_string(prefix);
  ++checked;
  for (std::size_t i : tc.lts.outgoing(s)) {
    const auto& t = tc.lts.transitions()[i];
    if (t.label.gate == kOtherwise || t.label.gate == kExit) continue;
    prefix.push_back(t.label);
    check_paths(tc, m, t.target, prefix, checked);
    prefix.pop_back();
  }
}

TEST_P(AllPurposes, StimuliAreModelLegal) {
  TestCase tc = generate(default_model(), purpose_by_name(GetParam()));
  lts::Trace prefix;
  std::size_t checked = 0;
  check_paths(tc, default_model(), tc.lts.initial(), prefix, checked);
  EXPECT_GT(checked, spine(tc).size());
}

INSTANTIATE_TEST_SUITE_P(Purposes, AllPurposes,
                         ::testing::Values("I", "II", "III"));

TEST(ValidateTestCase, ReportsViolations) {
  TestCase tc = generate(default_model(), purpose_II());
  TestCase no_verdict = tc;
  no_verdict.lts.annotate(7, std::string(kVerdictKey), "maybe");
  EXPECT_TRUE(validate_test_case(no_verdict));

  TestCase cyclic = tc;
  cyclic.lts.add_transition(3, otherwise_label(), 0);
  EXPECT_TRUE(validate_test_case(cyclic));

  TestCase mixed = tc;
  mixed.lts.add_transition(
      1, messages::label_of(model::default_message(messages::Gate::FINISHED_C,
                                                   ModelConfig{}),
                            messages::Sender::client),
      7);
  EXPECT_TRUE(validate_test_case(mixed));

  TestCase verdict_inside = tc;
  verdict_inside.lts.annotate(2, std::string(kVerdictKey), "pass");
  EXPECT_TRUE(validate_test_case(verdict_inside));
}

}  // namespace
}  // namespace tlsmbt::testgen
