// Copyright 2026 The xsetspir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "xspir/errors.hpp"
#include "xspir/harness.hpp"

namespace xspir {
namespace {

Scenario scenario(Mode mode, std::uint32_t q, std::size_t n, std::size_t k, std::size_t x,
                  std::size_t t, std::size_t e) {
  Scenario s;
  s.mode = mode;
  s.field = FieldSpec::prime(q);
  s.n = n, s.k = k, s.x = x, s.t = t, s.e = e;
  return s;
}

std::string invariant_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.invariant();
  }
  return "";
}

TEST(Scenario, ParsesFlatKeyValues) {
  const auto s = parse_scenario(R"(# quantum example
mode = quantum
p = 7
N = 4   # databases
K = 2
X = 1
T = 1
E = 1
theta = 2
seed = 99
audits = t-collusion, eavesdropper-quantum
audit_method = exact
taps = Q{1} A{2}; user
drop_common = 0,1
)");
  EXPECT_EQ(s.mode, Mode::kQuantum);
  EXPECT_EQ(s.field, FieldSpec::prime(7));
  EXPECT_EQ(s.n, 4u);
  EXPECT_EQ(s.theta, 2u);
  EXPECT_EQ(s.seed, 99u);
  ASSERT_EQ(s.audits.size(), 2u);
  EXPECT_EQ(s.audits[1], AdversaryKind::kEavesdropperQuantum);
  EXPECT_EQ(s.audit_method, Method::kExact);
  ASSERT_EQ(s.taps.size(), 2u);
  EXPECT_EQ(s.taps[0].queries, std::vector<std::size_t>{0});
  EXPECT_EQ(s.taps[0].answers, std::vector<std::size_t>{1});
  EXPECT_TRUE(s.taps[1].user);
  EXPECT_EQ(s.sabotage.drop_common, (std::vector<std::size_t>{0, 1}));
}

TEST(Scenario, DefaultsAndSweep) {
  const auto s = parse_scenario("N = 3\nK = 2\ntheta = sweep\n");
  EXPECT_EQ(s.mode, Mode::kClassical);
  EXPECT_FALSE(s.theta.has_value());
  EXPECT_EQ(s.seed, 1u);
  EXPECT_FALSE(s.audit_every_kind);
  EXPECT_TRUE(parse_scenario("N = 3\nK = 2\naudits = all\n").audit_every_kind);
}

TEST(Scenario, ExtensionField) {
  const auto s = parse_scenario("p = 2\nr = 3\nN = 3\nK = 2\n");
  EXPECT_EQ(s.field.order(), 8u);
  const auto t = parse_scenario("p = 2\nr = 2\nmodulus = 1,1,1\nN = 3\nK = 2\n");
  EXPECT_EQ(t.field.modulus, (std::vector<std::uint32_t>{1, 1, 1}));
}

TEST(Scenario, RejectsBadInput) {
  EXPECT_EQ(invariant_of([] { parse_scenario("N = 3\nK = 2\ncolour = red\n"); }),
            "scenario.unknown-key");
  EXPECT_EQ(invariant_of([] { parse_scenario("N = 3\nN = 4\nK = 2\n"); }),
            "scenario.duplicate-key");
  EXPECT_EQ(invariant_of([] { parse_scenario("N = 3\nK 2\n"); }), "scenario.syntax");
  EXPECT_EQ(invariant_of([] { parse_scenario("N = 3\nK = 2\ntheta = 3\n"); }),
            "scenario.theta-range");
  EXPECT_EQ(invariant_of([] { parse_scenario("N = x\nK = 2\n"); }), "scenario.value");
  EXPECT_EQ(invariant_of([] { parse_scenario("N = 3\nK = 2\nu = 1,2,3\n"); }),
            "scenario.quantum-only");
  EXPECT_EQ(invariant_of([] { parse_scenario("K = 2\n"); }), "scenario.required");
  EXPECT_EQ(invariant_of([] { parse_scenario("N = 3\nK = 2\ntaps = Q{0}\n"); }), "scenario.value");
  EXPECT_EQ(invariant_of([] {
              build_instance(parse_scenario("N = 3\nK = 2\nX = 1\nT = 1\nalpha = 1,2,9\n"));
            }),
            "scenario.element-range");
  EXPECT_EQ(invariant_of([] { build_instance(parse_scenario("N = 3\nK = 2\nX = 2\nT = 1\n")); }),
            "params.L-positive");
  EXPECT_EQ(invariant_of([] { load_scenario("/nonexistent/file"); }), "scenario.file");
}

TEST(Scenario, ExplicitPointsReachTheInstance) {
  const auto inst = build_instance(parse_scenario("N = 3\nK = 2\nX = 1\nT = 1\nalpha = 1,2,3\nf = 5\n"));
  const auto& gf = inst.scheme().field();
  EXPECT_EQ(inst.scheme().points().alpha(), (FieldVector{gf.element(1), gf.element(2), gf.element(3)}));
  EXPECT_EQ(inst.scheme().points().f(), FieldVector{gf.element(5)});
}

TEST(Transport, RejectsMessagesOutsideTheWhitelist) {
  const auto& gf = GaloisField::get(FieldSpec::prime(7));
  Transport tr;
  const ActorId user{ActorRole::kUser, 0};
  const ActorId db0{ActorRole::kDatabase, 0};
  const ActorId db1{ActorRole::kDatabase, 1};
  const ActorId dealer{ActorRole::kDealer, 0};
  const AnswerSymbol ans{0, gf.one()};
  EXPECT_THROW(tr.send({db0, db1, MessageType::kAnswer, ans}), Error);
  EXPECT_THROW(tr.send({dealer, user, MessageType::kStorageShare, StorageShare{0, {}}}), Error);
  EXPECT_THROW(tr.send({user, db0, MessageType::kAnswer, ans}), Error);
  EXPECT_THROW(tr.send({user, db0, MessageType::kStorageShare, StorageShare{0, {}}}), Error);
  // type and payload disagree
  EXPECT_THROW(tr.send({user, db0, MessageType::kQuery, MaskShare{0, {gf.one(), gf.one()}}}), Error);
  // payload addressed to another database
  EXPECT_THROW(tr.send({user, db1, MessageType::kQuery, QueryVector{0, {}}}), Error);
  EXPECT_TRUE(tr.log().empty());

  tr.send({user, db0, MessageType::kQuery, QueryVector{0, {FieldVector(3, gf.one())}}});
  tr.send({db0, user, MessageType::kAnswer, ans});
  ASSERT_EQ(tr.log().size(), 2u);
  EXPECT_EQ(tr.log()[0].symbols, 3u);
  EXPECT_EQ(tr.receive(db0).size(), 1u);
  EXPECT_TRUE(tr.receive(db0).empty());
  EXPECT_EQ(tr.receive(user).size(), 1u);
}

void expect_same(const Transcript& a, const Transcript& b, std::size_t n, std::size_t halves) {
  EXPECT_EQ(a.decoded, b.decoded);
  EXPECT_EQ(a.channel_output, b.channel_output);
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_EQ(a.queries[i].blocks, b.queries[i].blocks);
    for (std::size_t h = 0; h < halves; ++h) {
      EXPECT_EQ(storage_half(a, i, h).blocks, storage_half(b, i, h).blocks);
    }
    if (halves == 1) {
      EXPECT_EQ(a.answers[i].value, b.answers[i].value);
    } else {
      EXPECT_EQ(a.masks[i].value, b.masks[i].value);
      EXPECT_EQ(a.answer_pairs[i].raw, b.answer_pairs[i].raw);
      EXPECT_EQ(a.answer_pairs[i].scaled, b.answer_pairs[i].scaled);
    }
  }
}

TEST(Actors, TranscriptEqualsDirectExecution) {
  for (auto mode : {Mode::kClassical, Mode::kQuantum}) {
    const auto inst = build_instance(scenario(mode, 11, 5, 3, 1, 1, 1));
    for (std::size_t theta = 1; theta <= 3; ++theta) {
      const auto actors = run_actors(inst, theta, 42);
      const auto direct = execute(inst, theta, draw_randomness(inst, 42));
      expect_same(actors.transcript, direct, inst.scheme().n(), inst.halves());
      EXPECT_EQ(actors.transcript.decoded, actors.expected);
    }
  }
}

TEST(Actors, TrafficFollowsTheWhitelist) {
  const auto inst = build_instance(scenario(Mode::kQuantum, 7, 4, 2, 1, 1, 1));
  const auto actors = run_actors(inst, 1, 3);
  std::map<MessageType, std::size_t> counts;
  for (const auto& e : actors.transport.log()) {
    EXPECT_TRUE(Transport::allowed(e.from, e.to, e.type));
    ++counts[e.type];
    // nothing from the user's private state reaches a database except
    // queries and masks
    if (e.from.role == ActorRole::kUser) {
      EXPECT_TRUE(e.type == MessageType::kQuery || e.type == MessageType::kMask);
    }
  }
  EXPECT_EQ(counts[MessageType::kStorageShare], 4u);
  EXPECT_EQ(counts[MessageType::kCommonRandomness], 8u);
  EXPECT_EQ(counts[MessageType::kQuery], 4u);
  EXPECT_EQ(counts[MessageType::kMask], 4u);
  EXPECT_EQ(counts[MessageType::kAnswer], 4u);
}

TEST(Run, ClassicalExample) {
  auto s = scenario(Mode::kClassical, 7, 4, 2, 1, 1, 1);
  const auto r = run(s);
  EXPECT_TRUE(r.verified);
  ASSERT_EQ(r.retrievals.size(), 2u);
  EXPECT_EQ(r.achieved_rate, Rational(1, 2));
  EXPECT_EQ(r.theorem_rate, Rational(1, 2));
  EXPECT_EQ(r.download.downlink_symbols, 4u);
  EXPECT_EQ(r.download.message_symbols, 2u);
  EXPECT_EQ(r.download.mask_symbols, 0u);
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Run, QuantumExample) {
  auto s = scenario(Mode::kQuantum, 7, 4, 2, 1, 1, 1);
  s.theta = 2;
  const auto r = run(s);
  EXPECT_TRUE(r.verified);
  ASSERT_EQ(r.retrievals.size(), 1u);
  EXPECT_EQ(r.achieved_rate, Rational(1));
  EXPECT_EQ(r.theorem_rate, Rational(1));
  EXPECT_EQ(r.download.downlink_symbols, 4u);
  EXPECT_EQ(r.download.message_symbols, 4u);
  // two mask symbols per database
  EXPECT_EQ(r.download.mask_symbols, 8u);
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Run, SameSeedGivesIdenticalJson) {
  auto s = scenario(Mode::kQuantum, 7, 4, 2, 1, 1, 1);
  s.audits = {AdversaryKind::kTCollusion};
  const auto a = to_json(run(s));
  EXPECT_EQ(a, to_json(run(s)));
  EXPECT_NE(a.find("\"version\": \"xsetspir-report/1\""), std::string::npos);
  s.seed = 2;
  EXPECT_NE(a, to_json(run(s)));
}

TEST(Run, SabotagedAuditExitsThree) {
  auto s = scenario(Mode::kClassical, 5, 3, 2, 1, 1, 1);
  s.audits = {AdversaryKind::kXStorage};
  EXPECT_EQ(run(s).exit_code(), 0);
  s.sabotage.drop_storage_noise = true;
  const auto r = run_audits(s, std::nullopt);
  EXPECT_EQ(r.exit_code(), 3);
  EXPECT_TRUE(r.retrievals.empty());
  EXPECT_NE(to_json(r).find("\"verdict\": \"leaks\""), std::string::npos);
}

TEST(Run, ExtensionFieldReportUsesCoefficientArrays) {
  auto s = parse_scenario("p = 2\nr = 3\nN = 3\nK = 2\nX = 1\nT = 1\ntheta = 1\n");
  const auto r = run(s);
  EXPECT_TRUE(r.verified);
  EXPECT_NE(to_json(r).find("\"alpha\": [\n      [\n"), std::string::npos);
}

TEST(RateTable, WorkedExamples) {
  const auto t = rate_table("cells = 4,1,1,1; 5,1,1,2; 3,1,1,1; 3,2,1,0\nK = 2\n");
  ASSERT_EQ(t.cells.size(), 4u);
  EXPECT_EQ(t.cells[0].rate, Rational(1, 2));
  EXPECT_EQ(t.cells[0].quantum_rate, Rational(1));
  EXPECT_EQ(t.cells[0].doubling, Rational(2));
  EXPECT_EQ(t.cells[1].rate, Rational(2, 5));
  EXPECT_EQ(t.cells[1].quantum_rate, Rational(4, 5));
  EXPECT_EQ(t.cells[2].rate, Rational(1, 3));
  EXPECT_EQ(t.cells[2].quantum_rate, Rational(2, 3));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(t.cells[i].feasible);
    EXPECT_TRUE(t.cells[i].verified);
  }
  EXPECT_FALSE(t.cells[3].feasible);
  EXPECT_EQ(t.exit_code(), 0);
  EXPECT_NE(to_text(t).find("infeasible"), std::string::npos);
}

TEST(RateTable, CrossedAxesAndErrors) {
  const auto t = rate_table("N = 3,4\nX = 0,1\n");
  EXPECT_EQ(t.cells.size(), 4u);
  EXPECT_EQ(t.cells[0].rate, Rational(1));  // N=3, X=0
  EXPECT_EQ(t.cells[0].doubling, Rational(1));
  EXPECT_THROW(rate_table("X = 1\n"), ConfigError);
  EXPECT_THROW(rate_table("N = 3\ncells = 3,1,1,1\n"), ConfigError);
  EXPECT_THROW(rate_table("N = 3\nW = 1\n"), ConfigError);
}

TEST(MatrixCheck, DefaultPasses) {
  const auto m = matrix_check(scenario(Mode::kQuantum, 7, 4, 2, 1, 1, 1));
  ASSERT_FALSE(m.checks.empty());
  for (const auto& c : m.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
  EXPECT_EQ(m.exit_code(), 0);
}

TEST(MatrixCheck, PerturbedVFails) {
  auto s = scenario(Mode::kQuantum, 7, 4, 2, 1, 1, 1);
  const auto inst = build_instance(s);
  std::vector<std::uint32_t> v;
  for (const auto& e : inst.quantum().pair().v) v.push_back(e.index());
  v[0] = v[0] % 6 + 1;  // another nonzero element
  s.v = v;
  const auto m = matrix_check(s);
  EXPECT_EQ(m.exit_code(), 3);
  bool feasibility_failed = false;
  for (const auto& c : m.checks) {
    if (c.name == "feasibility") feasibility_failed = !c.pass;
  }
  EXPECT_TRUE(feasibility_failed);
}

TEST(MatrixCheck, ClassicalModeIsAnError) {
  try {
    matrix_check(scenario(Mode::kClassical, 7, 4, 2, 1, 1, 1));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("matrix_check requires quantum mode"), std::string::npos);
  }
}

}  // namespace
}  // namespace xspir
