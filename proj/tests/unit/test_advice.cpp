#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "goci/advice.hpp"
#include "goci/coverage.hpp"
#include "goci/io.hpp"
#include "goci/parse.hpp"

using namespace goci;

namespace {

const std::string kData = GOCI_DATA_DIR;

Domain blocks() { return parse_domain(read_file(kData + "/blocks/blocks.dom")); }
GroundExample ell() { return parse_example(read_file(kData + "/blocks/L.facts")); }
Theory truth() { return parse_theory(read_file(kData + "/blocks/L_truth.thy")); }

Clause structural_truth() {
  auto c = truth().clauses[0];
  std::erase_if(c.body, [](const Literal& l) { return BuiltinRegistry::standard().is_builtin(l); });
  return c;
}

bool has(const std::vector<Literal>& v, const std::string& lit) {
  return std::count(v.begin(), v.end(), parse_literal(lit)) > 0;
}

std::vector<AdviceCandidate> as_candidates(const std::vector<std::string>& lits) {
  std::vector<AdviceCandidate> out;
  for (const auto& l : lits) out.push_back({parse_literal(l), 0, {}, {}});
  return out;
}

}  // namespace

TEST(Library, ParsesFileInRankOrder) {
  auto lib = parse_constraint_library(read_file(kData + "/std.constraints"));
  ASSERT_EQ(lib.size(), 4u);
  EXPECT_EQ(lib.order[0], "Sub");
  EXPECT_EQ(lib.max_arity(), 3u);
  EXPECT_LT(lib.rank("Equal"), lib.rank("Greater"));
  EXPECT_THROW(parse_constraint_library("constrain: X(a:int) means a = 1\n"), ParseError);
}

TEST(Enumerate, EllCandidates) {
  auto c = structural_truth();
  auto w = covers(c, ell());
  ASSERT_TRUE(w.covered);
  auto cands = enumerate_constraints(c, *w.witness, ConstraintLibrary::standard(), blocks());
  EXPECT_TRUE(has(cands, "Equal(Wa,Ws)") || has(cands, "Equal(Ws,Wa)"));
  EXPECT_TRUE(has(cands, "Sub(Hb,Hs,1)"));
  EXPECT_TRUE(has(cands, "Greater(Hb,Hs)"));
  EXPECT_FALSE(has(cands, "Equal(Hs,Hb)"));
  EXPECT_FALSE(has(cands, "Equal(Hb,Hs)"));
  for (const auto& l : cands) {
    auto g = apply_substitution(l, *w.witness);
    EXPECT_TRUE(eval_builtin(g)) << render(l);
  }
}

TEST(Enumerate, SingleNumericVariableGivesNothing) {
  auto c = parse_clause("L(S) :- Height(S,H).");
  auto cands = enumerate_constraints(c, {{"S", Term::str("s")}, {"H", Term::num(3)}}, ConstraintLibrary::standard(),
                                     blocks());
  EXPECT_TRUE(cands.empty());
}

TEST(Enumerate, MatchesBruteForce) {
  auto lib = parse_constraint_library(
      "constraint: Equal(x:int, y:int) means x = y\nconstraint: Greater(x:int, y:int) means y > x\n");
  auto d = parse_domain("mode: M(+obj, -int)\n");
  auto c = parse_clause("C(S) :- M(S,A), M(S,B), M(S,D).");
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b)
      for (int e = 1; e <= 3; ++e) {
        Substitution th{{"S", Term::str("s")}, {"A", Term::num(a)}, {"B", Term::num(b)}, {"D", Term::num(e)}};
        std::set<Literal> expect;
        std::vector<std::string> vs{"A", "B", "D"};
        for (const auto& x : vs)
          for (const auto& y : vs) {
            if (x == y) continue;
            if (x < y && th[x] == th[y]) expect.insert(parse_literal("Equal(" + x + "," + y + ")"));
            if (th[y].value > th[x].value) expect.insert(parse_literal("Greater(" + x + "," + y + ")"));
          }
        auto got = enumerate_constraints(c, th, lib, d);
        EXPECT_EQ(std::set<Literal>(got.begin(), got.end()), expect);
        EXPECT_EQ(got.size(), expect.size());
      }
}

TEST(Query, OracleChoosesSub) {
  auto oracle = scripted_oracle(truth());
  AdviceLog log;
  AdviceQuery q;
  q.id = 1;
  q.theory = Theory{{structural_truth()}};
  q.candidates = as_candidates({"Greater(Hb,Hs)", "Sub(Hb,Hs,1)"});
  auto pref = pose_query(q, 5, ConstraintLibrary::standard(), *oracle, log);
  ASSERT_EQ(log.size(), 1u);
  ASSERT_EQ(pref.chosen.size(), 1u);
  EXPECT_EQ(render(log[0].query.candidates[pref.chosen[0]].literal), "Sub(Hb,Hs,1)");
}

TEST(Query, EmptyCandidatesSkipTeacher) {
  struct Never : Teacher {
    std::optional<std::vector<std::size_t>> answer(const AdviceQuery&, std::chrono::milliseconds) override {
      ADD_FAILURE();
      return std::nullopt;
    }
  } never;
  AdviceLog log;
  auto pref = pose_query(AdviceQuery{}, 5, ConstraintLibrary::standard(), never, log);
  EXPECT_TRUE(pref.chosen.empty());
  EXPECT_TRUE(log.empty());
}

TEST(Query, TopOneIsMostSpecific) {
  auto ranked = rank_candidates(as_candidates({"Geq(A,B)", "Greater(A,B)", "Equal(A,C)", "Sub(C,B,2)", "Sub(A,B,1)"}),
                                1, ConstraintLibrary::standard());
  ASSERT_EQ(ranked.size(), 1u);
  EXPECT_EQ(render(ranked[0].literal), "Sub(A,B,1)");
}

TEST(Query, TimeoutGivesEmptyPreference) {
  struct Slow : Teacher {
    std::optional<std::vector<std::size_t>> answer(const AdviceQuery&, std::chrono::milliseconds) override {
      return std::nullopt;
    }
  } slow;
  AdviceLog log;
  AdviceQuery q;
  q.candidates = as_candidates({"Sub(A,B,1)"});
  auto pref = pose_query(q, 5, ConstraintLibrary::standard(), slow, log);
  EXPECT_TRUE(pref.timed_out);
  EXPECT_TRUE(pref.chosen.empty());
  EXPECT_TRUE(log.at(0).preference.timed_out);
}

TEST(Oracle, DisjointCandidatesGiveNothing) {
  auto oracle = scripted_oracle(truth());
  AdviceQuery q;
  q.theory = Theory{{structural_truth()}};
  q.candidates = as_candidates({"Geq(Hb,Hs)", "Greater(Hb,Hs)"});
  EXPECT_TRUE(oracle->answer(q, {})->empty());
}

TEST(Oracle, AlphaRenamedTruthAgrees) {
  auto renamed = parse_theory(
      "L(Q) :- Height(Q,P1), Base(Q,P2), Contains(Q,K1), Contains(Q,K2), Row(K1), Tower(K2),"
      " Width(K1,P3), Height(K2,P4), Equal(P2,P3), Sub(P4,P1,1), SpRel(K2,K1,\"NWTop\").");
  // The learner's clause uses its own names.
  auto current = parse_clause(
      "L(V0) :- Base(V0,V1), Contains(V0,V2), Contains(V0,V3), Height(V0,V4), Height(V3,V5), Row(V2), "
      "SpRel(V3,V2,\"NWTop\"), Tower(V3), Width(V2,V1).");
  AdviceQuery q;
  q.theory = Theory{{current}};
  q.candidates = as_candidates({"Sub(V5,V4,1)", "Greater(V5,V4)", "Geq(V5,V4)"});
  auto a = scripted_oracle(truth())->answer(q, {});
  auto b = scripted_oracle(renamed)->answer(q, {});
  EXPECT_EQ(*a, *b);
  EXPECT_EQ(*a, std::vector<std::size_t>{0});
}

TEST(Apply, AddsDedupsAndRespectsBound) {
  Theory t{{parse_clause("L(S) :- Height(S,Hs), Height(B,Hb).")}};
  auto sub = as_candidates({"Sub(Hb,Hs,1)"});
  auto once = apply_advice(t, sub, 20).theory;
  EXPECT_EQ(once.body_size(), 3u);
  EXPECT_EQ(render(apply_advice(once, sub, 20).theory), render(once));
  EXPECT_EQ(render(apply_advice(t, {}, 20).theory), render(t));
  auto capped = apply_advice(t, sub, 2);
  EXPECT_EQ(capped.skipped.size(), 1u);
  EXPECT_EQ(capped.theory.body_size(), 2u);
  // Order of application does not matter.
  auto two = as_candidates({"Sub(Hb,Hs,1)", "Greater(Hb,Hs)"});
  auto rev = two;
  std::reverse(rev.begin(), rev.end());
  EXPECT_EQ(render(apply_advice(t, two, 20).theory), render(apply_advice(t, rev, 20).theory));
}

TEST(Teachers, ReplayAndTerminal) {
  AdviceQuery q;
  q.candidates = as_candidates({"Sub(A,B,1)", "Equal(A,C)"});
  auto replay = replay_teacher({{q, {0, {1}, false}}});
  EXPECT_EQ(*replay->answer(q, {}), std::vector<std::size_t>{1});
  EXPECT_THROW(replay->answer(q, {}), std::runtime_error);

  std::istringstream in("0, 1\n");
  std::ostringstream out;
  auto term = terminal_teacher(in, out, ConstraintLibrary::standard());
  EXPECT_EQ(*term->answer(q, {}), (std::vector<std::size_t>{0, 1}));
  EXPECT_FALSE(term->answer(q, {}).has_value());
}

TEST(Gloss, ShowsWitness) {
  auto g = gloss(parse_literal("Sub(Hb,Hs,1)"), {4, 5, 1}, ConstraintLibrary::standard());
  EXPECT_EQ(g, "Sub(Hb,Hs,1)  [5 - 4 = 1]");
}

TEST(Oracle, TruthEqualitiesMatchSharedVariables) {
  // The bottom clause writes base and row width with one variable.
  auto truth = parse_theory(
      "Z(S) :- Base(S,Ws), Contains(S,A), Contains(S,C), Row(A), Row(C), Width(A,Wa), Width(C,Wc), "
      "Equal(Ws,Wa), Sub(Wc,Wa,2), SpRel(C,A,\"CenterTop\").");
  auto current = parse_clause(
      "Z(V0) :- Base(V0,V1), Contains(V0,V2), Contains(V0,V3), Row(V2), Row(V3), SpRel(V3,V2,\"CenterTop\"), "
      "Width(V2,V1), Width(V3,V4).");
  AdviceQuery q;
  q.theory = Theory{{current}};
  q.candidates = as_candidates({"Sub(V4,V1,2)", "Greater(V4,V1)"});
  EXPECT_EQ(*scripted_oracle(truth)->answer(q, {}), std::vector<std::size_t>{0});
}

TEST(Correspondence, OneToOne) {
  auto truth = parse_clause("G(S) :- Contains(S,B), Contains(S,C), Tower(B), Tower(C), SpRel(C,B,\"E\").");
  auto current = parse_clause("G(V0) :- Contains(V0,V1), Tower(V1), Contains(V0,V2), SpRel(V2,V1,\"E\").");
  auto m = structural_correspondence(truth, current, BuiltinRegistry::standard());
  EXPECT_EQ(m.at("B"), Term::var("V1"));
  EXPECT_EQ(m.at("C"), Term::var("V2"));
}
