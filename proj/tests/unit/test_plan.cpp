#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "goci/coverage.hpp"
#include "goci/io.hpp"
#include "goci/parse.hpp"
#include "goci/plan.hpp"

using namespace goci;

namespace {

const std::string kData = GOCI_DATA_DIR;

Domain blocks() { return parse_domain(read_file(kData + "/blocks/blocks.dom")); }
GroundExample ell() { return parse_example(read_file(kData + "/blocks/L.facts")); }
Theory truth() { return parse_theory(read_file(kData + "/blocks/L_truth.thy")); }

}  // namespace

TEST(Domain, ParsesBlocks) {
  auto d = blocks();
  EXPECT_EQ(d.modes.size(), 8u);
  EXPECT_EQ(d.rules.size(), 8u);
  EXPECT_EQ(d.position_type("SpRel/3", 2), "dir");
  EXPECT_TRUE(d.is_numeric_type("height"));
  EXPECT_NO_THROW(check_acyclic(d));
}

TEST(Domain, RejectsUnknownSection) {
  EXPECT_THROW(parse_domain("colour: red\n"), ParseError);
  EXPECT_THROW(parse_domain("mode: P(+a)\nmode: P(-b)\n"), ParseError);
}

TEST(Domain, CycleDetected) {
  auto d = parse_domain("expand: A(X) -> B(X)\nexpand: B(X) -> A(X)\n");
  EXPECT_THROW(check_acyclic(d), PlanError);
}

TEST(Plan, TowerExpansion) {
  auto d = parse_domain("expand: Tower(B) where Height(B,H) -> place(B,0,k) for k in 0..H-1\n");
  auto plan = derive_plan({parse_literal("Tower(b)"), parse_literal("Height(b,4)")}, d);
  EXPECT_EQ(plan, "place(b,0,0)\nplace(b,0,1)\nplace(b,0,2)\nplace(b,0,3)\n");
}

TEST(Plan, EmptyFacts) { EXPECT_EQ(derive_plan(std::vector<Literal>{}, blocks()), ""); }

TEST(Plan, TimeIndexOrdersActions) {
  auto d = parse_domain("mode: fetch(+obj, #time)\nmode: attach(+obj, +obj, #time)\n");
  auto x = parse_example("@concept C(x).\n@time 1: attach(x,y).\n@time 0: fetch(x).\n");
  EXPECT_EQ(derive_plan(x, d), "fetch(x)\nattach(x,y)\n");
}

TEST(Plan, CanonicalUnderShuffle) {
  auto d = blocks();
  auto x = ell();
  auto ref = derive_plan(x, d);
  std::mt19937 rng(7);
  for (int i = 0; i < 20; ++i) {
    auto f = x.facts;
    std::shuffle(f.begin(), f.end(), rng);
    EXPECT_EQ(derive_plan(f, d), ref);
  }
}

TEST(Plan, NotExpandableComposite) {
  // A tower without a height cannot be built.
  EXPECT_THROW(derive_plan(std::vector<Literal>{parse_literal("Tower(b)")}, blocks()), PlanError);
}

TEST(Decompose, Diagnosis) {
  auto d = blocks();
  EXPECT_TRUE(check_decomposable(truth(), d).ok);
  auto bad = check_decomposable(Theory{{parse_clause("L(S) :- Arch(X), Row(X).")}}, d);
  EXPECT_FALSE(bad.ok);
  ASSERT_EQ(bad.diagnosis.size(), 1u);
  EXPECT_EQ(bad.diagnosis[0], "Arch/1");
  auto vacuous = check_decomposable(Theory{{parse_clause("L(S) :- Equal(X,Y).")}}, d);
  EXPECT_TRUE(vacuous.ok);
}

TEST(Ground, TruthReproducesExample) {
  auto x = ell();
  auto g = ground_theory(truth(), x, blocks());
  EXPECT_TRUE(g.complete);
  auto facts = x.facts;
  facts.push_back(parse_literal("Equal(4,4)"));
  facts.push_back(parse_literal("Sub(4,5,1)"));
  std::sort(facts.begin(), facts.end());
  EXPECT_EQ(g.facts, facts);
  EXPECT_EQ(derive_plan(g.facts, blocks()), derive_plan(x, blocks()));
}

TEST(Ground, PropagatesSub) {
  auto x = ell();
  x.params = {{"base", 2}, {"height", 3}};
  auto g = ground_clause(truth().clauses[0], x, blocks());
  // The facts describe a different size, so objects are skolems.
  EXPECT_FALSE(g.skeleton_matched);
  auto has_value = [&](const std::string& pred, std::int64_t v) {
    return std::any_of(g.facts.begin(), g.facts.end(), [&](const Literal& l) {
      return l.predicate == pred && l.args[0] != Term::str("s") && l.args[1] == Term::num(v);
    });
  };
  EXPECT_TRUE(has_value("Height", 2));
  EXPECT_TRUE(has_value("Width", 2));
  EXPECT_TRUE(std::count(g.facts.begin(), g.facts.end(), parse_literal("Sub(2,3,1)")));
}

TEST(Ground, FixedNumbersConstrainObjects) {
  // Claims the tower is as tall as the whole shape; the example disagrees.
  auto c = parse_clause("L(S) :- Height(S,Hs), Tower(B), Height(B,Hs).");
  EXPECT_FALSE(ground_clause(c, ell(), blocks(), true).skeleton_matched);
  auto ok = parse_clause("L(S) :- Height(S,Hs), Tower(B), Height(B,Hb), Sub(Hb,Hs,1).");
  auto g = ground_clause(ok, ell(), blocks(), true);
  EXPECT_TRUE(g.skeleton_matched);
  EXPECT_TRUE(std::count(g.facts.begin(), g.facts.end(), parse_literal("Height(b,4)")));
}

TEST(Ground, DistinctVariablesPreferDistinctObjects) {
  auto c = parse_clause("L(S) :- Contains(S,A), Contains(S,B).");
  auto g = ground_clause(c, ell(), blocks(), true);
  EXPECT_NE(g.binding.at("A"), g.binding.at("B"));
}

TEST(Ground, Contradiction) {
  auto c = parse_clause("L(S) :- Base(S,Ws), Width(A,Wa), Equal(Ws,Wa), Sub(Wa,Ws,1).");
  EXPECT_THROW(ground_clause(c, ell(), blocks()), PlanError);
  EXPECT_THROW(ground_clause(c, ell(), blocks(), true), PlanError);
}

TEST(Ground, LenientMarksUnknown) {
  auto c = parse_clause("L(S) :- Tower(B), Height(B,H).");
  EXPECT_THROW(ground_clause(c, ell(), blocks()), PlanError);
  auto g = ground_clause(c, ell(), blocks(), true);
  EXPECT_FALSE(g.complete);
  EXPECT_EQ(derive_plan(g.facts, blocks()), "measure(b,\"?\")\nplace(b,0,\"?\")\n");
}

TEST(Ground, SkolemsWhenSkeletonMissing) {
  auto c = parse_clause("L(S) :- Cube(C).");
  auto g = ground_clause(c, ell(), blocks());
  EXPECT_FALSE(g.skeleton_matched);
  EXPECT_EQ(g.facts, std::vector<Literal>{parse_literal("Cube(o1)")});
}

TEST(Coverage, TruthCoversExample) {
  auto r = covers(truth(), ell());
  ASSERT_TRUE(r.covered);
  EXPECT_EQ(r.clause_index, 0u);
  EXPECT_EQ(r.witness->at("Hb"), Term::num(4));
}

TEST(Digest, Stable) {
  EXPECT_EQ(digest(""), "cbf29ce484222325");
  EXPECT_EQ(digest("a"), "af63dc4c8601ec8c");
}
