#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "goci/io.hpp"
#include "goci/parse.hpp"
#include "goci/search.hpp"

using namespace goci;

namespace {

const std::string kData = GOCI_DATA_DIR;

Domain blocks() { return parse_domain(read_file(kData + "/blocks/blocks.dom")); }
GroundExample ell() { return parse_example(read_file(kData + "/blocks/L.facts")); }
Theory truth() { return parse_theory(read_file(kData + "/blocks/L_truth.thy")); }

std::size_t count_pred(const Clause& c, const std::string& p, std::size_t arity) {
  return static_cast<std::size_t>(std::count_if(c.body.begin(), c.body.end(), [&](const Literal& l) {
    return l.predicate == p && l.arity() == arity;
  }));
}

}  // namespace

TEST(Bottom, EllHasNineLiterals) {
  auto b = bottom_clause(ell(), blocks(), SearchConfig{});
  EXPECT_EQ(b.body.size(), 9u);
  EXPECT_EQ(render(b.head), "L(V0)");
  bool kept = false;
  for (const auto& l : b.body) kept = kept || (l.predicate == "SpRel" && l.args[2] == Term::str("NWTop"));
  EXPECT_TRUE(kept);
  EXPECT_TRUE(std::is_sorted(b.body.begin(), b.body.end()));
}

TEST(Bottom, DepthBoundDropsDeepLiterals) {
  SearchConfig cfg;
  cfg.bounds.depth = 1;
  auto b = bottom_clause(ell(), blocks(), cfg);
  // Height(b,4): b is at depth 1, so its height sits at depth 2.
  EXPECT_EQ(count_pred(b, "Height", 2), 1u);
  EXPECT_EQ(count_pred(b, "Width", 2), 1u);  // shares the base variable
  EXPECT_EQ(b.body.size(), 8u);
}

TEST(Bottom, SingleFact) {
  auto d = parse_domain("mode: P(+int)\n");
  auto x = parse_example("@concept C(k).\nP(3).\n");
  auto b = bottom_clause(x, d, SearchConfig{});
  EXPECT_EQ(b.body.size(), 0u);  // P(3) is not connected to the head
  auto d2 = parse_domain("mode: P(-int)\n");
  EXPECT_EQ(render(bottom_clause(x, d2, SearchConfig{})), "C(V0) :- P(V1).");
}

TEST(Bottom, MissingModeNamesPredicate) {
  auto x = parse_example("@concept C(k).\nQ(k).\n");
  try {
    bottom_clause(x, blocks(), SearchConfig{});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("Q/1"), std::string::npos);
  }
}

TEST(Refine, DeleteGivesNineChildren) {
  auto b = bottom_clause(ell(), blocks(), SearchConfig{});
  auto kids = refinements(b, b, {}, blocks(), SearchConfig{}.bounds);
  EXPECT_EQ(std::count_if(kids.begin(), kids.end(),
                          [&](const Clause& c) {
                            return c.body.size() == 8 &&
                                   std::includes(b.body.begin(), b.body.end(), c.body.begin(), c.body.end());
                          }),
            9);
}

TEST(Refine, AddPreferred) {
  auto c = parse_clause("L(S) :- Height(S,Hs), Contains(S,B), Tower(B), Height(B,Hb).");
  auto sub = parse_literal("Sub(Hb,Hs,1)");
  auto kids = refinements(c, c, {sub}, blocks(), SearchConfig{}.bounds);
  bool found = false;
  for (const auto& k : kids) found = found || std::count(k.body.begin(), k.body.end(), sub);
  EXPECT_TRUE(found);
}

TEST(Refine, HandCountedOperators) {
  // S, A are obj; Ws, Wa are width: two merges, four deletions, nothing to add.
  auto c = parse_clause("L(S) :- Base(S,Ws), Contains(S,A), Row(A), Width(A,Wa).");
  auto kids = refinements(c, c, {}, blocks(), SearchConfig{}.bounds);
  EXPECT_EQ(kids.size(), 6u);
  bool merged = false;
  for (const auto& k : kids) merged = merged || render(k) == "L(S) :- Base(S,Ws), Contains(S,A), Row(A), Width(A,Ws).";
  EXPECT_TRUE(merged);
}

TEST(Refine, BoundsRespected) {
  SearchBounds b;
  b.max_body = 3;
  auto c = parse_clause("L(S) :- Base(S,Ws), Contains(S,A), Row(A).");
  auto full = parse_clause("L(S) :- Base(S,Ws), Contains(S,A), Row(A), Width(A,Wa).");
  for (const auto& k : refinements(c, full, {}, blocks(), b)) EXPECT_LE(k.body.size(), 3u);
}

TEST(Refine, DeletionReachesAnySubclause) {
  auto d = blocks();
  auto b = bottom_clause(ell(), d, SearchConfig{});
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Clause target = b;
    std::erase_if(target.body, [&](const Literal&) { return rng() % 2 == 0; });
    Clause cur = b;
    while (cur.body.size() > target.body.size()) {
      bool stepped = false;
      for (const auto& k : refinements(cur, b, {}, d, SearchConfig{}.bounds)) {
        if (k.body.size() + 1 != cur.body.size()) continue;
        if (std::includes(k.body.begin(), k.body.end(), target.body.begin(), target.body.end())) {
          cur = k;
          stepped = true;
          break;
        }
      }
      ASSERT_TRUE(stepped);
    }
    EXPECT_EQ(render(cur), render(target));
  }
}

TEST(Likelihood, Values) {
  SearchConfig cfg;
  auto x = ell();
  Theory t{{truth().clauses[0]}};
  EXPECT_NEAR(neg_log_likelihood(t, {x}, {}, cfg), 0.11, 1e-12);
  cfg.kappa_len = 0;
  EXPECT_EQ(neg_log_likelihood(Theory{{parse_clause("L(S).")}}, {x}, {}, cfg), 0.0);
  EXPECT_EQ(neg_log_likelihood(Theory{{parse_clause("L(S) :- Cube(S).")}}, {x}, {}, cfg), 10.0);
}

TEST(Step, FixpointWhenNothingImproves) {
  auto d = parse_domain("mode: P(+obj, -int)\n");
  auto x = parse_example("@concept C(k).\nP(k,3).\n");
  SearchConfig cfg;
  cfg.beam_width = 1;
  cfg.kappa_len = 0;
  auto b = bottom_clause(x, d, cfg);
  Scorer s({x}, {}, d, cfg, false);
  auto r = search_step(Theory{{b}}, {b}, {}, d, cfg, s);
  EXPECT_FALSE(r.improved);
  EXPECT_EQ(render(r.theory), render(Theory{{b}}));
}

TEST(Step, PicksExhaustiveBestChild) {
  auto d = blocks();
  auto x = ell();
  SearchConfig cfg;
  cfg.levels = 1;
  cfg.beam_width = 100;
  auto b = bottom_clause(x, d, cfg);
  Scorer s({x}, {}, d, cfg, true);
  auto r = search_step(Theory{{b}}, {b}, {}, d, cfg, s);

  Scorer oracle({x}, {}, d, cfg, true);
  Theory best{{b}};
  double best_score = oracle.score(best).total;
  for (const auto& k : refinements(b, b, {}, d, cfg.bounds)) {
    Theory t{{k}};
    double sc = oracle.score(t).total;
    if (sc < best_score || (sc == best_score && std::pair(t.body_size(), render(t)) < std::pair(best.body_size(), render(best)))) {
      best = t;
      best_score = sc;
    }
  }
  EXPECT_EQ(render(r.theory), render(best));
  EXPECT_DOUBLE_EQ(r.score.total, best_score);
}

TEST(Step, Deterministic) {
  auto d = blocks();
  auto x = ell();
  SearchConfig cfg;
  auto b = bottom_clause(x, d, cfg);
  Scorer s1({x}, {}, d, cfg, true), s2({x}, {}, d, cfg, true);
  auto r1 = search_step(Theory{{b}}, {b}, {}, d, cfg, s1);
  auto r2 = search_step(Theory{{b}}, {b}, {}, d, cfg, s2);
  EXPECT_EQ(render(r1.theory), render(r2.theory));
  EXPECT_LE(r1.score.total, s1.score(Theory{{b}}).total);
}
