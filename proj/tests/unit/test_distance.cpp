#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "goci/distance.hpp"
#include "goci/io.hpp"
#include "goci/parse.hpp"
#include "goci/plan.hpp"

using namespace goci;

namespace {

const std::string kData = GOCI_DATA_DIR;

Domain blocks() { return parse_domain(read_file(kData + "/blocks/blocks.dom")); }
GroundExample ell() { return parse_example(read_file(kData + "/blocks/L.facts")); }

std::string tower_plan(const std::string& b, int h) {
  return derive_plan({parse_literal("Tower(" + b + ")"), parse_literal("Height(" + b + "," + std::to_string(h) + ")")},
                     blocks());
}

std::string row_plan(const std::string& a, int w) {
  return derive_plan({parse_literal("Row(" + a + ")"), parse_literal("Width(" + a + "," + std::to_string(w) + ")")},
                     blocks());
}

}  // namespace

TEST(Lzss, EmptyIsHeaderOnly) {
  EXPECT_EQ(compressed_size(""), 4u);
  EXPECT_EQ(lzss_decompress(lzss_compress("")), "");
}

TEST(Lzss, RepeatedLineCompresses) {
  std::string s;
  while (s.size() < 1024) s += "place(b,0,0)\n";
  s.resize(1024);
  EXPECT_LT(compressed_size(s), 1024 * 0.15);
  EXPECT_EQ(lzss_decompress(lzss_compress(s)), s);
}

TEST(Lzss, RandomBytesDoNotShrink) {
  std::mt19937 rng(42);
  std::string s(1024, '\0');
  for (auto& c : s) c = static_cast<char>(rng() & 0xff);
  EXPECT_GE(compressed_size(s), 1024 * 0.95);
  EXPECT_EQ(lzss_decompress(lzss_compress(s)), s);
}

TEST(Lzss, RoundTripProperty) {
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    std::string s(rng() % 6000, '\0');
    const char alphabet = static_cast<char>(2 + rng() % 30);
    for (auto& c : s) c = static_cast<char>('a' + rng() % alphabet);
    ASSERT_EQ(lzss_decompress(lzss_compress(s)), s);
  }
}

TEST(Ncd, StubSizes) {
  auto stub = [](std::string_view s) -> std::size_t {
    if (s == "T") return 10;
    if (s == "X") return 12;
    return 15;
  };
  auto r = ncd("T", "X", stub);
  EXPECT_NEAR(r.ncd, 5.0 / 12.0, 1e-12);
  EXPECT_EQ(r.c_ab, 15u);
}

TEST(Ncd, BothEmptyIsDomainError) { EXPECT_THROW(ncd("", ""), std::domain_error); }

TEST(Ncd, IdentityAndSeparation) {
  for (int h = 5; h <= 40; h += 5) {
    auto p = tower_plan("b", h);
    EXPECT_LE(ncd(p, p).ncd, kNcdTolerance) << h;
  }
  EXPECT_GE(ncd(tower_plan("b", 8), row_plan("a", 8)).ncd, 0.3);
}

TEST(Ncd, MonotoneInSizeGap) {
  double last = -1;
  for (int k : {1, 2, 4, 8}) {
    double d = ncd(tower_plan("b", 12), tower_plan("b", 12 + k)).ncd;
    EXPECT_GE(d, last) << k;
    last = d;
  }
}

TEST(Distance, TruthIsNearZero) {
  auto t = parse_theory(read_file(kData + "/blocks/L_truth.thy"));
  auto r = conceptual_distance(t, ell(), blocks());
  EXPECT_FALSE(r.failed);
  EXPECT_LE(r.ncd, kNcdTolerance);
}

TEST(Distance, UnconstrainedTowerIsFarther) {
  auto d = blocks();
  auto x = ell();
  auto truth = parse_theory(read_file(kData + "/blocks/L_truth.thy"));
  auto loose = truth;
  loose.clauses.resize(1);
  auto& body = loose.clauses[0].body;
  std::erase_if(body, [](const Literal& l) { return l.predicate == "Sub"; });
  EXPECT_GT(conceptual_distance(loose, x, d).ncd, conceptual_distance(truth, x, d).ncd + 0.05);
}

TEST(Distance, EmptyPlanIsFar) {
  auto r = conceptual_distance(Theory{{parse_clause("L(S).")}}, ell(), blocks());
  EXPECT_GT(r.ncd, 0.9);
}

TEST(Distance, FailureIsSentinel) {
  auto r = conceptual_distance(Theory{{parse_clause("L(S) :- Tower(B).")}}, ell(), blocks());
  EXPECT_TRUE(r.failed);
  EXPECT_DOUBLE_EQ(r.ncd, kDistanceSentinel);
}

TEST(Distance, AlphaEquivalentTheoriesAgree) {
  auto d = blocks();
  auto x = ell();
  auto a = parse_theory("L(S) :- Row(A), Width(A,W), Base(S,W), Tower(B), Height(B,H).");
  auto b = parse_theory("L(Q) :- Row(Z), Width(Z,K), Base(Q,K), Tower(Y), Height(Y,M).");
  auto ra = conceptual_distance(a, x, d);
  auto rb = conceptual_distance(b, x, d);
  EXPECT_EQ(ra.ncd, rb.ncd);
  EXPECT_EQ(ra.c_ab, rb.c_ab);
}
