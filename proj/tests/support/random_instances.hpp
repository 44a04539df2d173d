#pragma once

// Random (clause, example) pairs and an exhaustive coverage check used as
// the reference for covers().

#include <random>
#include <set>
#include <string>
#include <vector>

#include "goci/builtins.hpp"
#include "goci/logic.hpp"

namespace goci::testing {

struct Instance {
  Clause clause;
  GroundExample example;
};

// <= 6 constants (objects and ints together), <= 4 clause variables.
inline Instance random_instance(std::mt19937_64& rng) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  const std::vector<std::string> objs{"s", "a", "b", "c"};
  std::size_t n_obj = 2 + pick(3);           // s plus 1..3 others
  std::size_t n_int = 1 + pick(7 - n_obj);   // total stays <= 6
  std::vector<Term> O, N;
  for (std::size_t i = 0; i < n_obj; ++i) O.push_back(Term::str(objs[i]));
  std::set<std::int64_t> ints;
  while (ints.size() < n_int) ints.insert(static_cast<std::int64_t>(1 + pick(5)));
  for (auto v : ints) N.push_back(Term::num(v));

  Instance in;
  auto& x = in.example;
  x.head = {"C", {Term::str("s")}};
  std::set<Literal> facts;
  std::size_t nf = 4 + pick(10);
  for (std::size_t k = 0; k < nf; ++k) {
    switch (pick(4)) {
      case 0: facts.insert({"P", {O[pick(O.size())]}}); break;
      case 1: facts.insert({"Q", {O[pick(O.size())], O[pick(O.size())]}}); break;
      case 2: facts.insert({"R", {O[pick(O.size())], O[pick(O.size())]}}); break;
      default: facts.insert({"W", {O[pick(O.size())], N[pick(N.size())]}}); break;
    }
  }
  x.facts.assign(facts.begin(), facts.end());
  x.time_index.assign(x.facts.size(), std::nullopt);

  // S is the head; objects A,B and one numeric-ish V (typed loosely on purpose)
  std::vector<std::string> vars{"S", "A", "B", "V"};
  std::size_t nv = 2 + pick(3);
  auto var = [&] { return Term::var(vars[pick(nv)]); };
  auto obj_or_const = [&] { return pick(5) == 0 ? O[pick(O.size())] : var(); };
  in.clause.head = {"C", {Term::var("S")}};
  std::size_t nb = 1 + pick(3);
  for (std::size_t k = 0; k < nb; ++k) {
    switch (pick(6)) {
      case 0: in.clause.body.push_back({"P", {obj_or_const()}}); break;
      case 1: in.clause.body.push_back({"Q", {obj_or_const(), obj_or_const()}}); break;
      case 2: in.clause.body.push_back({"R", {obj_or_const(), obj_or_const()}}); break;
      case 3:
        in.clause.body.push_back({"W", {obj_or_const(), pick(4) == 0 ? N[pick(N.size())] : var()}});
        break;
      case 4: in.clause.body.push_back({"Greater", {var(), var()}}); break;
      default: in.clause.body.push_back({"Sub", {var(), var(), Term::num(static_cast<std::int64_t>(pick(3)))}}); break;
    }
  }
  return in;
}

// Every assignment of clause variables to constants of the example.
inline bool brute_covers(const Clause& c, const GroundExample& x,
                         const BuiltinRegistry& reg = BuiltinRegistry::standard()) {
  std::set<Term> dom;
  for (const auto& t : x.head.args) dom.insert(t);
  for (const auto& f : x.facts)
    for (const auto& t : f.args) dom.insert(t);
  std::vector<Term> D(dom.begin(), dom.end());
  std::set<Literal> facts(x.facts.begin(), x.facts.end());
  auto vs = variables_in_order(c);
  std::vector<std::size_t> idx(vs.size(), 0);
  if (D.empty()) return false;
  for (;;) {
    Substitution s;
    for (std::size_t i = 0; i < vs.size(); ++i) s[vs[i]] = D[idx[i]];
    auto g = apply_substitution(c, s);
    bool ok = g.head == x.head;
    for (std::size_t k = 0; ok && k < g.body.size(); ++k) {
      const auto& l = g.body[k];
      if (reg.find(l.predicate)) {
        try {
          ok = reg.eval(l);
        } catch (const BuiltinError&) {
          ok = false;
        }
      } else {
        ok = facts.count(l) > 0;
      }
    }
    if (ok) return true;
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == D.size()) idx[i++] = 0;
    if (i == idx.size()) return false;
  }
}

}  // namespace goci::testing
