#include "goci/plan.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "goci/coverage.hpp"

namespace goci {

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_primitive(const Literal& l) {
  return !l.predicate.empty() && std::islower(static_cast<unsigned char>(l.predicate[0]));
}

// Values of numeric variables: a known integer or the unknown marker.
std::optional<Term> eval_expr(const AffineExpr& e, const Substitution& env) {
  std::int64_t v = e.constant;
  for (const auto& [name, coef] : e.coef) {
    auto it = env.find(name);
    if (it == env.end()) return std::nullopt;
    if (it->second == kUnknown) return kUnknown;
    if (!it->second.is_int()) throw PlanError("non-integer value for '" + name + "' in expression");
    v += coef * it->second.value;
  }
  return Term::num(v);
}

// One pass per round over the built-ins, solving those with exactly one
// unbound integer variable, until nothing changes.
void propagate(const std::vector<const Literal*>& builtins, Substitution& s, const BuiltinRegistry& reg) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto* b : builtins) {
      const auto* def = reg.find(b->predicate);
      std::vector<std::optional<std::int64_t>> vals(b->arity());
      std::vector<std::size_t> open;
      bool numeric = true;
      for (std::size_t i = 0; i < b->arity(); ++i) {
        Term t = apply_substitution(b->args[i], s);
        if (t.is_var()) {
          open.push_back(i);
        } else if (t.is_int()) {
          vals[i] = t.value;
        } else {
          numeric = false;
        }
      }
      if (!numeric) continue;
      if (open.empty()) {
        std::vector<std::int64_t> v;
        for (auto& o : vals) v.push_back(*o);
        if (!def->holds(v)) throw PlanError("unsatisfiable constraint " + render(apply_substitution(*b, s)));
        continue;
      }
      if (open.size() != 1) continue;
      auto solved = def->solve(open[0], vals);
      if (!solved) continue;
      s[b->args[open[0]].name] = Term::num(*solved);
      changed = true;
    }
  }
}

}  // namespace

Decomposability check_decomposable(const Theory& t, const Domain& d, const BuiltinRegistry& reg) {
  Decomposability r;
  std::set<std::string> seen;
  for (const auto& c : t.clauses) {
    for (const auto& l : c.body) {
      if (reg.is_builtin(l)) continue;
      auto sig = l.signature();
      if (d.rule_for(sig) || d.mode_for(sig)) continue;
      if (seen.insert(sig).second) r.diagnosis.push_back(sig);
    }
  }
  r.ok = r.diagnosis.empty();
  return r;
}

void check_acyclic(const Domain& d) {
  // Edges: trigger signature -> signatures of steps that are themselves composites.
  std::map<std::string, std::vector<std::string>> edges;
  for (const auto& r : d.rules) {
    auto& out = edges[r.trigger.signature()];
    for (const auto& s : r.steps) {
      auto sig = s.name + "/" + std::to_string(s.args.size());
      if (d.rule_for(sig)) out.push_back(sig);
    }
  }
  std::map<std::string, int> state;  // 1 visiting, 2 done
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    auto& st = state[n];
    if (st == 2) return;
    if (st == 1) throw PlanError("cyclic expansion through " + n);
    st = 1;
    for (const auto& m : edges[n]) visit(m);
    state[n] = 2;
  };
  for (const auto& [n, _] : edges) visit(n);
}

Grounding ground_clause(const Clause& c, const GroundExample& x, const Domain& d, bool lenient,
                        const BuiltinRegistry& reg) {
  Grounding g;
  auto head = unify_head(c.head, x.head);
  if (!head) throw PlanError("clause head " + render(c.head) + " does not match " + render(x.head));
  Substitution s = *head;

  std::set<Term> head_terms(x.head.args.begin(), x.head.args.end());
  std::vector<const Literal*> builtins;
  std::vector<Literal> skeleton;
  for (const auto& l : c.body) {
    if (reg.is_builtin(l)) {
      builtins.push_back(&l);
      continue;
    }
    skeleton.push_back(l);
    // Attribute of the concept instance named after a parameter.
    if (l.arity() < 2 || !l.args.back().is_var()) continue;
    auto owner = apply_substitution(l.args[0], s);
    if (!head_terms.count(owner)) continue;
    auto p = x.params.find(lower(l.predicate));
    if (p == x.params.end()) continue;
    auto [it, fresh] = s.emplace(l.args.back().name, Term::num(p->second));
    if (!fresh && it->second != Term::num(p->second))
      throw PlanError("parameter " + p->first + " conflicts with an earlier binding");
  }

  propagate(builtins, s, reg);

  // Object variables: match the skeleton. Numbers already fixed by the
  // parameters must match too; the rest are wildcards.
  auto numeric = d.numeric_variables(c, reg);
  MatchOptions mo;
  mo.builtins = &reg;
  mo.close_over_domain = false;
  for (const auto& v : numeric)
    if (!s.count(v)) mo.wildcard.insert(v);
  Substitution objects = s;
  FactIndex idx(x.facts);
  // Prefer distinct objects for distinct variables, so that two towers in
  // the clause become two towers in the plan.
  std::optional<Substitution> w;
  for (bool inj : {true, false}) {
    mo.injective = inj;
    try {
      w = find_substitution(skeleton, idx, objects, mo);
    } catch (const ResourceError&) {
      w.reset();
    }
    if (w) break;
  }
  if (w) {
    for (const auto& [k, v] : *w)
      if (!numeric.count(k)) s.emplace(k, v);
  } else {
    g.skeleton_matched = false;
  }
  int skolem = 0;
  for (const auto& v : variables_in_order(c)) {
    if (s.count(v) || numeric.count(v)) continue;
    s.emplace(v, Term::str("o" + std::to_string(++skolem)));
  }

  for (const auto& v : numeric) {
    if (s.count(v)) continue;
    if (!lenient) throw PlanError("unbound variable " + v + " after constraint propagation");
    s.emplace(v, kUnknown);
    g.complete = false;
  }

  for (const auto& l : c.body) {
    auto gl = apply_substitution(l, s);
    if (reg.is_builtin(l)) {
      bool known = std::all_of(gl.args.begin(), gl.args.end(), [](const Term& t) { return t.is_int(); });
      if (known && !reg.eval(gl)) throw PlanError("unsatisfiable constraint " + render(gl));
      if (!known) continue;
    }
    g.facts.push_back(std::move(gl));
  }
  std::sort(g.facts.begin(), g.facts.end());
  g.facts.erase(std::unique(g.facts.begin(), g.facts.end()), g.facts.end());
  g.binding = std::move(s);
  return g;
}

Grounding ground_theory(const Theory& t, const GroundExample& x, const Domain& d, bool lenient,
                        const BuiltinRegistry& reg) {
  if (t.clauses.empty()) throw PlanError("empty theory");
  std::optional<Grounding> fallback;
  std::string last_error;
  for (std::size_t i = 0; i < t.clauses.size(); ++i) {
    try {
      auto g = ground_clause(t.clauses[i], x, d, lenient, reg);
      g.clause_index = i;
      if (g.complete && g.skeleton_matched) return g;
      if (!fallback) fallback = std::move(g);
    } catch (const PlanError& e) {
      last_error = e.what();
    }
  }
  if (fallback) return *fallback;
  throw PlanError(last_error);
}

namespace {

struct Expander {
  const Domain& d;
  const BuiltinRegistry& reg;
  FactIndex index;
  std::vector<Literal> untimed;
  std::vector<std::pair<std::int64_t, Literal>> timed;

  Expander(const std::vector<Literal>& facts, const Domain& dom, const BuiltinRegistry& r)
      : d(dom), reg(r), index(facts) {}

  void emit(Literal a) {
    if (d.is_temporal(a.signature()) && !a.args.empty() && a.args.back().is_int()) {
      auto t = a.args.back().value;
      a.args.pop_back();
      timed.emplace_back(t, std::move(a));
    } else {
      untimed.push_back(std::move(a));
    }
  }

  Term eval_arg(const ArgTemplate& a, const Substitution& env) {
    switch (a.kind) {
      case ArgTemplate::Kind::Constant:
        return a.constant;
      case ArgTemplate::Kind::Variable: {
        auto it = env.find(a.variable);
        if (it == env.end()) throw PlanError("unbound rule variable " + a.variable);
        return it->second;
      }
      case ArgTemplate::Kind::Expr: {
        auto v = eval_expr(a.expr, env);
        if (!v) throw PlanError("unbound variable in expression " + a.expr.render());
        return *v;
      }
    }
    return kUnknown;
  }

  void expand(const Literal& fact, std::size_t depth) {
    if (reg.is_builtin(fact)) return;
    const auto* rule = d.rule_for(fact.signature());
    if (!rule) {
      if (is_primitive(fact)) emit(fact);
      return;
    }
    if (depth > d.rules.size()) throw PlanError("cyclic expansion at " + render(fact));
    auto s = unify_head(rule->trigger, fact);
    if (!s) throw PlanError("cannot expand " + render(fact));
    if (!rule->where.empty()) {
      MatchOptions mo;
      mo.builtins = &reg;
      mo.close_over_domain = false;
      auto w = find_substitution(rule->where, index, *s, mo);
      if (!w) throw PlanError("composite " + render(fact) + " is not expandable: " + rule->source);
      s = std::move(w);
    }
    for (const auto& step : rule->steps) {
      auto make = [&](const Substitution& env) {
        Literal a{step.name, {}};
        for (const auto& arg : step.args) a.args.push_back(eval_arg(arg, env));
        if (d.rule_for(a.signature())) expand(a, depth + 1);
        else emit(std::move(a));
      };
      if (!step.loop_var) {
        make(*s);
        continue;
      }
      auto lo = eval_expr(step.loop_lo, *s);
      auto hi = eval_expr(step.loop_hi, *s);
      if (!lo || !hi) throw PlanError("unbound loop bound in " + rule->source);
      Substitution env = *s;
      if (*lo == kUnknown || *hi == kUnknown) {
        env[*step.loop_var] = kUnknown;
        make(env);
        continue;
      }
      if (hi->value - lo->value > 100000) throw PlanError("loop too long in " + rule->source);
      for (auto k = lo->value; k <= hi->value; ++k) {
        env[*step.loop_var] = Term::num(k);
        make(env);
      }
    }
  }
};

}  // namespace

std::string derive_plan(const std::vector<Literal>& facts, const Domain& d, const BuiltinRegistry& reg) {
  std::vector<Literal> uniq = facts;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  Expander e(uniq, d, reg);
  for (const auto& f : uniq) e.expand(f, 0);
  std::sort(e.untimed.begin(), e.untimed.end());
  std::sort(e.timed.begin(), e.timed.end());
  std::string out;
  for (const auto& a : e.untimed) out += render(a) + "\n";
  for (const auto& [t, a] : e.timed) out += render(a) + "\n";
  return out;
}

std::string derive_plan(const GroundExample& x, const Domain& d, const BuiltinRegistry& reg) {
  return derive_plan(x.facts, d, reg);
}

}  // namespace goci
