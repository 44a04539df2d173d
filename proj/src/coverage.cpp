#include "goci/coverage.hpp"

#include <limits>

namespace goci {

namespace {

const std::vector<Literal> kNoFacts;

class Matcher {
 public:
  Matcher(const std::vector<Literal>& body, const FactIndex& facts, const MatchOptions& opts)
      : facts_(facts), opts_(opts) {
    for (const auto& l : body) {
      if (opts.builtins->is_builtin(l)) builtins_.push_back(&l);
      else regular_.push_back(&l);
    }
    done_.assign(regular_.size(), false);
  }

  std::optional<Substitution> run(const Substitution& initial) {
    bind_ = initial;
    if (opts_.injective)
      for (const auto& [k, v] : bind_)
        if (!v.is_int()) used_.insert(v);
    if (!builtins_ok()) return std::nullopt;
    if (search(regular_.size())) return bind_;
    return std::nullopt;
  }

  std::size_t nodes() const { return nodes_; }

 private:
  bool wildcard(const std::string& v) const { return opts_.wildcard.count(v) > 0; }

  bool match_term(const Term& pat, const Term& fact, std::vector<std::string>& trail) {
    if (!pat.is_var()) return pat == fact;
    if (wildcard(pat.name)) return true;
    auto it = bind_.find(pat.name);
    if (it != bind_.end()) return it->second == fact;
    if (opts_.injective && !fact.is_int() && !used_.insert(fact).second) return false;
    bind_.emplace(pat.name, fact);
    trail.push_back(pat.name);
    return true;
  }

  void undo(std::vector<std::string>& trail) {
    for (const auto& v : trail) {
      if (opts_.injective && !bind_.at(v).is_int()) used_.erase(bind_.at(v));
      bind_.erase(v);
    }
    trail.clear();
  }

  bool match_literal(const Literal& pat, const Literal& fact, std::vector<std::string>& trail) {
    for (std::size_t i = 0; i < pat.args.size(); ++i) {
      if (!match_term(pat.args[i], fact.args[i], trail)) {
        undo(trail);
        return false;
      }
    }
    return true;
  }

  // Evaluates every built-in whose variables are all bound.
  bool builtins_ok() const {
    for (const auto* b : builtins_) {
      Literal g{b->predicate, {}};
      bool ready = true;
      for (const auto& a : b->args) {
        if (a.is_var()) {
          if (wildcard(a.name)) {
            ready = false;
            break;
          }
          auto it = bind_.find(a.name);
          if (it == bind_.end()) {
            ready = false;
            break;
          }
          g.args.push_back(it->second);
        } else {
          g.args.push_back(a);
        }
      }
      if (!ready) continue;
      bool ok = false;
      try {
        ok = opts_.builtins->eval(g);
      } catch (const BuiltinError&) {
        ok = false;
      }
      if (!ok) return false;
    }
    return true;
  }

  void tick() {
    if (++nodes_ > opts_.node_budget)
      throw ResourceError("subsumption search exceeded node budget of " + std::to_string(opts_.node_budget));
  }

  bool search(std::size_t remaining) {
    if (remaining == 0) return close();

    // Forward checking: choose the open literal with the fewest consistent
    // candidate facts; fail fast when one has none.
    std::size_t best = regular_.size();
    std::size_t best_count = std::numeric_limits<std::size_t>::max();
    std::vector<std::string> trail;
    for (std::size_t i = 0; i < regular_.size(); ++i) {
      if (done_[i]) continue;
      const auto& cands = facts_.with_signature(regular_[i]->signature());
      std::size_t count = 0;
      for (const auto& f : cands) {
        if (match_literal(*regular_[i], f, trail)) {
          ++count;
          undo(trail);
          if (count >= best_count) break;
        }
      }
      if (count == 0) return false;
      if (count < best_count) {
        best_count = count;
        best = i;
      }
    }

    done_[best] = true;
    for (const auto& f : facts_.with_signature(regular_[best]->signature())) {
      if (!match_literal(*regular_[best], f, trail)) continue;
      tick();
      if (builtins_ok() && search(remaining - 1)) return true;
      undo(trail);
    }
    done_[best] = false;
    return false;
  }

  // Remaining unbound variables (those only in built-ins) range over the
  // integer constants of the active domain.
  bool close() {
    std::vector<std::string> open;
    for (const auto* b : builtins_)
      for (const auto& a : b->args)
        if (a.is_var() && !wildcard(a.name) && !bind_.count(a.name)) {
          bool seen = false;
          for (const auto& o : open) seen = seen || o == a.name;
          if (!seen) open.push_back(a.name);
        }
    if (open.empty()) return builtins_ok();
    if (!opts_.close_over_domain) return true;
    return enumerate(open, 0);
  }

  bool enumerate(const std::vector<std::string>& open, std::size_t i) {
    if (i == open.size()) return builtins_ok();
    for (const auto& t : facts_.domain()) {
      if (!t.is_int()) continue;
      tick();
      bind_[open[i]] = t;
      if (builtins_ok() && enumerate(open, i + 1)) return true;
      bind_.erase(open[i]);
    }
    return false;
  }

  const FactIndex& facts_;
  const MatchOptions& opts_;
  std::vector<const Literal*> regular_;
  std::vector<const Literal*> builtins_;
  std::vector<bool> done_;
  Substitution bind_;
  std::set<Term> used_;  // values taken, when injective
  std::size_t nodes_ = 0;
};

}  // namespace

FactIndex::FactIndex(const std::vector<Literal>& facts) {
  for (const auto& f : facts) {
    by_sig_[f.signature()].push_back(f);
    for (const auto& a : f.args) domain_.insert(a);
  }
}

const std::vector<Literal>& FactIndex::with_signature(const std::string& sig) const {
  auto it = by_sig_.find(sig);
  return it == by_sig_.end() ? kNoFacts : it->second;
}

std::optional<Substitution> find_substitution(const std::vector<Literal>& body, const FactIndex& facts,
                                              const Substitution& initial, const MatchOptions& opts,
                                              std::size_t* nodes_used) {
  Matcher m(body, facts, opts);
  auto r = m.run(initial);
  if (nodes_used) *nodes_used = m.nodes();
  return r;
}

std::optional<Substitution> unify_head(const Literal& head, const Literal& ground_head) {
  if (head.predicate != ground_head.predicate || head.arity() != ground_head.arity()) return std::nullopt;
  Substitution s;
  for (std::size_t i = 0; i < head.args.size(); ++i) {
    const auto& a = head.args[i];
    const auto& g = ground_head.args[i];
    if (!a.is_var()) {
      if (a != g) return std::nullopt;
      continue;
    }
    auto [it, fresh] = s.emplace(a.name, g);
    if (!fresh && it->second != g) return std::nullopt;
  }
  return s;
}

CoverResult covers(const Clause& c, const GroundExample& x, const CoverOptions& opts) {
  CoverResult r;
  auto head = unify_head(c.head, x.head);
  if (!head) return r;
  FactIndex idx(x.facts);
  for (const auto& a : x.head.args) idx.add_domain(a);
  MatchOptions mo;
  mo.node_budget = opts.node_budget;
  mo.builtins = opts.builtins;
  auto w = find_substitution(c.body, idx, *head, mo, &r.nodes);
  if (w) {
    r.covered = true;
    r.witness = std::move(w);
  }
  return r;
}

CoverResult covers(const Theory& t, const GroundExample& x, const CoverOptions& opts) {
  CoverResult total;
  for (std::size_t i = 0; i < t.clauses.size(); ++i) {
    CoverOptions o = opts;
    o.node_budget = opts.node_budget > total.nodes ? opts.node_budget - total.nodes : 0;
    auto r = covers(t.clauses[i], x, o);
    total.nodes += r.nodes;
    if (r.covered) {
      r.clause_index = i;
      r.nodes = total.nodes;
      return r;
    }
  }
  return total;
}

}  // namespace goci
