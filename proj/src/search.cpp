#include "goci/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "goci/coverage.hpp"

namespace goci {

void SearchConfig::validate() const {
  if (beam_width < 1) throw std::invalid_argument("beam width must be at least 1");
  if (bounds.depth < 1 || bounds.arity < 1) throw std::invalid_argument("depth and arity bounds must be at least 1");
  if (kappa_miss < 0 || kappa_len < 0) throw std::invalid_argument("weights must be non-negative");
}

std::map<std::string, std::size_t> variable_depths(const Clause& c, const Domain& d, const BuiltinRegistry& reg) {
  std::map<std::string, std::size_t> depth;
  for (const auto& a : c.head.args)
    if (a.is_var()) depth[a.name] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& l : c.body) {
      if (reg.is_builtin(l)) continue;
      const auto* m = d.mode_for(l.signature());
      if (!m) continue;
      std::size_t in = 0;
      bool ready = true;
      for (std::size_t i = 0; i < l.args.size() && ready; ++i) {
        if (m->modes[i] != ArgMode::Input || !l.args[i].is_var()) continue;
        auto it = depth.find(l.args[i].name);
        if (it == depth.end()) ready = false;
        else in = std::max(in, it->second);
      }
      if (!ready) continue;
      for (std::size_t i = 0; i < l.args.size(); ++i) {
        if (m->modes[i] != ArgMode::Output || !l.args[i].is_var()) continue;
        auto [it, fresh] = depth.emplace(l.args[i].name, in + 1);
        if (!fresh && it->second > in + 1) {
          it->second = in + 1;
          fresh = true;
        }
        changed = changed || fresh;
      }
    }
  }
  return depth;
}

Clause bottom_clause(const GroundExample& x, const Domain& d, const SearchConfig& cfg) {
  cfg.validate();
  for (const auto& f : x.facts)
    if (!d.mode_for(f.signature())) throw DomainError("no mode declaration for " + f.signature());
  auto v = variablize(x, d.variablize_options());
  Clause c = v.clause;
  auto depth = variable_depths(c, d);
  std::vector<Literal> kept;
  for (const auto& l : c.body) {
    if (l.arity() > cfg.bounds.arity) continue;
    bool ok = true;
    for (const auto& a : l.args) {
      if (!a.is_var()) continue;
      auto it = depth.find(a.name);
      ok = ok && it != depth.end() && it->second <= cfg.bounds.depth;
    }
    if (ok) kept.push_back(l);
  }
  c.body = std::move(kept);
  if (c.body.size() > cfg.bounds.max_body) c.body.resize(cfg.bounds.max_body);
  canonicalize(c);
  return c;
}

bool within_bounds(const Clause& c, const Domain& d, const SearchBounds& b, const BuiltinRegistry& reg) {
  if (c.body.size() > b.max_body) return false;
  for (const auto& l : c.body)
    if (l.arity() > b.arity) return false;
  for (const auto& [v, k] : variable_depths(c, d, reg))
    if (k > b.depth) return false;
  return true;
}

std::vector<Clause> refinements(const Clause& c, const Clause& bottom, const std::vector<Literal>& preferred,
                                const Domain& d, const SearchBounds& b, const BuiltinRegistry& reg) {
  std::vector<Clause> out;
  std::set<std::string> seen{render(c)};
  auto push = [&](Clause child) {
    canonicalize(child);
    if (!within_bounds(child, d, b, reg)) return;
    if (seen.insert(render(child)).second) out.push_back(std::move(child));
  };
  auto has = [&](const Literal& l) { return std::find(c.body.begin(), c.body.end(), l) != c.body.end(); };

  // (a) delete one body literal
  for (std::size_t i = 0; i < c.body.size(); ++i) {
    Clause child = c;
    child.body.erase(child.body.begin() + static_cast<std::ptrdiff_t>(i));
    push(std::move(child));
  }
  // (b) add one bottom literal
  for (const auto& l : bottom.body) {
    if (has(l)) continue;
    Clause child = c;
    child.body.push_back(l);
    push(std::move(child));
  }
  // (c) unify two variables of the same type; the later one is renamed
  auto types = d.variable_types(c);
  auto order = variables_in_order(c);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      auto ti = types.find(order[i]);
      auto tj = types.find(order[j]);
      if (ti == types.end() || tj == types.end() || ti->second != tj->second) continue;
      push(apply_substitution(c, Substitution{{order[j], Term::var(order[i])}}));
    }
  }
  // (d) add one preferred constraint over variables of c
  auto vars = variables(c);
  for (const auto& p : preferred) {
    if (has(p)) continue;
    auto pv = variables(p);
    if (!std::includes(vars.begin(), vars.end(), pv.begin(), pv.end())) continue;
    Clause child = c;
    child.body.push_back(p);
    push(std::move(child));
  }
  return out;
}

namespace {

bool safe_covers(const Clause& c, const GroundExample& x, const SearchConfig& cfg, const BuiltinRegistry& reg) {
  CoverOptions o;
  o.node_budget = cfg.node_budget;
  o.builtins = &reg;
  try {
    return covers(c, x, o).covered;
  } catch (const ResourceError&) {
    return false;
  }
}

// Length is the mean clause length, so a clause's literals weigh the same
// against its (averaged) distance whatever the number of clauses.
double nll_of(std::size_t pos_cov, std::size_t npos, std::size_t neg_cov, std::size_t nneg, const Theory& t,
              const SearchConfig& cfg) {
  double miss = npos ? static_cast<double>(npos - pos_cov) / static_cast<double>(npos) : 0.0;
  double fp = nneg ? static_cast<double>(neg_cov) / static_cast<double>(nneg) : 0.0;
  double len = t.clauses.empty() ? 0.0 : static_cast<double>(t.body_size()) / static_cast<double>(t.clauses.size());
  return cfg.kappa_miss * (miss + fp) + cfg.kappa_len * len;
}

}  // namespace

double neg_log_likelihood(const Theory& t, const std::vector<GroundExample>& pos,
                          const std::vector<GroundExample>& neg, const SearchConfig& cfg,
                          const BuiltinRegistry& reg) {
  auto count = [&](const std::vector<GroundExample>& xs) {
    std::size_t k = 0;
    for (const auto& x : xs) {
      bool any = false;
      for (const auto& c : t.clauses) any = any || safe_covers(c, x, cfg, reg);
      k += any;
    }
    return k;
  };
  return nll_of(count(pos), pos.size(), count(neg), neg.size(), t, cfg);
}

Scorer::Scorer(std::vector<GroundExample> pos, std::vector<GroundExample> neg, const Domain& d, SearchConfig cfg,
               bool use_distance, const BuiltinRegistry& reg)
    : pos_(std::move(pos)), neg_(std::move(neg)), domain_(d), cfg_(cfg), use_distance_(use_distance), reg_(reg) {
  if (pos_.empty()) throw std::invalid_argument("scoring needs at least one positive example");
  if (use_distance_)
    for (const auto& x : pos_) targets_.push_back(std::make_unique<DistanceTarget>(x, d, reg));
}

Scorer::ClauseStats& Scorer::stats(const Clause& c) {
  auto key = render(normalize_variables(c));
  auto it = clause_memo_.find(key);
  if (it != clause_memo_.end()) return it->second;
  ClauseStats s;
  s.clause = c;
  for (const auto& x : pos_) s.pos.push_back(safe_covers(c, x, cfg_, reg_));
  for (const auto& x : neg_) s.neg.push_back(safe_covers(c, x, cfg_, reg_));
  s.dist.assign(targets_.size(), std::nullopt);
  return clause_memo_.emplace(std::move(key), std::move(s)).first->second;
}

double Scorer::distance(ClauseStats& s, std::size_t i) {
  if (!s.dist[i]) s.dist[i] = conceptual_distance(Theory{{s.clause}}, *targets_[i]).ncd;
  return *s.dist[i];
}

ScoreParts Scorer::score(const Theory& t) {
  auto key = render(t);
  auto it = theory_memo_.find(key);
  if (it != theory_memo_.end()) return it->second;
  ++evaluations_;
  std::vector<bool> pos(pos_.size(), false), neg(neg_.size(), false);
  std::vector<double> dist(targets_.size(), std::numeric_limits<double>::infinity());
  // One clause per positive: clause k answers for positive k. Otherwise each
  // positive takes its closest clause.
  const bool paired = t.clauses.size() == targets_.size();
  for (std::size_t k = 0; k < t.clauses.size(); ++k) {
    auto& s = stats(t.clauses[k]);
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = pos[i] || s.pos[i];
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = neg[i] || s.neg[i];
    if (paired) dist[k] = distance(s, k);
    else
      for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = std::min(dist[i], distance(s, i));
  }
  ScoreParts p;
  p.pos_covered = static_cast<std::size_t>(std::count(pos.begin(), pos.end(), true));
  p.neg_covered = static_cast<std::size_t>(std::count(neg.begin(), neg.end(), true));
  p.nll = nll_of(p.pos_covered, pos.size(), p.neg_covered, neg.size(), t, cfg_);
  if (use_distance_) {
    double sum = 0;
    for (double d : dist) sum += std::isfinite(d) ? d : kDistanceSentinel;
    p.distance = sum / static_cast<double>(dist.size());
  }
  p.total = p.nll + p.distance;
  theory_memo_.emplace(std::move(key), p);
  return p;
}

namespace {

struct Candidate {
  Theory theory;
  ScoreParts score;
  std::size_t length;
  std::string render;

  bool operator<(const Candidate& o) const {
    return std::tie(score.total, length, render) < std::tie(o.score.total, o.length, o.render);
  }
};

}  // namespace

SearchResult search_step(const Theory& prev, const std::vector<Clause>& bottoms,
                         const std::vector<std::vector<Literal>>& preferred, const Domain& d, const SearchConfig& cfg,
                         Scorer& scorer, const BuiltinRegistry& reg) {
  cfg.validate();
  if (bottoms.size() != prev.clauses.size()) throw std::invalid_argument("one bottom clause per theory clause");
  static const std::vector<Literal> kNone;

  SearchResult result;
  Candidate start{prev, scorer.score(prev), prev.body_size(), render(prev)};
  Candidate best = start;
  std::vector<Candidate> beam{start};
  std::set<std::string> visited{start.render};
  const std::size_t before = scorer.evaluations();

  for (std::size_t level = 0; level < cfg.levels && !beam.empty() && !result.budget_exhausted; ++level) {
    std::vector<Candidate> next;
    for (const auto& cand : beam) {
      for (std::size_t k = 0; k < cand.theory.clauses.size() && !result.budget_exhausted; ++k) {
        const auto& pref = k < preferred.size() ? preferred[k] : kNone;
        for (auto& child : refinements(cand.theory.clauses[k], bottoms[k], pref, d, cfg.bounds, reg)) {
          Theory t = cand.theory;
          t.clauses[k] = std::move(child);
          auto r = render(t);
          if (!visited.insert(r).second) continue;
          if (scorer.evaluations() - before >= cfg.eval_budget) {
            result.budget_exhausted = true;
            break;
          }
          next.push_back(Candidate{t, scorer.score(t), t.body_size(), std::move(r)});
        }
      }
    }
    std::sort(next.begin(), next.end());
    if (next.size() > cfg.beam_width) next.resize(cfg.beam_width);
    if (!next.empty() && next.front() < best) best = next.front();
    beam = std::move(next);
  }

  result.evaluated = scorer.evaluations() - before;
  result.improved = best.score.total < start.score.total;
  result.theory = result.improved ? best.theory : prev;
  result.score = result.improved ? best.score : start.score;
  return result;
}

}  // namespace goci
