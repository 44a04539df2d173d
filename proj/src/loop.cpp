#include "goci/loop.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "goci/coverage.hpp"
#include "goci/plan.hpp"

namespace goci {

void LoopConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("iteration bound L must be at least 1");
  if (advice_k < 1) throw std::invalid_argument("advice k must be at least 1");
  search.validate();
}

namespace {

std::vector<AdviceCandidate> collect_candidates(const Theory& t, const std::vector<GroundExample>& pos,
                                                const ConstraintLibrary& lib, const Domain& d,
                                                const std::vector<std::set<Literal>>& offered,
                                                const SearchConfig& cfg) {
  std::vector<AdviceCandidate> out;
  for (std::size_t k = 0; k < t.clauses.size(); ++k) {
    const auto& c = t.clauses[k];
    CoverOptions o;
    o.node_budget = cfg.node_budget;
    o.builtins = &lib.registry;
    CoverResult w;
    try {
      w = covers(c, pos[k], o);
    } catch (const ResourceError&) {
      continue;
    }
    if (!w.covered) continue;
    for (auto& lit : enumerate_constraints(c, *w.witness, lib, d)) {
      if (offered[k].count(lit)) continue;
      if (std::find(c.body.begin(), c.body.end(), lit) != c.body.end()) continue;
      AdviceCandidate cand;
      auto g = apply_substitution(lit, *w.witness);
      for (const auto& a : g.args) cand.witness.push_back(a.value);
      cand.literal = std::move(lit);
      cand.clause = k;
      out.push_back(std::move(cand));
    }
  }
  return out;
}

}  // namespace

InductionResult run_goci(const std::vector<GroundExample>& pos, const std::vector<GroundExample>& neg,
                         const Domain& d, const ConstraintLibrary& lib, const LoopConfig& config, Teacher* teacher) {
  // The domain file is the authority on search bounds.
  LoopConfig cfg = config;
  cfg.search.bounds = d.bounds;
  cfg.validate();
  if (pos.empty()) throw std::invalid_argument("induction needs at least one positive example");
  check_acyclic(d);
  for (const auto& x : pos)
    for (const auto& f : x.facts)
      if (!d.mode_for(f.signature())) throw DomainError("no mode declaration for " + f.signature());

  std::vector<Clause> bottoms;
  for (const auto& x : pos) bottoms.push_back(bottom_clause(x, d, cfg.search));
  Theory prev{bottoms};

  Scorer scorer(pos, neg, d, cfg.search, cfg.use_distance, lib.registry);
  InductionResult res;
  res.initial = scorer.score(prev);
  ScoreParts s_prev = res.initial;

  std::vector<std::vector<Literal>> preferred(bottoms.size());
  std::vector<std::set<Literal>> offered(bottoms.size());

  for (std::size_t l = 1; l <= cfg.max_iterations; ++l) {
    IterationTrace tr;
    tr.iteration = l;

    auto step = search_step(prev, bottoms, preferred, d, cfg.search, scorer, lib.registry);
    tr.budget_exhausted = step.budget_exhausted;
    Theory t_l = step.theory;

    Theory t_prime = t_l;
    std::vector<AdviceCandidate> chosen;
    const bool may_ask = cfg.use_advice && teacher && (!cfg.query_budget || res.log.size() < *cfg.query_budget);
    if (may_ask) {
      AdviceQuery q;
      q.id = res.log.size() + 1;
      q.iteration = l;
      q.theory = t_l;
      q.candidates = collect_candidates(t_l, pos, lib, d, offered, cfg.search);
      const auto before = res.log.size();
      auto pref = pose_query(std::move(q), cfg.advice_k, lib, *teacher, res.log, cfg.teacher_timeout);
      if (res.log.size() > before) {
        const auto& asked = res.log.back().query;
        tr.queries = 1;
        for (const auto& c : asked.candidates) {
          offered[c.clause].insert(c.literal);
          tr.offered.push_back(render(c.literal));
        }
        for (auto i : pref.chosen) {
          chosen.push_back(asked.candidates[i]);
          tr.chosen.push_back(render(asked.candidates[i].literal));
        }
      }
      if (!chosen.empty()) t_prime = apply_advice(t_l, chosen, cfg.search.bounds.max_body).theory;
    }

    ScoreParts s = scorer.score(t_prime);
    if (s.total < s_prev.total) {
      tr.accepted = true;
      tr.advice_kept = !chosen.empty();
      for (const auto& c : chosen) preferred[c.clause].push_back(c.literal);
      prev = t_prime;
    } else if (!chosen.empty() && step.improved && step.score.total < s_prev.total) {
      s = step.score;
      tr.accepted = true;
      prev = t_l;
    }
    tr.score = s;
    if (tr.accepted) s_prev = s;
    tr.theory = render(prev);
    res.trace.push_back(std::move(tr));
    if (cfg.on_iteration) cfg.on_iteration(res.trace.back());
    if (!res.trace.back().accepted) break;
  }
  res.theory = prev;
  res.final = s_prev;
  return res;
}

double evaluate_precision(const Theory& t, const std::vector<GroundExample>& pos,
                          const std::vector<GroundExample>& neg, const BuiltinRegistry& reg) {
  if (pos.empty() && neg.empty()) throw std::invalid_argument("precision needs at least one example");
  CoverOptions o;
  o.builtins = &reg;
  auto covered = [&](const GroundExample& x) {
    try {
      return covers(t, x, o).covered;
    } catch (const ResourceError&) {
      return false;
    }
  };
  std::size_t tp = 0, fp = 0;
  for (const auto& x : pos) tp += covered(x);
  for (const auto& x : neg) fp += covered(x);
  if (tp + fp == 0) return 1.0;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

}  // namespace goci
