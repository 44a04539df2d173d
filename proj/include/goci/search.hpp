#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "goci/builtins.hpp"
#include "goci/distance.hpp"
#include "goci/domain.hpp"
#include "goci/logic.hpp"

namespace goci {

/// A fact or literal the domain file does not account for.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SearchConfig {
  std::size_t beam_width = 8;
  std::size_t levels = 2;  // refinement levels explored per step
  SearchBounds bounds;
  std::size_t node_budget = 1'000'000;  // per coverage test
  std::size_t eval_budget = 20'000;     // candidates scored per step
  double kappa_miss = 10.0;
  double kappa_len = 0.01;

  void validate() const;
};

/// Depth of each variable reachable from the head through mode inputs.
std::map<std::string, std::size_t> variable_depths(const Clause& c, const Domain& d,
                                                   const BuiltinRegistry& reg = BuiltinRegistry::standard());

/// Variablized example restricted to literals whose variables lie within the
/// depth bound, in canonical order.
Clause bottom_clause(const GroundExample& x, const Domain& d, const SearchConfig& cfg);

/// True if `c` respects the depth, arity and body-length bounds.
bool within_bounds(const Clause& c, const Domain& d, const SearchBounds& b,
                   const BuiltinRegistry& reg = BuiltinRegistry::standard());

/// Children of `c` from deleting a literal, adding a bottom literal, merging
/// two same-typed variables, or adding a preferred constraint. Canonical,
/// deduplicated, within bounds.
std::vector<Clause> refinements(const Clause& c, const Clause& bottom, const std::vector<Literal>& preferred,
                                const Domain& d, const SearchBounds& b,
                                const BuiltinRegistry& reg = BuiltinRegistry::standard());

/// kappa_miss * (missed-positive fraction + covered-negative fraction)
/// + kappa_len * mean body length over the clauses.
double neg_log_likelihood(const Theory& t, const std::vector<GroundExample>& pos,
                          const std::vector<GroundExample>& neg, const SearchConfig& cfg,
                          const BuiltinRegistry& reg = BuiltinRegistry::standard());

struct ScoreParts {
  double nll = 0.0;
  double distance = 0.0;
  double total = 0.0;
  std::size_t pos_covered = 0;
  std::size_t neg_covered = 0;
};

/// Memoized objective: -LL plus (optionally) mean conceptual distance to the
/// positives. With one clause per positive, clause k is measured against
/// positive k; otherwise each positive takes its closest clause.
class Scorer {
 public:
  Scorer(std::vector<GroundExample> pos, std::vector<GroundExample> neg, const Domain& d, SearchConfig cfg,
         bool use_distance, const BuiltinRegistry& reg = BuiltinRegistry::standard());

  ScoreParts score(const Theory& t);
  bool use_distance() const { return use_distance_; }
  const std::vector<GroundExample>& positives() const { return pos_; }
  const std::vector<GroundExample>& negatives() const { return neg_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  struct ClauseStats {
    Clause clause;
    std::vector<bool> pos, neg;
    std::vector<std::optional<double>> dist;  // filled on demand
  };
  ClauseStats& stats(const Clause& c);
  double distance(ClauseStats& s, std::size_t target);

  std::vector<GroundExample> pos_, neg_;
  const Domain& domain_;
  SearchConfig cfg_;
  bool use_distance_;
  const BuiltinRegistry& reg_;
  std::vector<std::unique_ptr<DistanceTarget>> targets_;
  std::map<std::string, ClauseStats> clause_memo_;
  std::map<std::string, ScoreParts> theory_memo_;
  std::size_t evaluations_ = 0;
};

struct SearchResult {
  Theory theory;
  ScoreParts score;
  bool improved = false;
  bool budget_exhausted = false;
  std::size_t evaluated = 0;
};

/// One beam search step from `prev`; clause k of the theory refines against
/// bottoms[k] and preferred[k]. Returns `prev` unless some candidate scores
/// strictly lower. Ties go to fewer literals, then the smaller render.
SearchResult search_step(const Theory& prev, const std::vector<Clause>& bottoms,
                         const std::vector<std::vector<Literal>>& preferred, const Domain& d, const SearchConfig& cfg,
                         Scorer& scorer, const BuiltinRegistry& reg = BuiltinRegistry::standard());

}  // namespace goci
