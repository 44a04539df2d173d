#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "goci/advice.hpp"
#include "goci/domain.hpp"
#include "goci/logic.hpp"
#include "goci/search.hpp"

namespace goci {

struct IterationTrace;

struct LoopConfig {
  std::size_t max_iterations = 10;  // L
  SearchConfig search;
  std::size_t advice_k = 5;
  bool use_distance = true;
  bool use_advice = true;
  std::optional<std::size_t> query_budget;
  std::chrono::milliseconds teacher_timeout{60000};
  std::uint64_t seed = 0;
  std::function<void(const IterationTrace&)> on_iteration;  // not persisted

  void validate() const;
};

struct IterationTrace {
  std::size_t iteration = 0;
  std::string theory;  // rendered T_l after this iteration
  ScoreParts score;    // of the theory that was scored (T' when advice applied)
  std::size_t queries = 0;
  std::vector<std::string> offered;
  std::vector<std::string> chosen;
  bool accepted = false;
  bool advice_kept = false;
  bool budget_exhausted = false;
};

struct InductionResult {
  Theory theory;
  ScoreParts initial;  // S_0, the bottom clause
  ScoreParts final;
  std::vector<IterationTrace> trace;
  AdviceLog log;
  std::size_t queries() const { return log.size(); }
};

/// The induction loop over one or more positives: bootstrap from the bottom
/// clause(s), then per iteration search, ask, apply, score and accept only
/// strict improvements. Advice that does not lead to acceptance is dropped;
/// the search step alone is accepted if it improves. Stops at a fixpoint or
/// after max_iterations. With several positives each gets its own clause.
/// Search bounds are taken from the domain, not from cfg.
InductionResult run_goci(const std::vector<GroundExample>& pos, const std::vector<GroundExample>& neg,
                         const Domain& d, const ConstraintLibrary& lib, const LoopConfig& cfg, Teacher* teacher);

inline InductionResult run_goci(const GroundExample& x, const Domain& d, const ConstraintLibrary& lib,
                                const LoopConfig& cfg, Teacher* teacher) {
  return run_goci(std::vector<GroundExample>{x}, {}, d, lib, cfg, teacher);
}

/// covered-pos / (covered-pos + covered-neg); 1 when nothing is covered.
double evaluate_precision(const Theory& t, const std::vector<GroundExample>& pos,
                          const std::vector<GroundExample>& neg,
                          const BuiltinRegistry& reg = BuiltinRegistry::standard());

}  // namespace goci
