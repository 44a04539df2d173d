#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "goci/builtins.hpp"
#include "goci/logic.hpp"

namespace goci {

struct CoverOptions {
  std::size_t node_budget = 1'000'000;
  const BuiltinRegistry* builtins = &BuiltinRegistry::standard();
};

struct CoverResult {
  bool covered = false;
  std::optional<Substitution> witness;
  std::size_t clause_index = 0;
  std::size_t nodes = 0;
};

/// Facts grouped by predicate signature.
class FactIndex {
 public:
  FactIndex() = default;
  explicit FactIndex(const std::vector<Literal>& facts);

  const std::vector<Literal>& with_signature(const std::string& sig) const;
  /// Constants occurring anywhere in the facts (plus `extra`).
  const std::set<Term>& domain() const { return domain_; }
  void add_domain(const Term& t) { domain_.insert(t); }

 private:
  std::map<std::string, std::vector<Literal>> by_sig_;
  std::set<Term> domain_;
};

struct MatchOptions {
  /// Variables treated as wildcards: they match anything and stay unbound.
  std::set<std::string> wildcard;
  /// Enumerate variables left unbound after matching over the active domain.
  bool close_over_domain = true;
  /// Distinct variables must take distinct symbolic constants (numbers may repeat).
  bool injective = false;
  std::size_t node_budget = 1'000'000;
  const BuiltinRegistry* builtins = &BuiltinRegistry::standard();
};

/// Depth-first search with forward checking for a substitution extending
/// `initial` that maps every non-built-in literal of `body` into the facts
/// and makes every built-in true. Throws ResourceError past the budget.
std::optional<Substitution> find_substitution(const std::vector<Literal>& body, const FactIndex& facts,
                                              const Substitution& initial, const MatchOptions& opts,
                                              std::size_t* nodes_used = nullptr);

/// Binds the clause head against the example's concept head.
std::optional<Substitution> unify_head(const Literal& head, const Literal& ground_head);

CoverResult covers(const Clause& c, const GroundExample& x, const CoverOptions& opts = {});
CoverResult covers(const Theory& t, const GroundExample& x, const CoverOptions& opts = {});

}  // namespace goci
