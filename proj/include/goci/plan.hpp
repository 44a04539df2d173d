#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "goci/builtins.hpp"
#include "goci/domain.hpp"
#include "goci/logic.hpp"

namespace goci {

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Decomposability {
  bool ok = true;
  std::vector<std::string> diagnosis;  // offending signatures, e.g. "Arch/1"
};

Decomposability check_decomposable(const Theory& t, const Domain& d,
                                   const BuiltinRegistry& reg = BuiltinRegistry::standard());

/// Throws PlanError when composites expand through each other in a cycle.
void check_acyclic(const Domain& d);

/// Stands in for a numeric value the theory leaves unconstrained.
inline const Term kUnknown = Term::str("?");

struct Grounding {
  std::vector<Literal> facts;  // sorted, unique
  std::size_t clause_index = 0;
  Substitution binding;
  bool complete = true;  // false if some variable was replaced by kUnknown
  bool skeleton_matched = true;
};

/// Grounds one clause against the example's head and parameters. Numeric
/// variables come from parameter attributes of the head and from propagating
/// built-ins; object variables from matching the clause skeleton against the
/// facts. With `lenient`, numeric variables still unbound become kUnknown
/// instead of an error. Unsatisfiable built-ins always throw.
Grounding ground_clause(const Clause& c, const GroundExample& x, const Domain& d, bool lenient = false,
                        const BuiltinRegistry& reg = BuiltinRegistry::standard());

/// Best-matching clause of `t`: the first that grounds completely with a
/// skeleton match, else the first that grounds at all.
Grounding ground_theory(const Theory& t, const GroundExample& x, const Domain& d, bool lenient = false,
                        const BuiltinRegistry& reg = BuiltinRegistry::standard());

/// Canonical plan: one primitive action per line, LF terminated. Actions of
/// temporal predicates are ordered by their trailing time index after all
/// untimed actions, which are sorted lexicographically.
std::string derive_plan(const std::vector<Literal>& facts, const Domain& d,
                        const BuiltinRegistry& reg = BuiltinRegistry::standard());

/// Plan of the example itself.
std::string derive_plan(const GroundExample& x, const Domain& d,
                        const BuiltinRegistry& reg = BuiltinRegistry::standard());

}  // namespace goci
