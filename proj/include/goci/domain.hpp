#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "goci/builtins.hpp"
#include "goci/logic.hpp"

namespace goci {

enum class ArgMode { Input, Output, Constant };

/// Mode declaration: `mode: SpRel(+obj, +obj, #dir)`.
struct ModeDecl {
  std::string predicate;
  std::vector<ArgMode> modes;
  std::vector<std::string> types;
  std::size_t recall = 0;  // 0 = unbounded

  std::string signature() const { return predicate + "/" + std::to_string(modes.size()); }
};

/// One argument of an action template: a rule variable, a constant, or an
/// affine integer expression over rule variables and the loop index.
struct ArgTemplate {
  enum class Kind { Constant, Variable, Expr } kind = Kind::Constant;
  Term constant;
  std::string variable;
  AffineExpr expr;
};

struct ActionTemplate {
  std::string name;
  std::vector<ArgTemplate> args;
  std::optional<std::string> loop_var;
  AffineExpr loop_lo;
  AffineExpr loop_hi;  // inclusive
};

/// `expand: Tower(B) where Height(B,H) -> place(B,0,k) for k in 0..H-1`
struct ExpansionRule {
  Literal trigger;
  std::vector<Literal> where;
  std::vector<ActionTemplate> steps;
  std::string source;
};

ExpansionRule parse_expansion_rule(std::string_view text);

struct SearchBounds {
  std::size_t depth = 3;     // i
  std::size_t arity = 3;     // j
  std::size_t max_body = 20;
};

/// Everything read from a `.dom` file.
struct Domain {
  std::set<Term> keep_constant;
  std::set<std::string> numeric_types;
  std::vector<std::set<std::string>> compatible_groups;
  std::map<std::string, ModeDecl> modes;  // by signature
  std::vector<ExpansionRule> rules;
  SearchBounds bounds;

  const ModeDecl* mode_for(const std::string& signature) const;
  const ExpansionRule* rule_for(const std::string& signature) const;
  std::string position_type(const std::string& signature, std::size_t pos) const;
  bool is_numeric_type(const std::string& type) const;
  bool types_compatible(const std::string& a, const std::string& b) const;
  /// Predicates whose last argument is a `time` position.
  bool is_temporal(const std::string& signature) const;

  /// Type of each variable in `c`, taken from its first typed position.
  std::map<std::string, std::string> variable_types(const Clause& c) const;
  /// Variables at numeric-typed positions or inside built-ins.
  std::set<std::string> numeric_variables(const Clause& c, const BuiltinRegistry& reg) const;

  VariablizeOptions variablize_options() const;
};

Domain parse_domain(std::string_view text);

}  // namespace goci
