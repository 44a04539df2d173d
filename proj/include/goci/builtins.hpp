#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "goci/logic.hpp"

namespace goci {

/// Integer affine expression `c0 + sum(ci * name_i)`.
struct AffineExpr {
  std::map<std::string, std::int64_t> coef;
  std::int64_t constant = 0;

  /// Returns nullopt when a referenced name is missing from `env`.
  std::optional<std::int64_t> eval(const std::map<std::string, std::int64_t>& env) const;
  std::string render() const;
};

/// Parses expressions such as `H-1`, `2*k + 1`, `W - k - 1`.
AffineExpr parse_affine(std::string_view text);

enum class RelOp { Eq, Lt, Le, Gt, Ge };

struct Relation {
  AffineExpr lhs;
  RelOp op = RelOp::Eq;
  AffineExpr rhs;

  std::optional<bool> holds(const std::map<std::string, std::int64_t>& env) const;
  std::string render() const;
};

Relation parse_relation(std::string_view text);

class BuiltinError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An arithmetic constraint predicate over integers, e.g.
/// `Sub(x:int, y:int, n:#int) means y - x = n`. Slots typed `#...` are
/// derived constants: they are solved for during candidate enumeration
/// rather than bound to clause variables.
struct BuiltinDef {
  std::string name;
  std::vector<std::string> slots;
  std::vector<std::string> slot_types;
  std::vector<bool> derived;
  Relation relation;
  std::string relation_text;  // as written, for glosses

  std::size_t arity() const { return slots.size(); }
  bool holds(const std::vector<std::int64_t>& values) const;
  /// Solves the relation for derived slot `slot` given the other values.
  std::optional<std::int64_t> solve(std::size_t slot, const std::vector<std::optional<std::int64_t>>& values) const;
  bool symmetric() const;
  std::string definition() const;
};

BuiltinDef parse_builtin_def(std::string_view text);

/// Registry of evaluable built-ins. Starts with Equal, Sub, Greater, Geq.
class BuiltinRegistry {
 public:
  BuiltinRegistry();

  static const BuiltinRegistry& standard();

  void add(BuiltinDef def);
  const BuiltinDef* find(const std::string& name) const;
  bool is_builtin(const std::string& name) const { return find(name) != nullptr; }
  bool is_builtin(const Literal& l) const;

  /// Evaluates a ground built-in literal.
  /// Throws BuiltinError on unregistered predicates or non-integer args.
  bool eval(const Literal& lit) const;

 private:
  std::map<std::string, BuiltinDef> defs_;
};

/// Convenience wrapper over the standard registry.
bool eval_builtin(const Literal& lit);

}  // namespace goci
