#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace goci {

/// A function-free first-order term: a logical variable or a constant.
struct Term {
  enum class Kind : std::uint8_t { Int, Str, Var };

  Kind kind = Kind::Str;
  std::string name;       // Str and Var
  std::int64_t value = 0; // Int

  static Term var(std::string n) { return {Kind::Var, std::move(n), 0}; }
  static Term str(std::string s) { return {Kind::Str, std::move(s), 0}; }
  static Term num(std::int64_t v) { return {Kind::Int, {}, v}; }

  bool is_var() const { return kind == Kind::Var; }
  bool is_int() const { return kind == Kind::Int; }
  bool is_str() const { return kind == Kind::Str; }
  bool is_ground() const { return kind != Kind::Var; }

  // Ints sort before strings, strings before variables.
  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;
};

struct Literal {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const { return args.size(); }
  bool is_ground() const;
  /// "Name/arity", used as the key for modes and indexes.
  std::string signature() const;

  auto operator<=>(const Literal&) const = default;
  bool operator==(const Literal&) const = default;
};

struct Clause {
  Literal head;
  std::vector<Literal> body;

  bool operator==(const Clause&) const = default;
};

/// Disjunction of clauses that share one head predicate.
struct Theory {
  std::vector<Clause> clauses;

  bool operator==(const Theory&) const = default;
  std::size_t body_size() const;
};

using Substitution = std::map<std::string, Term>;

/// The single input instance: concept head, parameters and ground facts.
/// Facts demonstrated at a time step carry the step as their trailing
/// argument and record it in `time_index`.
struct GroundExample {
  Literal head;
  std::map<std::string, std::int64_t> params;
  std::vector<Literal> facts;
  std::vector<std::optional<std::int64_t>> time_index; // parallel to facts

  bool has_time() const;
};

std::string render(const Term& t);
std::string render(const Literal& l);
std::string render(const Clause& c);
std::string render(const Theory& t);
std::string render(const GroundExample& x);

Term apply_substitution(const Term& t, const Substitution& s);
Literal apply_substitution(const Literal& l, const Substitution& s);
Clause apply_substitution(const Clause& c, const Substitution& s);

std::set<std::string> variables(const Literal& l);
std::set<std::string> variables(const Clause& c);
/// Variables in order of first occurrence (head first, then body).
std::vector<std::string> variables_in_order(const Clause& c);

/// Result of anti-substitution: the variablized clause and the inverse map
/// (variable -> original constant) that grounds it back.
struct Variablization {
  Clause clause;
  Substitution inverse;
};

struct VariablizeOptions {
  std::set<Term> keep_constant;
  /// Positions whose constants stay constant (mode '#').
  std::set<std::pair<std::string, std::size_t>> constant_positions;
  /// Type of each (signature, position); constants at differently typed
  /// positions get distinct variables.
  std::map<std::pair<std::string, std::size_t>, std::string> position_types;
};

/// Term-level anti-substitution: identical ground terms (of the same type)
/// share one variable. Variables are named V0, V1, ... by first occurrence,
/// head first.
Variablization variablize(const GroundExample& x, const VariablizeOptions& opts = {});

/// Sort body literals into canonical order (predicate, then args).
void canonicalize(Clause& c);

/// Rename variables to V0, V1, ... by first occurrence. Two clauses are
/// alpha-equivalent iff their normalized renders are equal.
Clause normalize_variables(const Clause& c);

/// Raised by operations that exceed a configured search budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace goci
