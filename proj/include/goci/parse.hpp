#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "goci/logic.hpp"

namespace goci {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Parses a fact file (`@concept`, `@params`, `@time k:` prefixes, one
/// ground literal per line, `#` comments).
GroundExample parse_example(std::string_view text);

Term parse_term(std::string_view text);
Literal parse_literal(std::string_view text);
Clause parse_clause(std::string_view text);
/// One or more clauses, each terminated by '.'; may span lines.
Theory parse_theory(std::string_view text);

}  // namespace goci
