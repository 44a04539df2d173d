#include "goci/parse.hpp"

#include <cctype>
#include <charconv>
#include <map>

namespace goci {

namespace {

// Character cursor that tracks line/column for diagnostics.
class Cursor {
 public:
  Cursor(std::string_view text, std::size_t line = 1, std::size_t col = 1) : text_(text), line_(line), col_(col) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return col_; }

  char get() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (!done()) {
      char c = peek();
      if (c == '#') {
        while (!done() && peek() != '\n') get();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        get();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, col_, what); }

  void expect(char c) {
    skip_space();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    get();
  }

  bool accept(char c) {
    skip_space();
    if (peek() != c) return false;
    get();
    return true;
  }

  std::string identifier() {
    skip_space();
    std::string out;
    while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) out += get();
    if (out.empty()) fail("expected identifier");
    return out;
  }

  Term term() {
    skip_space();
    char c = peek();
    if (c == '"' || c == '\'') {
      char quote = get();
      std::string s;
      while (!done() && peek() != quote) {
        if (peek() == '\\') get();
        if (done()) break;
        s += get();
      }
      if (done()) fail("unterminated string");
      get();
      return Term::str(s);
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      if (c == '-') digits += get();
      while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) digits += get();
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec != std::errc{} || p != digits.data() + digits.size()) fail("invalid integer '" + digits + "'");
      return Term::num(v);
    }
    if (c == '_' || std::isupper(static_cast<unsigned char>(c))) return Term::var(identifier());
    if (std::islower(static_cast<unsigned char>(c))) return Term::str(identifier());
    fail("expected term");
  }

  Literal literal() {
    Literal l;
    l.predicate = identifier();
    if (accept('(')) {
      do {
        l.args.push_back(term());
      } while (accept(','));
      expect(')');
    }
    return l;
  }

  bool at_neck() {
    skip_space();
    if (text_.substr(pos_, 2) == ":-") {
      get();
      get();
      return true;
    }
    return false;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t col_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Strips a trailing '#' comment that is not inside quotes.
std::string_view strip_comment(std::string_view s) {
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return s.substr(0, i);
    }
  }
  return s;
}

Literal literal_line(std::string_view body, std::size_t line, std::size_t col, bool require_dot) {
  Cursor cur(body, line, col);
  Literal l = cur.literal();
  bool dot = cur.accept('.');
  if (require_dot && !dot) cur.fail("expected '.'");
  cur.skip_space();
  if (!cur.done()) cur.fail("unexpected trailing input");
  return l;
}

}  // namespace

GroundExample parse_example(std::string_view text) {
  GroundExample x;
  bool have_concept = false;
  std::map<std::string, std::size_t> arity;
  std::size_t line_no = 0;

  auto check_arity = [&](const Literal& l, std::size_t line) {
    auto [it, fresh] = arity.emplace(l.predicate, l.arity());
    if (!fresh && it->second != l.arity())
      throw ParseError(line, 1, "predicate " + l.predicate + " used with arity " + std::to_string(l.arity()) +
                                    " and " + std::to_string(it->second));
  };

  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const std::size_t col = static_cast<std::size_t>(line.data() - raw.data()) + 1;

    if (line.substr(0, 8) == "@concept") {
      if (have_concept) throw ParseError(line_no, col, "duplicate @concept header");
      x.head = literal_line(line.substr(8), line_no, col + 8, false);
      if (!x.head.is_ground()) throw ParseError(line_no, col, "variable in concept head");
      have_concept = true;
    } else if (line.substr(0, 7) == "@params") {
      auto rest = line.substr(7);
      auto colon = rest.find(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, col, "expected ':' in @params");
      rest = trim(rest.substr(colon + 1));
      if (!rest.empty() && rest.back() == '.') rest.remove_suffix(1);
      while (!rest.empty()) {
        auto comma = rest.find(',');
        auto item = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, col, "expected name=int in @params");
        auto name = std::string(trim(item.substr(0, eq)));
        auto val = trim(item.substr(eq + 1));
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
        if (name.empty() || ec != std::errc{} || p != val.data() + val.size())
          throw ParseError(line_no, col, "invalid parameter '" + std::string(item) + "'");
        x.params[name] = v;
      }
    } else if (line.substr(0, 5) == "@time") {
      auto rest = line.substr(5);
      auto colon = rest.find(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, col, "expected ':' after @time index");
      auto idx = trim(rest.substr(0, colon));
      std::int64_t k = 0;
      auto [p, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), k);
      if (ec != std::errc{} || p != idx.data() + idx.size()) throw ParseError(line_no, col, "invalid time index");
      Literal l = literal_line(rest.substr(colon + 1), line_no, col + 6 + colon, true);
      if (!l.is_ground()) throw ParseError(line_no, col, "variable in fact at line " + std::to_string(line_no));
      l.args.push_back(Term::num(k));
      check_arity(l, line_no);
      x.facts.push_back(std::move(l));
      x.time_index.emplace_back(k);
    } else if (line.front() == '@') {
      throw ParseError(line_no, col, "unknown directive");
    } else {
      Literal l = literal_line(line, line_no, col, true);
      if (!l.is_ground()) throw ParseError(line_no, col, "variable in fact at line " + std::to_string(line_no));
      check_arity(l, line_no);
      x.facts.push_back(std::move(l));
      x.time_index.emplace_back(std::nullopt);
    }
  }
  if (!have_concept) throw ParseError(line_no, 1, "missing @concept header");
  if (!x.has_time()) x.time_index.clear();
  return x;
}

Term parse_term(std::string_view text) {
  Cursor cur(text);
  Term t = cur.term();
  cur.skip_space();
  if (!cur.done()) cur.fail("unexpected trailing input");
  return t;
}

Literal parse_literal(std::string_view text) { return literal_line(text, 1, 1, false); }

Theory parse_theory(std::string_view text) {
  Cursor cur(text);
  Theory t;
  cur.skip_space();
  while (!cur.done()) {
    Clause c;
    c.head = cur.literal();
    if (cur.at_neck()) {
      do {
        c.body.push_back(cur.literal());
      } while (cur.accept(','));
    }
    cur.expect('.');
    t.clauses.push_back(std::move(c));
    cur.skip_space();
  }
  return t;
}

Clause parse_clause(std::string_view text) {
  Theory t = parse_theory(text);
  if (t.clauses.size() != 1) throw ParseError(1, 1, "expected exactly one clause");
  return t.clauses.front();
}

}  // namespace goci
