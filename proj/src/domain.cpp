#include "goci/domain.hpp"

#include <cctype>
#include <charconv>

#include "goci/parse.hpp"

namespace goci {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Splits on `sep` outside parentheses and quotes.
std::vector<std::string_view> split_top(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  int depth = 0;
  char quote = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      --depth;
    } else if (c == sep && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  auto last = trim(s.substr(start));
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

ArgTemplate parse_arg(std::string_view a, const std::set<std::string>& vars) {
  ArgTemplate t;
  a = trim(a);
  if (a.empty()) throw ParseError(1, 1, "empty action argument");
  if (a[0] == '"' || a[0] == '\'') {
    t.kind = ArgTemplate::Kind::Constant;
    t.constant = parse_term(a);
    return t;
  }
  if (is_identifier(a)) {
    std::string name(a);
    if (vars.count(name)) {
      t.kind = ArgTemplate::Kind::Variable;
      t.variable = name;
    } else {
      t.kind = ArgTemplate::Kind::Constant;
      t.constant = parse_term(a);
      if (t.constant.is_var()) throw ParseError(1, 1, "unbound rule variable '" + name + "'");
    }
    return t;
  }
  t.kind = ArgTemplate::Kind::Expr;
  t.expr = parse_affine(a);
  for (const auto& [n, c] : t.expr.coef)
    if (!vars.count(n)) throw ParseError(1, 1, "unknown name '" + n + "' in expression");
  if (t.expr.coef.empty()) {
    t.kind = ArgTemplate::Kind::Constant;
    t.constant = Term::num(t.expr.constant);
  }
  return t;
}

ModeDecl parse_mode(std::string_view text) {
  ModeDecl m;
  text = trim(text);
  auto open = text.find('(');
  auto close = text.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos)
    throw ParseError(1, 1, "malformed mode declaration");
  m.predicate = std::string(trim(text.substr(0, open)));
  for (auto a : split_top(text.substr(open + 1, close - open - 1), ',')) {
    if (a.empty()) throw ParseError(1, 1, "empty mode argument");
    ArgMode mode;
    switch (a[0]) {
      case '+': mode = ArgMode::Input; break;
      case '-': mode = ArgMode::Output; break;
      case '#': mode = ArgMode::Constant; break;
      default: throw ParseError(1, 1, "mode argument must start with +, - or #");
    }
    m.modes.push_back(mode);
    m.types.emplace_back(trim(a.substr(1)));
  }
  auto rest = trim(text.substr(close + 1));
  if (rest.substr(0, 7) == "recall=") {
    auto v = rest.substr(7);
    std::from_chars(v.data(), v.data() + v.size(), m.recall);
  }
  return m;
}

std::vector<std::string> name_list(std::string_view s) {
  std::vector<std::string> out;
  for (auto p : split_top(s, ','))
    if (!p.empty()) out.emplace_back(p);
  return out;
}

}  // namespace

ExpansionRule parse_expansion_rule(std::string_view text) {
  ExpansionRule r;
  r.source = std::string(trim(text));
  auto arrow = text.find("->");
  if (arrow == std::string_view::npos) throw ParseError(1, 1, "expected '->' in expansion rule");
  auto lhs = trim(text.substr(0, arrow));
  auto rhs = trim(text.substr(arrow + 2));

  auto where = lhs.find(" where ");
  r.trigger = parse_literal(trim(lhs.substr(0, where)));
  if (where != std::string_view::npos)
    for (auto w : split_top(lhs.substr(where + 7), ',')) r.where.push_back(parse_literal(w));

  std::set<std::string> vars;
  for (const auto& v : variables(r.trigger)) vars.insert(v);
  for (const auto& l : r.where)
    for (const auto& v : variables(l)) vars.insert(v);

  for (auto step : split_top(rhs, ';')) {
    if (step.empty()) continue;
    ActionTemplate a;
    auto loop = step.find(" for ");
    auto call = trim(step.substr(0, loop));
    std::set<std::string> scope = vars;
    if (loop != std::string_view::npos) {
      auto spec = trim(step.substr(loop + 5));
      auto in = spec.find(" in ");
      auto dots = spec.find("..");
      if (in == std::string_view::npos || dots == std::string_view::npos)
        throw ParseError(1, 1, "expected 'for k in lo..hi'");
      a.loop_var = std::string(trim(spec.substr(0, in)));
      a.loop_lo = parse_affine(spec.substr(in + 4, dots - in - 4));
      a.loop_hi = parse_affine(spec.substr(dots + 2));
      scope.insert(*a.loop_var);
    }
    auto open = call.find('(');
    if (open == std::string_view::npos) {
      a.name = std::string(call);
    } else {
      a.name = std::string(trim(call.substr(0, open)));
      auto close = call.rfind(')');
      if (close == std::string_view::npos) throw ParseError(1, 1, "expected ')' in action");
      for (auto arg : split_top(call.substr(open + 1, close - open - 1), ',')) a.args.push_back(parse_arg(arg, scope));
    }
    r.steps.push_back(std::move(a));
  }
  return r;
}

const ModeDecl* Domain::mode_for(const std::string& signature) const {
  auto it = modes.find(signature);
  return it == modes.end() ? nullptr : &it->second;
}

const ExpansionRule* Domain::rule_for(const std::string& signature) const {
  for (const auto& r : rules)
    if (r.trigger.signature() == signature) return &r;
  return nullptr;
}

std::string Domain::position_type(const std::string& signature, std::size_t pos) const {
  const auto* m = mode_for(signature);
  if (!m || pos >= m->types.size()) return {};
  return m->types[pos];
}

bool Domain::is_numeric_type(const std::string& type) const { return numeric_types.count(type) > 0; }

bool Domain::types_compatible(const std::string& a, const std::string& b) const {
  if (a == b) return true;
  for (const auto& g : compatible_groups)
    if (g.count(a) && g.count(b)) return true;
  return false;
}

bool Domain::is_temporal(const std::string& signature) const {
  const auto* m = mode_for(signature);
  return m && !m->types.empty() && m->types.back() == "time";
}

std::map<std::string, std::string> Domain::variable_types(const Clause& c) const {
  std::map<std::string, std::string> out;
  auto visit = [&](const Literal& l) {
    const auto sig = l.signature();
    for (std::size_t i = 0; i < l.args.size(); ++i) {
      if (!l.args[i].is_var()) continue;
      auto t = position_type(sig, i);
      if (!t.empty()) out.emplace(l.args[i].name, t);
    }
  };
  for (const auto& l : c.body) visit(l);
  visit(c.head);
  return out;
}

std::set<std::string> Domain::numeric_variables(const Clause& c, const BuiltinRegistry& reg) const {
  std::set<std::string> out;
  for (const auto& l : c.body) {
    const bool builtin = reg.is_builtin(l);
    const auto sig = l.signature();
    for (std::size_t i = 0; i < l.args.size(); ++i)
      if (l.args[i].is_var() && (builtin || is_numeric_type(position_type(sig, i)))) out.insert(l.args[i].name);
  }
  return out;
}

VariablizeOptions Domain::variablize_options() const {
  VariablizeOptions o;
  o.keep_constant = keep_constant;
  for (const auto& [sig, m] : modes) {
    for (std::size_t i = 0; i < m.modes.size(); ++i) {
      if (m.modes[i] == ArgMode::Constant) o.constant_positions.insert({sig, i});
      o.position_types[{sig, i}] = m.types[i];
    }
  }
  return o;
}

Domain parse_domain(std::string_view text) {
  Domain d;
  d.numeric_types = {"int"};
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line[0] == '#') continue;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(line_no, 1, "expected 'key: value'");
    auto key = trim(line.substr(0, colon));
    auto value = trim(line.substr(colon + 1));
    try {
      if (key == "keep-constant") {
        for (auto p : split_top(value, ','))
          if (!p.empty()) d.keep_constant.insert(parse_term(p));
      } else if (key == "numeric") {
        for (auto& n : name_list(value)) d.numeric_types.insert(n);
      } else if (key == "compatible") {
        auto names = name_list(value);
        d.compatible_groups.emplace_back(names.begin(), names.end());
      } else if (key == "mode") {
        auto m = parse_mode(value);
        auto sig = m.signature();
        if (!d.modes.emplace(sig, std::move(m)).second)
          throw ParseError(line_no, 1, "duplicate mode declaration for " + sig);
      } else if (key == "bounds") {
        for (auto p : split_top(value, ' ')) {
          auto eq = p.find('=');
          if (p.empty()) continue;
          if (eq == std::string_view::npos) throw ParseError(line_no, 1, "expected name=value in bounds");
          auto name = p.substr(0, eq);
          auto v = p.substr(eq + 1);
          std::size_t n = 0;
          auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
          if (ec != std::errc{} || n == 0) throw ParseError(line_no, 1, "bound must be a positive integer");
          if (name == "i") d.bounds.depth = n;
          else if (name == "j") d.bounds.arity = n;
          else if (name == "maxbody") d.bounds.max_body = n;
          else throw ParseError(line_no, 1, "unknown bound '" + std::string(name) + "'");
        }
      } else if (key == "expand") {
        d.rules.push_back(parse_expansion_rule(value));
      } else {
        throw ParseError(line_no, 1, "unknown domain section '" + std::string(key) + "'");
      }
    } catch (const ParseError& e) {
      if (e.line() == line_no) throw;
      throw ParseError(line_no, e.column(), std::string(e.what()).substr(0, std::string(e.what()).find(" at line")));
    }
  }
  return d;
}

}  // namespace goci
