#include "goci/builtins.hpp"

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

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ParseError(1, 1, "invalid integer '" + std::string(s) + "'");
  return v;
}

void add_term(AffineExpr& e, std::string_view term, std::int64_t sign) {
  term = trim(term);
  if (term.empty()) throw ParseError(1, 1, "empty term in expression");
  std::int64_t factor = sign;
  std::string name;
  auto star = term.find('*');
  if (star != std::string_view::npos) {
    auto a = trim(term.substr(0, star));
    auto b = trim(term.substr(star + 1));
    if (!a.empty() && (std::isdigit(static_cast<unsigned char>(a[0])))) {
      factor *= parse_int(a);
      name = std::string(b);
    } else {
      factor *= parse_int(b);
      name = std::string(a);
    }
  } else if (std::isdigit(static_cast<unsigned char>(term[0]))) {
    e.constant += sign * parse_int(term);
    return;
  } else {
    name = std::string(term);
  }
  for (char c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
      throw ParseError(1, 1, "invalid name '" + name + "' in expression");
  e.coef[name] += factor;
  if (e.coef[name] == 0) e.coef.erase(name);
}

AffineExpr minus(const AffineExpr& a, const AffineExpr& b) {
  AffineExpr out = a;
  out.constant -= b.constant;
  for (const auto& [n, c] : b.coef) {
    out.coef[n] -= c;
    if (out.coef[n] == 0) out.coef.erase(n);
  }
  return out;
}

const char* op_text(RelOp op) {
  switch (op) {
    case RelOp::Eq: return "=";
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
  }
  return "?";
}

}  // namespace

std::optional<std::int64_t> AffineExpr::eval(const std::map<std::string, std::int64_t>& env) const {
  std::int64_t v = constant;
  for (const auto& [n, c] : coef) {
    auto it = env.find(n);
    if (it == env.end()) return std::nullopt;
    v += c * it->second;
  }
  return v;
}

std::string AffineExpr::render() const {
  std::string out;
  for (const auto& [n, c] : coef) {
    if (!out.empty()) out += c < 0 ? " - " : " + ";
    else if (c < 0) out += "-";
    auto a = c < 0 ? -c : c;
    if (a != 1) out += std::to_string(a) + "*";
    out += n;
  }
  if (out.empty()) return std::to_string(constant);
  if (constant > 0) out += " + " + std::to_string(constant);
  if (constant < 0) out += " - " + std::to_string(-constant);
  return out;
}

AffineExpr parse_affine(std::string_view text) {
  AffineExpr e;
  text = trim(text);
  if (text.empty()) throw ParseError(1, 1, "empty expression");
  std::int64_t sign = 1;
  std::size_t start = 0;
  if (text[0] == '-' || text[0] == '+') {
    sign = text[0] == '-' ? -1 : 1;
    start = 1;
  }
  for (std::size_t i = start; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '+' || text[i] == '-') {
      add_term(e, text.substr(start, i - start), sign);
      if (i < text.size()) sign = text[i] == '-' ? -1 : 1;
      start = i + 1;
    }
  }
  return e;
}

std::optional<bool> Relation::holds(const std::map<std::string, std::int64_t>& env) const {
  auto l = lhs.eval(env);
  auto r = rhs.eval(env);
  if (!l || !r) return std::nullopt;
  switch (op) {
    case RelOp::Eq: return *l == *r;
    case RelOp::Lt: return *l < *r;
    case RelOp::Le: return *l <= *r;
    case RelOp::Gt: return *l > *r;
    case RelOp::Ge: return *l >= *r;
  }
  return std::nullopt;
}

std::string Relation::render() const { return lhs.render() + " " + op_text(op) + " " + rhs.render(); }

Relation parse_relation(std::string_view text) {
  static const std::pair<const char*, RelOp> ops[] = {
      {">=", RelOp::Ge}, {"<=", RelOp::Le}, {"=", RelOp::Eq}, {">", RelOp::Gt}, {"<", RelOp::Lt}};
  for (const auto& [tok, op] : ops) {
    auto p = text.find(tok);
    if (p == std::string_view::npos) continue;
    Relation r;
    r.lhs = parse_affine(text.substr(0, p));
    r.op = op;
    r.rhs = parse_affine(text.substr(p + std::string_view(tok).size()));
    return r;
  }
  throw ParseError(1, 1, "expected relation operator in '" + std::string(text) + "'");
}

bool BuiltinDef::holds(const std::vector<std::int64_t>& values) const {
  std::map<std::string, std::int64_t> env;
  for (std::size_t i = 0; i < slots.size() && i < values.size(); ++i) env[slots[i]] = values[i];
  return relation.holds(env).value_or(false);
}

std::optional<std::int64_t> BuiltinDef::solve(std::size_t slot,
                                              const std::vector<std::optional<std::int64_t>>& values) const {
  // lhs - rhs = 0 is linear in the unknown: coefficient a, remainder b.
  if (relation.op != RelOp::Eq) return std::nullopt;
  auto diff = minus(relation.lhs, relation.rhs);
  std::map<std::string, std::int64_t> env;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i == slot) continue;
    if (!values[i]) return std::nullopt;
    env[slots[i]] = *values[i];
  }
  auto it = diff.coef.find(slots[slot]);
  if (it == diff.coef.end()) return std::nullopt;
  std::int64_t a = it->second;
  diff.coef.erase(it);
  auto b = diff.eval(env);
  if (!b || (*b % a) != 0) return std::nullopt;
  return -*b / a;
}

bool BuiltinDef::symmetric() const {
  if (slots.size() != 2 || derived[0] || derived[1]) return false;
  for (std::int64_t a = -2; a <= 2; ++a)
    for (std::int64_t b = -2; b <= 2; ++b)
      if (holds({a, b}) != holds({b, a})) return false;
  return true;
}

std::string BuiltinDef::definition() const {
  std::string out = name + "(";
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i) out += ", ";
    out += slots[i] + ":" + (derived[i] ? "#" : "") + slot_types[i];
  }
  return out + ") means " + relation.render();
}

BuiltinDef parse_builtin_def(std::string_view text) {
  text = trim(text);
  auto means = text.find(" means ");
  if (means == std::string_view::npos) throw ParseError(1, 1, "expected 'means' in constraint definition");
  auto sig = trim(text.substr(0, means));
  BuiltinDef def;
  auto open = sig.find('(');
  auto close = sig.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open)
    throw ParseError(1, 1, "malformed constraint signature");
  def.name = std::string(trim(sig.substr(0, open)));
  auto slots = sig.substr(open + 1, close - open - 1);
  while (!slots.empty()) {
    auto comma = slots.find(',');
    auto item = trim(slots.substr(0, comma));
    slots = comma == std::string_view::npos ? std::string_view{} : slots.substr(comma + 1);
    auto colon = item.find(':');
    std::string slot(trim(item.substr(0, colon)));
    std::string type = colon == std::string_view::npos ? "int" : std::string(trim(item.substr(colon + 1)));
    bool derived = !type.empty() && type[0] == '#';
    if (derived) type.erase(0, 1);
    def.slots.push_back(slot);
    def.slot_types.push_back(type);
    def.derived.push_back(derived);
  }
  def.relation_text = std::string(trim(text.substr(means + 7)));
  def.relation = parse_relation(def.relation_text);
  return def;
}

BuiltinRegistry::BuiltinRegistry() {
  add(parse_builtin_def("Equal(x:int, y:int) means x = y"));
  add(parse_builtin_def("Sub(x:int, y:int, n:#int) means y - x = n"));
  add(parse_builtin_def("Greater(x:int, y:int) means y > x"));
  add(parse_builtin_def("Geq(x:int, y:int) means y >= x"));
}

const BuiltinRegistry& BuiltinRegistry::standard() {
  static const BuiltinRegistry reg;
  return reg;
}

void BuiltinRegistry::add(BuiltinDef def) { defs_[def.name] = std::move(def); }

const BuiltinDef* BuiltinRegistry::find(const std::string& name) const {
  auto it = defs_.find(name);
  return it == defs_.end() ? nullptr : &it->second;
}

bool BuiltinRegistry::is_builtin(const Literal& l) const {
  const auto* d = find(l.predicate);
  return d && d->arity() == l.arity();
}

bool BuiltinRegistry::eval(const Literal& lit) const {
  const auto* d = find(lit.predicate);
  if (!d) throw BuiltinError("unregistered built-in " + lit.predicate);
  if (d->arity() != lit.arity())
    throw BuiltinError("built-in " + lit.predicate + " expects " + std::to_string(d->arity()) + " arguments");
  std::vector<std::int64_t> vals;
  for (const auto& a : lit.args) {
    if (!a.is_int()) throw BuiltinError("non-integer argument " + render(a) + " to " + lit.predicate);
    vals.push_back(a.value);
  }
  return d->holds(vals);
}

bool eval_builtin(const Literal& lit) { return BuiltinRegistry::standard().eval(lit); }

}  // namespace goci
