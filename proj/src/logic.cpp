#include "goci/logic.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace goci {

namespace {

bool is_bare_constant(const std::string& s) {
  if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

void collect_vars(const Literal& l, std::vector<std::string>& out, std::set<std::string>& seen) {
  for (const auto& a : l.args)
    if (a.is_var() && seen.insert(a.name).second) out.push_back(a.name);
}

}  // namespace

bool Literal::is_ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

std::string Literal::signature() const { return predicate + "/" + std::to_string(args.size()); }

std::size_t Theory::body_size() const {
  std::size_t n = 0;
  for (const auto& c : clauses) n += c.body.size();
  return n;
}

bool GroundExample::has_time() const {
  return std::any_of(time_index.begin(), time_index.end(), [](const auto& t) { return t.has_value(); });
}

std::string render(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Int: return std::to_string(t.value);
    case Term::Kind::Var: return t.name;
    case Term::Kind::Str: break;
  }
  if (is_bare_constant(t.name)) return t.name;
  std::string out = "\"";
  for (char c : t.name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string render(const Literal& l) {
  std::string out = l.predicate;
  if (l.args.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < l.args.size(); ++i) {
    if (i) out += ',';
    out += render(l.args[i]);
  }
  return out + ')';
}

std::string render(const Clause& c) {
  std::string out = render(c.head);
  if (!c.body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      if (i) out += ", ";
      out += render(c.body[i]);
    }
  }
  return out + ".";
}

std::string render(const Theory& t) {
  std::string out;
  for (const auto& c : t.clauses) out += render(c) + "\n";
  return out;
}

std::string render(const GroundExample& x) {
  std::ostringstream os;
  os << "@concept " << render(x.head) << ".\n";
  if (!x.params.empty()) {
    os << "@params " << (x.head.args.empty() ? std::string("_") : render(x.head.args[0])) << ": ";
    bool first = true;
    for (const auto& [k, v] : x.params) {
      os << (first ? "" : ", ") << k << "=" << v;
      first = false;
    }
    os << "\n";
  }
  for (std::size_t i = 0; i < x.facts.size(); ++i) {
    const auto& f = x.facts[i];
    if (i < x.time_index.size() && x.time_index[i]) {
      Literal stripped = f;
      stripped.args.pop_back();
      os << "@time " << *x.time_index[i] << ": " << render(stripped) << ".\n";
    } else {
      os << render(f) << ".\n";
    }
  }
  return os.str();
}

Term apply_substitution(const Term& t, const Substitution& s) {
  if (!t.is_var()) return t;
  auto it = s.find(t.name);
  return it == s.end() ? t : it->second;
}

Literal apply_substitution(const Literal& l, const Substitution& s) {
  Literal out{l.predicate, {}};
  out.args.reserve(l.args.size());
  for (const auto& a : l.args) out.args.push_back(apply_substitution(a, s));
  return out;
}

Clause apply_substitution(const Clause& c, const Substitution& s) {
  Clause out{apply_substitution(c.head, s), {}};
  out.body.reserve(c.body.size());
  for (const auto& l : c.body) out.body.push_back(apply_substitution(l, s));
  return out;
}

std::set<std::string> variables(const Literal& l) {
  std::set<std::string> out;
  for (const auto& a : l.args)
    if (a.is_var()) out.insert(a.name);
  return out;
}

std::set<std::string> variables(const Clause& c) {
  auto out = variables(c.head);
  for (const auto& l : c.body) {
    auto v = variables(l);
    out.insert(v.begin(), v.end());
  }
  return out;
}

std::vector<std::string> variables_in_order(const Clause& c) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_vars(c.head, out, seen);
  for (const auto& l : c.body) collect_vars(l, out, seen);
  return out;
}

Variablization variablize(const GroundExample& x, const VariablizeOptions& opts) {
  // Strings are identified by name alone; integers additionally by the type
  // of the position they occur at.
  std::map<std::pair<std::string, Term>, std::string> assigned;
  Variablization out;
  std::size_t next = 0;

  auto lift = [&](const Term& t, const std::string& sig, std::size_t pos) -> Term {
    if (t.is_var()) return t;
    if (opts.keep_constant.count(t) || opts.constant_positions.count({sig, pos})) return t;
    std::string type;
    if (t.is_int()) {
      auto it = opts.position_types.find({sig, pos});
      if (it != opts.position_types.end()) type = it->second;
    }
    auto key = std::make_pair(type, t);
    auto it = assigned.find(key);
    if (it != assigned.end()) return Term::var(it->second);
    std::string name = "V" + std::to_string(next++);
    assigned.emplace(key, name);
    out.inverse.emplace(name, t);
    return Term::var(name);
  };
  auto lift_lit = [&](const Literal& l) {
    Literal r{l.predicate, {}};
    const auto sig = l.signature();
    for (std::size_t i = 0; i < l.args.size(); ++i) r.args.push_back(lift(l.args[i], sig, i));
    return r;
  };

  out.clause.head = lift_lit(x.head);
  for (const auto& f : x.facts) out.clause.body.push_back(lift_lit(f));
  return out;
}

void canonicalize(Clause& c) {
  std::sort(c.body.begin(), c.body.end(), [](const Literal& a, const Literal& b) {
    if (a.predicate != b.predicate) return a.predicate < b.predicate;
    return a.args < b.args;
  });
  c.body.erase(std::unique(c.body.begin(), c.body.end()), c.body.end());
}

Clause normalize_variables(const Clause& c) {
  Substitution ren;
  std::size_t i = 0;
  for (const auto& v : variables_in_order(c)) ren.emplace(v, Term::var("V" + std::to_string(i++)));
  return apply_substitution(c, ren);
}

}  // namespace goci
