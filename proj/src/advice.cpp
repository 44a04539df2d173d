#include "goci/advice.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "goci/parse.hpp"

namespace goci {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

ConstraintLibrary ConstraintLibrary::standard() {
  return parse_constraint_library(
      "constraint: Sub(x:int, y:int, n:#int) means y - x = n\n"
      "constraint: Equal(x:int, y:int) means x = y\n"
      "constraint: Greater(x:int, y:int) means y > x\n"
      "constraint: Geq(x:int, y:int) means y >= x\n");
}

std::size_t ConstraintLibrary::max_arity() const {
  std::size_t q = 0;
  for (const auto& n : order) q = std::max(q, registry.find(n)->arity());
  return q;
}

std::size_t ConstraintLibrary::rank(const std::string& predicate) const {
  auto it = std::find(order.begin(), order.end(), predicate);
  return static_cast<std::size_t>(it - order.begin());
}

ConstraintLibrary parse_constraint_library(std::string_view text) {
  ConstraintLibrary lib;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line[0] == '#') continue;
    constexpr std::string_view kKey = "constraint:";
    if (line.substr(0, kKey.size()) != kKey) throw ParseError(line_no, 1, "expected 'constraint:'");
    BuiltinDef def;
    try {
      def = parse_builtin_def(line.substr(kKey.size()));
    } catch (const ParseError& e) {
      throw ParseError(line_no, 1, e.what());
    }
    if (std::find(lib.order.begin(), lib.order.end(), def.name) != lib.order.end())
      throw ParseError(line_no, 1, "duplicate constraint " + def.name);
    lib.order.push_back(def.name);
    lib.registry.add(std::move(def));
  }
  return lib;
}

std::vector<Literal> enumerate_constraints(const Clause& c, const Substitution& theta, const ConstraintLibrary& lib,
                                           const Domain& d) {
  auto types = d.variable_types(c);
  std::vector<std::string> vars;
  for (const auto& v : d.numeric_variables(c, lib.registry)) {
    auto it = theta.find(v);
    if (it != theta.end() && it->second.is_int()) vars.push_back(v);
  }
  auto type_of = [&](const std::string& v) {
    auto it = types.find(v);
    return it == types.end() ? std::string("int") : it->second;
  };

  std::vector<Literal> out;
  std::set<Literal> seen;
  for (const auto& name : lib.order) {
    const auto* def = lib.registry.find(name);
    std::vector<std::size_t> free_slots;
    for (std::size_t i = 0; i < def->arity(); ++i)
      if (!def->derived[i]) free_slots.push_back(i);
    const bool sym = def->symmetric();

    std::vector<std::string> pick;
    std::function<void()> rec = [&]() {
      if (pick.size() == free_slots.size()) {
        if (sym && pick.size() == 2 && !(pick[0] < pick[1])) return;
        std::vector<std::optional<std::int64_t>> vals(def->arity());
        for (std::size_t k = 0; k < free_slots.size(); ++k) vals[free_slots[k]] = theta.at(pick[k]).value;
        for (std::size_t i = 0; i < def->arity(); ++i) {
          if (!def->derived[i]) continue;
          auto v = def->solve(i, vals);
          if (!v || *v < 1) return;
          vals[i] = v;
        }
        std::vector<std::int64_t> ground;
        for (auto& v : vals) ground.push_back(*v);
        if (!def->holds(ground)) return;
        Literal lit{name, {}};
        std::size_t k = 0;
        for (std::size_t i = 0; i < def->arity(); ++i)
          lit.args.push_back(def->derived[i] ? Term::num(*vals[i]) : Term::var(pick[k++]));
        if (seen.insert(lit).second) out.push_back(std::move(lit));
        return;
      }
      for (const auto& v : vars) {
        if (std::find(pick.begin(), pick.end(), v) != pick.end()) continue;
        bool ok = true;
        for (const auto& p : pick) ok = ok && d.types_compatible(type_of(p), type_of(v));
        if (!ok) continue;
        pick.push_back(v);
        rec();
        pick.pop_back();
      }
    };
    rec();
  }
  return out;
}

std::string gloss(const Literal& lit, const std::vector<std::int64_t>& witness, const ConstraintLibrary& lib) {
  std::string out = render(lit);
  const auto* def = lib.registry.find(lit.predicate);
  if (!def || witness.size() != def->arity()) return out;
  // Substitute witness values into the defining relation.
  const std::string& rel = def->relation_text;
  std::string filled;
  for (std::size_t i = 0; i < rel.size();) {
    bool replaced = false;
    if (std::isalpha(static_cast<unsigned char>(rel[i])) && (i == 0 || !std::isalnum(static_cast<unsigned char>(rel[i - 1])))) {
      std::size_t j = i;
      while (j < rel.size() && (std::isalnum(static_cast<unsigned char>(rel[j])) || rel[j] == '_')) ++j;
      auto word = rel.substr(i, j - i);
      for (std::size_t s = 0; s < def->slots.size(); ++s) {
        if (def->slots[s] == word) {
          filled += std::to_string(witness[s]);
          replaced = true;
          break;
        }
      }
      if (!replaced) filled += word;
      i = j;
      continue;
    }
    filled += rel[i++];
  }
  return out + "  [" + filled + "]";
}

std::vector<AdviceCandidate> rank_candidates(std::vector<AdviceCandidate> cands, std::size_t k,
                                             const ConstraintLibrary& lib) {
  std::stable_sort(cands.begin(), cands.end(), [&](const AdviceCandidate& a, const AdviceCandidate& b) {
    auto ra = lib.rank(a.literal.predicate), rb = lib.rank(b.literal.predicate);
    if (ra != rb) return ra < rb;
    if (a.clause != b.clause) return a.clause < b.clause;
    return render(a.literal) < render(b.literal);
  });
  if (cands.size() > k) cands.resize(k);
  return cands;
}

AdvicePreference pose_query(AdviceQuery query, std::size_t k, const ConstraintLibrary& lib, Teacher& teacher,
                            AdviceLog& log, std::chrono::milliseconds timeout) {
  if (k < 1) throw std::invalid_argument("query size k must be at least 1");
  AdvicePreference pref;
  pref.query_id = query.id;
  if (query.candidates.empty()) return pref;
  query.candidates = rank_candidates(std::move(query.candidates), k, lib);
  for (auto& c : query.candidates)
    if (c.rendered.empty()) c.rendered = gloss(c.literal, c.witness, lib);
  const auto t0 = std::chrono::steady_clock::now();
  auto answer = teacher.answer(query, timeout);
  pref.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!answer) {
    pref.timed_out = true;
  } else {
    std::set<std::size_t> uniq;
    for (auto i : *answer) {
      if (i >= query.candidates.size()) throw std::out_of_range("preference index " + std::to_string(i) + " not offered");
      uniq.insert(i);
    }
    pref.chosen.assign(uniq.begin(), uniq.end());
  }
  log.push_back({std::move(query), pref});
  return pref;
}

ApplyResult apply_advice(const Theory& t, const std::vector<AdviceCandidate>& chosen, std::size_t max_body) {
  ApplyResult r{t, {}};
  std::set<std::size_t> touched;
  for (const auto& c : chosen) {
    if (c.clause >= r.theory.clauses.size()) throw std::out_of_range("advice for a clause that does not exist");
    auto& body = r.theory.clauses[c.clause].body;
    if (std::find(body.begin(), body.end(), c.literal) != body.end()) continue;
    if (body.size() + 1 > max_body) {
      r.skipped.push_back(c.literal);
      continue;
    }
    body.push_back(c.literal);
    touched.insert(c.clause);
  }
  for (auto k : touched) canonicalize(r.theory.clauses[k]);
  return r;
}

Substitution structural_correspondence(const Clause& truth, const Clause& current, const BuiltinRegistry& reg) {
  Substitution base;
  if (truth.head.predicate != current.head.predicate || truth.head.arity() != current.head.arity()) return base;
  for (std::size_t i = 0; i < truth.head.args.size(); ++i)
    if (truth.head.args[i].is_var()) base[truth.head.args[i].name] = current.head.args[i];

  std::vector<const Literal*> tl, cl;
  for (const auto& l : truth.body)
    if (!reg.is_builtin(l)) tl.push_back(&l);
  for (const auto& l : current.body)
    if (!reg.is_builtin(l)) cl.push_back(&l);

  Substitution best = base;
  std::size_t best_count = 0;
  Substitution cur = base;
  // One-to-one: a term of `current` is the image of at most one variable.
  std::set<Term> taken;
  for (const auto& [k, v] : base) taken.insert(v);
  std::vector<bool> used(cl.size(), false);

  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t matched) {
    if (matched + (tl.size() - i) <= best_count && i > 0) return;
    if (i == tl.size()) {
      if (matched > best_count) {
        best_count = matched;
        best = cur;
      }
      return;
    }
    const Literal& t = *tl[i];
    for (std::size_t j = 0; j < cl.size(); ++j) {
      if (used[j] || cl[j]->predicate != t.predicate || cl[j]->arity() != t.arity()) continue;
      std::vector<std::string> added;
      bool ok = true;
      for (std::size_t a = 0; a < t.args.size() && ok; ++a) {
        const auto& ta = t.args[a];
        const auto& ca = cl[j]->args[a];
        if (!ta.is_var()) {
          ok = ta == ca;
          continue;
        }
        auto it = cur.find(ta.name);
        if (it != cur.end()) {
          ok = it->second == ca;
        } else if (taken.insert(ca).second) {
          cur.emplace(ta.name, ca);
          added.push_back(ta.name);
        } else {
          ok = false;
        }
      }
      if (ok) {
        used[j] = true;
        rec(i + 1, matched + 1);
        used[j] = false;
      }
      for (const auto& v : added) {
        taken.erase(cur.at(v));
        cur.erase(v);
      }
    }
    rec(i + 1, matched);
  };
  rec(0, 0);
  return best;
}

namespace {

bool is_equality(const BuiltinDef& def) {
  return def.arity() == 2 && def.holds({3, 3}) && !def.holds({3, 4}) && !def.holds({4, 3});
}

// Bottom clauses already share one variable between equal numbers, so the
// truth's variable equalities are folded in before it is compared with them.
Clause collapse_equalities(Clause c, const BuiltinRegistry& reg) {
  for (bool changed = true; changed;) {
    changed = false;
    for (auto it = c.body.begin(); it != c.body.end(); ++it) {
      const auto* def = reg.find(it->predicate);
      if (!def || !is_equality(*def) || it->arity() != 2 || !it->args[0].is_var() || !it->args[1].is_var()) continue;
      Substitution s{{it->args[1].name, it->args[0]}};
      c.body.erase(it);
      c = apply_substitution(c, s);
      changed = true;
      break;
    }
  }
  return c;
}

class ScriptedOracle : public Teacher {
 public:
  ScriptedOracle(Theory truth, ConstraintLibrary lib) : lib_(std::move(lib)) {
    for (auto& c : truth.clauses) truth_.clauses.push_back(collapse_equalities(std::move(c), lib_.registry));
  }

  std::optional<std::vector<std::size_t>> answer(const AdviceQuery& q, std::chrono::milliseconds) override {
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < q.candidates.size(); ++i) {
      const auto& cand = q.candidates[i];
      if (cand.clause >= q.theory.clauses.size()) continue;
      if (stated(cand.literal, q.theory.clauses[cand.clause])) chosen.push_back(i);
    }
    return chosen;
  }

 private:
  bool stated(const Literal& cand, const Clause& current) const {
    const auto* def = lib_.registry.find(cand.predicate);
    for (const auto& tc : truth_.clauses) {
      auto sigma = structural_correspondence(tc, current, lib_.registry);
      for (const auto& l : tc.body) {
        if (l.predicate != cand.predicate || l.arity() != cand.arity()) continue;
        auto image = apply_substitution(l, sigma);
        if (image == cand) return true;
        if (def && def->symmetric() && image.args.size() == 2) {
          std::swap(image.args[0], image.args[1]);
          if (image == cand) return true;
        }
      }
    }
    return false;
  }

  Theory truth_;
  ConstraintLibrary lib_;
};

class ReplayTeacher : public Teacher {
 public:
  explicit ReplayTeacher(std::vector<AdviceExchange> rec) : rec_(std::move(rec)) {}

  std::optional<std::vector<std::size_t>> answer(const AdviceQuery& q, std::chrono::milliseconds) override {
    if (next_ >= rec_.size()) throw std::runtime_error("replay log has no answer for query " + std::to_string(q.id));
    const auto& r = rec_[next_++];
    if (r.query.candidates.size() != q.candidates.size())
      throw std::runtime_error("replayed query " + std::to_string(q.id) + " differs from the log");
    for (std::size_t i = 0; i < q.candidates.size(); ++i)
      if (r.query.candidates[i].literal != q.candidates[i].literal)
        throw std::runtime_error("replayed query " + std::to_string(q.id) + " differs from the log");
    if (r.preference.timed_out) return std::nullopt;
    return r.preference.chosen;
  }

 private:
  std::vector<AdviceExchange> rec_;
  std::size_t next_ = 0;
};

class TerminalTeacher : public Teacher {
 public:
  TerminalTeacher(std::istream& in, std::ostream& out, ConstraintLibrary lib) : in_(in), out_(out), lib_(std::move(lib)) {}

  std::optional<std::vector<std::size_t>> answer(const AdviceQuery& q, std::chrono::milliseconds) override {
    out_ << "\nCurrent theory:\n" << render(q.theory) << "\n";
    out_ << "Which constraints should hold? (comma-separated numbers, empty for none)\n";
    for (std::size_t i = 0; i < q.candidates.size(); ++i) out_ << "  " << i << ") " << q.candidates[i].rendered << "\n";
    out_ << "> " << std::flush;
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;
    std::vector<std::size_t> chosen;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      auto t = trim(tok);
      if (t.empty()) continue;
      std::size_t v = std::stoul(std::string(t));
      if (v < q.candidates.size()) chosen.push_back(v);
    }
    return chosen;
  }

 private:
  std::istream& in_;
  std::ostream& out_;
  ConstraintLibrary lib_;
};

}  // namespace

std::unique_ptr<Teacher> scripted_oracle(Theory truth, const ConstraintLibrary& lib) {
  return std::make_unique<ScriptedOracle>(std::move(truth), lib);
}

std::unique_ptr<Teacher> replay_teacher(std::vector<AdviceExchange> recorded) {
  return std::make_unique<ReplayTeacher>(std::move(recorded));
}

std::unique_ptr<Teacher> terminal_teacher(std::istream& in, std::ostream& out, const ConstraintLibrary& lib) {
  return std::make_unique<TerminalTeacher>(in, out, lib);
}

}  // namespace goci
