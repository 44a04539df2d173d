#include "goci/session.hpp"

#include <set>
#include <sstream>

#include "goci/io.hpp"
#include "goci/parse.hpp"

namespace goci {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ProtocolError(std::string("record lacks '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("bad '") + key + "': " + e.what());
  }
}

std::string kind_of(const Json& j) { return get<std::string>(j, "kind"); }

std::string join_rendered(const std::vector<GroundExample>& xs, std::vector<std::string>& out) {
  for (const auto& x : xs) out.push_back(digest(render(x)));
  return {};
}

}  // namespace

Json hello_record(const std::string& session_id, const std::string& target) {
  return {{"kind", "hello"}, {"session", session_id}, {"protocol", kProtocolVersion}, {"target", target}};
}

Json score_json(const ScoreParts& s) {
  return {{"total", s.total},
          {"nll", s.nll},
          {"distance", s.distance},
          {"pos_covered", s.pos_covered},
          {"neg_covered", s.neg_covered}};
}

ScoreParts score_from_json(const Json& j) {
  ScoreParts s;
  s.total = get<double>(j, "total");
  s.nll = get<double>(j, "nll");
  s.distance = get<double>(j, "distance");
  s.pos_covered = get<std::size_t>(j, "pos_covered");
  s.neg_covered = get<std::size_t>(j, "neg_covered");
  return s;
}

Json state_record(const std::string& theory, const ScoreParts& score, std::size_t iteration) {
  return {{"kind", "state"}, {"iteration", iteration}, {"theory", theory}, {"score", score_json(score)}};
}

Json query_record(const AdviceQuery& q, const ConstraintLibrary& lib) {
  Json cands = Json::array(), rendered = Json::array(), clauses = Json::array(), witness = Json::array();
  for (const auto& c : q.candidates) {
    cands.push_back(render(c.literal));
    rendered.push_back(c.rendered.empty() ? gloss(c.literal, c.witness, lib) : c.rendered);
    clauses.push_back(c.clause);
    witness.push_back(c.witness);
  }
  return {{"kind", "query"},     {"id", q.id},           {"iteration", q.iteration},
          {"candidates", cands}, {"rendered", rendered}, {"clauses", clauses},
          {"witness", witness},  {"theory", render(q.theory)}};
}

AdviceQuery query_from_record(const Json& j) {
  if (kind_of(j) != "query") throw ProtocolError("expected a query record");
  AdviceQuery q;
  q.id = get<std::size_t>(j, "id");
  q.iteration = get<std::size_t>(j, "iteration");
  auto cands = get<std::vector<std::string>>(j, "candidates");
  auto rendered = get<std::vector<std::string>>(j, "rendered");
  auto clauses = get<std::vector<std::size_t>>(j, "clauses");
  auto witness = get<std::vector<std::vector<std::int64_t>>>(j, "witness");
  if (rendered.size() != cands.size() || clauses.size() != cands.size() || witness.size() != cands.size())
    throw ProtocolError("query arrays differ in length");
  for (std::size_t i = 0; i < cands.size(); ++i)
    q.candidates.push_back({parse_literal(cands[i]), clauses[i], witness[i], rendered[i]});
  auto theory = get<std::string>(j, "theory");
  if (!theory.empty()) q.theory = parse_theory(theory);
  return q;
}

Json prefer_record(std::size_t query_id, const std::vector<std::size_t>& chosen, bool timed_out) {
  Json j{{"kind", "prefer"}, {"id", query_id}, {"chosen", chosen}};
  if (timed_out) j["timed_out"] = true;
  return j;
}

AdvicePreference preference_from_record(const Json& j, const AdviceQuery& pending) {
  if (kind_of(j) != "prefer") throw ProtocolError("expected a prefer record");
  AdvicePreference p;
  p.query_id = get<std::size_t>(j, "id");
  if (p.query_id != pending.id)
    throw ProtocolError("preference for query " + std::to_string(p.query_id) + " but query " +
                        std::to_string(pending.id) + " is pending");
  const auto& chosen = field(j, "chosen");
  if (!chosen.is_array()) throw ProtocolError("'chosen' must be an array of indices");
  std::set<std::size_t> uniq;
  for (const auto& c : chosen) {
    if (!c.is_number_unsigned()) throw ProtocolError("'chosen' must hold non-negative integers");
    auto i = c.get<std::size_t>();
    if (i >= pending.candidates.size()) throw ProtocolError("index " + std::to_string(i) + " was not offered");
    uniq.insert(i);
  }
  p.chosen.assign(uniq.begin(), uniq.end());
  p.timed_out = j.value("timed_out", false);
  return p;
}

Json trace_record(const IterationTrace& t) {
  return {{"kind", "trace"},
          {"iteration", t.iteration},
          {"theory", t.theory},
          {"score", score_json(t.score)},
          {"queries", t.queries},
          {"offered", t.offered},
          {"chosen", t.chosen},
          {"accepted", t.accepted},
          {"advice_kept", t.advice_kept},
          {"budget_exhausted", t.budget_exhausted}};
}

IterationTrace trace_from_record(const Json& j) {
  if (kind_of(j) != "trace") throw ProtocolError("expected a trace record");
  IterationTrace t;
  t.iteration = get<std::size_t>(j, "iteration");
  t.theory = get<std::string>(j, "theory");
  t.score = score_from_json(field(j, "score"));
  t.queries = get<std::size_t>(j, "queries");
  t.offered = get<std::vector<std::string>>(j, "offered");
  t.chosen = get<std::vector<std::string>>(j, "chosen");
  t.accepted = get<bool>(j, "accepted");
  t.advice_kept = get<bool>(j, "advice_kept");
  t.budget_exhausted = get<bool>(j, "budget_exhausted");
  return t;
}

Json done_record(const InductionResult& r) {
  return {{"kind", "done"},
          {"theory", render(r.theory)},
          {"score", score_json(r.final)},
          {"initial", score_json(r.initial)},
          {"iterations", r.trace.size()},
          {"queries", r.queries()}};
}

Json error_record(const std::string& message) { return {{"kind", "error"}, {"message", message}}; }

Json config_json(const LoopConfig& c) {
  return {{"max_iterations", c.max_iterations},
          {"advice_k", c.advice_k},
          {"use_distance", c.use_distance},
          {"use_advice", c.use_advice},
          {"query_budget", c.query_budget ? Json(*c.query_budget) : Json(nullptr)},
          {"teacher_timeout_ms", c.teacher_timeout.count()},
          {"seed", c.seed},
          {"beam_width", c.search.beam_width},
          {"levels", c.search.levels},
          {"node_budget", c.search.node_budget},
          {"eval_budget", c.search.eval_budget},
          {"kappa_miss", c.search.kappa_miss},
          {"kappa_len", c.search.kappa_len}};
}

LoopConfig config_from_json(const Json& j) {
  LoopConfig c;
  c.max_iterations = get<std::size_t>(j, "max_iterations");
  c.advice_k = get<std::size_t>(j, "advice_k");
  c.use_distance = get<bool>(j, "use_distance");
  c.use_advice = get<bool>(j, "use_advice");
  if (!field(j, "query_budget").is_null()) c.query_budget = get<std::size_t>(j, "query_budget");
  c.teacher_timeout = std::chrono::milliseconds(get<std::int64_t>(j, "teacher_timeout_ms"));
  c.seed = get<std::uint64_t>(j, "seed");
  c.search.beam_width = get<std::size_t>(j, "beam_width");
  c.search.levels = get<std::size_t>(j, "levels");
  c.search.node_budget = get<std::size_t>(j, "node_budget");
  c.search.eval_budget = get<std::size_t>(j, "eval_budget");
  c.search.kappa_miss = get<double>(j, "kappa_miss");
  c.search.kappa_len = get<double>(j, "kappa_len");
  return c;
}

SessionRecord make_record(const std::string& session_id, const InductionResult& r,
                          const std::vector<GroundExample>& pos, const std::vector<GroundExample>& neg,
                          std::string_view domain_text, std::string_view library_text, const LoopConfig& cfg,
                          double seconds) {
  SessionRecord s;
  s.session_id = session_id;
  s.domain_digest = digest(domain_text);
  s.library_digest = digest(library_text);
  join_rendered(pos, s.positive_digests);
  join_rendered(neg, s.negative_digests);
  s.config = cfg;
  s.trace = r.trace;
  s.final_theory = render(r.theory);
  s.final_score = r.final;
  s.transcript = r.log;
  s.seconds = seconds;
  return s;
}

std::string to_log(const SessionRecord& s, const ConstraintLibrary& lib) {
  std::string out;
  auto line = [&](const Json& j) { out += j.dump() + "\n"; };
  line({{"kind", "session"},
        {"session", s.session_id},
        {"protocol", kProtocolVersion},
        {"domain", s.domain_digest},
        {"library", s.library_digest},
        {"positives", s.positive_digests},
        {"negatives", s.negative_digests},
        {"config", config_json(s.config)}});
  // Exchanges and traces interleave by iteration, as they happened.
  std::size_t q = 0;
  for (const auto& t : s.trace) {
    for (; q < s.transcript.size() && s.transcript[q].query.iteration <= t.iteration; ++q) {
      const auto& ex = s.transcript[q];
      line(query_record(ex.query, lib));
      auto p = prefer_record(ex.preference.query_id, ex.preference.chosen, ex.preference.timed_out);
      p["seconds"] = ex.preference.seconds;
      line(p);
    }
    line(trace_record(t));
  }
  for (; q < s.transcript.size(); ++q) {
    line(query_record(s.transcript[q].query, lib));
    line(prefer_record(s.transcript[q].preference.query_id, s.transcript[q].preference.chosen,
                       s.transcript[q].preference.timed_out));
  }
  line({{"kind", "done"}, {"theory", s.final_theory}, {"score", score_json(s.final_score)}, {"seconds", s.seconds}});
  return out;
}

SessionRecord parse_log(std::string_view text) {
  SessionRecord s;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header = false, done = false;
  std::optional<AdviceQuery> pending;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = Json::parse(line);
      auto kind = kind_of(j);
      if (kind == "session") {
        if (header) throw ProtocolError("second session header");
        header = true;
        s.session_id = get<std::string>(j, "session");
        s.domain_digest = get<std::string>(j, "domain");
        s.library_digest = get<std::string>(j, "library");
        s.positive_digests = get<std::vector<std::string>>(j, "positives");
        s.negative_digests = get<std::vector<std::string>>(j, "negatives");
        s.config = config_from_json(field(j, "config"));
      } else if (!header) {
        throw ProtocolError("log must start with a session header");
      } else if (kind == "query") {
        if (pending) throw ProtocolError("query " + std::to_string(pending->id) + " has no answer");
        pending = query_from_record(j);
      } else if (kind == "prefer") {
        if (!pending) throw ProtocolError("preference without a query");
        auto p = preference_from_record(j, *pending);
        p.seconds = j.value("seconds", 0.0);
        s.transcript.push_back({std::move(*pending), std::move(p)});
        pending.reset();
      } else if (kind == "trace") {
        s.trace.push_back(trace_from_record(j));
      } else if (kind == "done") {
        s.final_theory = get<std::string>(j, "theory");
        s.final_score = score_from_json(field(j, "score"));
        s.seconds = j.value("seconds", 0.0);
        done = true;
      } else {
        throw ProtocolError("unexpected record kind '" + kind + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError("session log line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ProtocolError& e) {
      throw ProtocolError("session log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header) throw ProtocolError("empty session log");
  if (!done) throw ProtocolError("session log ends before the done record");
  return s;
}

InductionResult replay_session(const SessionRecord& s, const std::vector<GroundExample>& pos,
                               const std::vector<GroundExample>& neg, const Domain& d, std::string_view domain_text,
                               const ConstraintLibrary& lib, std::string_view library_text) {
  if (digest(domain_text) != s.domain_digest) throw std::runtime_error("domain differs from the logged session");
  if (digest(library_text) != s.library_digest)
    throw std::runtime_error("constraint library differs from the logged session");
  std::vector<std::string> p, n;
  join_rendered(pos, p);
  join_rendered(neg, n);
  if (p != s.positive_digests || n != s.negative_digests)
    throw std::runtime_error("examples differ from the logged session");
  auto teacher = replay_teacher(s.transcript);
  auto r = run_goci(pos, neg, d, lib, s.config, teacher.get());
  if (render(r.theory) != s.final_theory)
    throw std::runtime_error("replay produced a different theory:\n" + render(r.theory) + "\nlogged:\n" +
                             s.final_theory);
  return r;
}

}  // namespace goci
