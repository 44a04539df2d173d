#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "goci/bench.hpp"
#include "goci/coverage.hpp"
#include "goci/distance.hpp"
#include "goci/io.hpp"
#include "goci/pac.hpp"
#include "goci/parse.hpp"
#include "goci/plan.hpp"
#include "goci/server.hpp"
#include "goci/session.hpp"

using namespace goci;

namespace {

std::vector<GroundExample> load_examples(const std::vector<std::string>& files) {
  std::vector<GroundExample> out;
  for (const auto& f : files) out.push_back(parse_example(read_file(f)));
  return out;
}

struct LibSource {
  ConstraintLibrary lib;
  std::string text;  // what the session log digests
};

LibSource load_lib(const std::string& path) {
  if (path.empty()) return {ConstraintLibrary::standard(), "standard"};
  auto text = read_file(path);
  return {parse_constraint_library(text), text};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- induce / serve share these

struct InduceArgs {
  std::vector<std::string> examples, negatives, eval_pos, eval_neg;
  std::string domain, lib, oracle, teacher = "none", listen = "127.0.0.1:7070", replay;
  std::string out, log, session_id = "session";
  LoopConfig cfg;
  std::size_t budget = 0;
  long timeout_ms = 60000;
  bool no_distance = false, no_advice = false;
};

void add_loop_options(CLI::App* app, InduceArgs& a) {
  app->add_option("--max-iterations,-L", a.cfg.max_iterations, "Induction iterations")->capture_default_str();
  app->add_option("--k", a.cfg.advice_k, "Candidates shown per query")->capture_default_str();
  app->add_option("--beam", a.cfg.search.beam_width, "Beam width")->capture_default_str();
  app->add_option("--budget", a.budget, "Query budget, 0 for none");
  app->add_option("--timeout-ms", a.timeout_ms, "Teacher timeout")->capture_default_str();
  app->add_option("--seed", a.cfg.seed)->capture_default_str();
  app->add_flag("--no-distance", a.no_distance, "Coverage-only score");
  app->add_flag("--no-advice", a.no_advice, "Never ask the teacher");
}

void finish_config(InduceArgs& a) {
  if (a.budget) a.cfg.query_budget = a.budget;
  a.cfg.teacher_timeout = std::chrono::milliseconds(a.timeout_ms);
  a.cfg.use_distance = !a.no_distance;
  a.cfg.use_advice = !a.no_advice;
  a.cfg.validate();
}

void summarize(const InductionResult& r, const InduceArgs& a) {
  std::cout << "queries=" << r.queries() << " iterations=" << r.trace.size() << " score=" << fmt(r.final.total)
            << " nll=" << fmt(r.final.nll) << " distance=" << fmt(r.final.distance);
  if (!a.eval_pos.empty() || !a.eval_neg.empty())
    std::cout << " precision=" << fmt(evaluate_precision(r.theory, load_examples(a.eval_pos), load_examples(a.eval_neg)));
  std::cout << "\n";
}

void write_outputs(const InductionResult& r, const InduceArgs& a, const std::vector<GroundExample>& pos,
                   const std::vector<GroundExample>& neg, const std::string& domain_text, const LibSource& lib,
                   const LoopConfig& cfg, double seconds) {
  auto theory = render(r.theory);
  if (a.out.empty())
    std::cout << theory;
  else
    write_file(a.out, theory);
  if (!a.log.empty())
    write_file(a.log, to_log(make_record(a.session_id, r, pos, neg, domain_text, lib.text, cfg, seconds), lib.lib));
}

int induce(InduceArgs& a) {
  finish_config(a);
  auto domain_text = read_file(a.domain);
  auto d = parse_domain(domain_text);
  auto lib = load_lib(a.lib);
  auto pos = load_examples(a.examples);
  auto neg = load_examples(a.negatives);

  if (!a.replay.empty()) {
    auto rec = parse_log(read_file(a.replay));
    auto t0 = std::chrono::steady_clock::now();
    auto r = replay_session(rec, pos, neg, d, domain_text, lib.lib, lib.text);
    write_outputs(r, a, pos, neg, domain_text, lib, rec.config, elapsed(t0));
    summarize(r, a);
    return 0;
  }

  auto t0 = std::chrono::steady_clock::now();
  InductionResult r;
  if (a.teacher == "ui") {
    auto [host, port] = parse_bind(a.listen);
    SessionServer server({pos, neg, d, lib.lib, a.cfg, a.session_id}, host, port);
    std::cerr << "waiting for a teacher on " << host << ":" << server.port() << "\n";
    r = server.run();
  } else {
    std::unique_ptr<Teacher> teacher;
    if (!a.oracle.empty()) {
      const std::string prefix = "scripted:";
      if (a.oracle.rfind(prefix, 0) != 0) throw std::invalid_argument("--oracle takes scripted:<truth.thy>");
      teacher = scripted_oracle(parse_theory(read_file(a.oracle.substr(prefix.size()))), lib.lib);
    } else if (a.teacher == "terminal") {
      teacher = terminal_teacher(std::cin, std::cerr, lib.lib);
    } else if (a.teacher != "none") {
      throw std::invalid_argument("unknown teacher '" + a.teacher + "'");
    }
    r = run_goci(pos, neg, d, lib.lib, a.cfg, teacher.get());
  }
  write_outputs(r, a, pos, neg, domain_text, lib, a.cfg, elapsed(t0));
  summarize(r, a);
  return 0;
}

// ---- benchmark

struct BenchArgs {
  std::string data, jsonl;
  std::vector<std::string> concepts, arms;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<std::size_t> sizes{1, 2, 3, 4, 5};
  std::size_t threads = 0, eval = 10;
};

int benchmark(const BenchArgs& a) {
  BenchmarkSpec spec;
  spec.data_dir = a.data;
  spec.seeds = a.seeds;
  spec.sizes = a.sizes;
  spec.eval_pos = spec.eval_neg = a.eval;
  if (a.threads) spec.threads = a.threads;
  if (!a.concepts.empty()) {
    spec.concepts.clear();
    for (const auto& name : a.concepts) {
      auto& all = standard_concepts();
      auto it = std::find_if(all.begin(), all.end(), [&](const ConceptSpec& c) { return c.name == name; });
      if (it == all.end()) throw std::invalid_argument("unknown concept '" + name + "'");
      spec.concepts.push_back(*it);
    }
  }
  if (!a.arms.empty()) {
    spec.arms.clear();
    for (const auto& s : a.arms) spec.arms.push_back(parse_arm(s));
  }
  spec.validate();
  auto report = run_benchmark(spec);
  std::cout << report.table();
  if (!a.jsonl.empty()) write_file(a.jsonl, report.jsonl());
  for (const auto& r : report.runs)
    if (!r.valid) std::cerr << "invalid run " << r.concept_name << " n=" << r.n << " seed=" << r.seed << ": " << r.error << "\n";
  return 0;
}

// ---- distance / plan / eval / pac

struct DistArgs {
  std::string theory, example, domain, plan_a, plan_b;
};

int distance(const DistArgs& a) {
  DistanceReport rep;
  if (!a.plan_a.empty() || !a.plan_b.empty()) {
    if (a.plan_a.empty() || a.plan_b.empty()) throw std::invalid_argument("--plan-a and --plan-b go together");
    rep = ncd(read_file(a.plan_a), read_file(a.plan_b));
  } else {
    if (a.theory.empty() || a.example.empty() || a.domain.empty())
      throw std::invalid_argument("need --theory, --example and --domain, or two plans");
    rep = conceptual_distance(parse_theory(read_file(a.theory)), parse_example(read_file(a.example)),
                              parse_domain(read_file(a.domain)));
  }
  std::cout << "ncd=" << fmt(rep.ncd) << " c_a=" << rep.c_a << " c_b=" << rep.c_b << " c_ab=" << rep.c_ab;
  if (rep.failed) std::cout << " failed=\"" << rep.failure << "\"";
  std::cout << "\n";
  return 0;
}

struct PlanArgs {
  std::string example, domain, theory;
  bool lenient = false;
};

int plan(const PlanArgs& a) {
  auto d = parse_domain(read_file(a.domain));
  auto x = parse_example(read_file(a.example));
  if (a.theory.empty()) {
    std::cout << derive_plan(x, d);
    return 0;
  }
  auto g = ground_theory(parse_theory(read_file(a.theory)), x, d, a.lenient);
  std::cout << derive_plan(g.facts, d);
  return 0;
}

struct EvalArgs {
  std::string theory, concept_name, data;
  std::vector<std::string> pos, neg;
  std::uint64_t seed = 1;
  std::size_t count = 10;
};

int eval(const EvalArgs& a) {
  auto t = parse_theory(read_file(a.theory));
  std::vector<GroundExample> pos, neg;
  if (!a.concept_name.empty()) {
    auto& all = standard_concepts();
    auto it = std::find_if(all.begin(), all.end(), [&](const ConceptSpec& c) { return c.name == a.concept_name; });
    if (it == all.end()) throw std::invalid_argument("unknown concept '" + a.concept_name + "'");
    BenchmarkSpec spec;
    spec.eval_pos = spec.eval_neg = a.count;
    auto d = parse_domain(read_file(std::filesystem::path(a.data) / it->family / (it->family + ".dom")));
    auto data = generate(*it, d, a.seed, 1, spec);
    pos = data.eval_pos;
    neg = data.eval_neg;
  } else {
    pos = load_examples(a.pos);
    neg = load_examples(a.neg);
  }
  std::size_t cp = 0, cn = 0;
  for (const auto& x : pos) cp += covers(t, x).covered;
  for (const auto& x : neg) cn += covers(t, x).covered;
  std::cout << "precision=" << fmt(evaluate_precision(t, pos, neg)) << " pos_covered=" << cp << "/" << pos.size()
            << " neg_covered=" << cn << "/" << neg.size() << "\n";
  return 0;
}

int pac(const PacParams& p, double d_l, double d_prev) {
  p.validate();
  auto h = hypothesis_space_size(p.t, p.p, p.m, p.i, p.j);
  auto h0 = std::isfinite(h.value) ? h.value : std::exp(std::min(h.log_value, 700.0));
  auto n = sample_complexity(p, h0);
  auto b = refinement_distance_bounds(d_l, d_prev, p.lib_size, static_cast<std::size_t>(p.t), p.q);
  std::cout << "h0=" << h.value << " ln_h0=" << fmt(h.log_value) << "\n"
            << "n_star=" << fmt(n) << "\n"
            << "advice_examples=" << fmt(advice_examples(n, p.num_inputs, p.L)) << "\n"
            << "distance_lower=" << fmt(b.lower) << " distance_upper=" << fmt(b.upper) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guided one-shot concept induction"};
  app.require_subcommand(1);

  InduceArgs ia;
  auto* induce_cmd = app.add_subcommand("induce", "Induce a theory from examples");
  induce_cmd->add_option("--example,-e", ia.examples, "Positive example .facts")->required()->check(CLI::ExistingFile);
  induce_cmd->add_option("--negative", ia.negatives, "Negative example .facts")->check(CLI::ExistingFile);
  induce_cmd->add_option("--domain,-d", ia.domain, "Domain .dom")->required()->check(CLI::ExistingFile);
  induce_cmd->add_option("--lib", ia.lib, "Constraint library (.constraints)")->check(CLI::ExistingFile);
  induce_cmd->add_option("--oracle", ia.oracle, "scripted:<truth.thy>");
  induce_cmd->add_option("--teacher", ia.teacher, "none, terminal or ui")->capture_default_str();
  induce_cmd->add_option("--listen", ia.listen, "Bind address for --teacher ui")->capture_default_str();
  induce_cmd->add_option("--replay", ia.replay, "Replay a session log")->check(CLI::ExistingFile);
  induce_cmd->add_option("--out,-o", ia.out, "Write the theory here instead of stdout");
  induce_cmd->add_option("--log", ia.log, "Write the session log");
  induce_cmd->add_option("--eval-pos", ia.eval_pos, "Positives for precision")->check(CLI::ExistingFile);
  induce_cmd->add_option("--eval-neg", ia.eval_neg, "Negatives for precision")->check(CLI::ExistingFile);
  induce_cmd->add_option("--session-id", ia.session_id)->capture_default_str();
  add_loop_options(induce_cmd, ia);

  InduceArgs sa;
  sa.teacher = "ui";
  auto* serve_cmd = app.add_subcommand("serve", "Run one session behind the NDJSON teacher protocol");
  serve_cmd->add_option("--listen", sa.listen, "host:port")->capture_default_str();
  serve_cmd->add_option("--example,-e", sa.examples)->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--negative", sa.negatives)->check(CLI::ExistingFile);
  serve_cmd->add_option("--domain,-d", sa.domain)->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--lib", sa.lib)->check(CLI::ExistingFile);
  serve_cmd->add_option("--out,-o", sa.out);
  serve_cmd->add_option("--log", sa.log);
  serve_cmd->add_option("--session-id", sa.session_id)->capture_default_str();
  add_loop_options(serve_cmd, sa);

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run the synthetic benchmark");
  bench_cmd->add_option("--data", ba.data, "Directory holding <family>/<family>.dom")->required()->check(CLI::ExistingDirectory);
  bench_cmd->add_option("--concepts", ba.concepts)->delimiter(',');
  bench_cmd->add_option("--arms", ba.arms, "GOCI, ILP, ILP+Score, ILP+Guidance")->delimiter(',');
  bench_cmd->add_option("--seeds", ba.seeds)->delimiter(',');
  bench_cmd->add_option("--sizes", ba.sizes)->delimiter(',');
  bench_cmd->add_option("--eval", ba.eval, "Eval positives and negatives per concept")->capture_default_str();
  bench_cmd->add_option("--threads", ba.threads);
  bench_cmd->add_option("--jsonl", ba.jsonl, "Per-run records");

  DistArgs da;
  auto* dist_cmd = app.add_subcommand("distance", "Conceptual distance of a theory, or NCD of two plans");
  dist_cmd->add_option("--theory,-t", da.theory)->check(CLI::ExistingFile);
  dist_cmd->add_option("--example,-e", da.example)->check(CLI::ExistingFile);
  dist_cmd->add_option("--domain,-d", da.domain)->check(CLI::ExistingFile);
  dist_cmd->add_option("--plan-a", da.plan_a)->check(CLI::ExistingFile);
  dist_cmd->add_option("--plan-b", da.plan_b)->check(CLI::ExistingFile);

  PlanArgs pa;
  auto* plan_cmd = app.add_subcommand("plan", "Plan of an example, or of a theory grounded on it");
  plan_cmd->add_option("--example,-e", pa.example)->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--domain,-d", pa.domain)->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--theory,-t", pa.theory)->check(CLI::ExistingFile);
  plan_cmd->add_flag("--lenient", pa.lenient, "Unbound numbers become '?'");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Precision of a theory");
  eval_cmd->add_option("--theory,-t", ea.theory)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--pos", ea.pos)->check(CLI::ExistingFile);
  eval_cmd->add_option("--neg", ea.neg)->check(CLI::ExistingFile);
  eval_cmd->add_option("--concept", ea.concept_name, "Use generated eval sets of a benchmark concept");
  eval_cmd->add_option("--data", ea.data, "Directory holding <family>/<family>.dom");
  eval_cmd->add_option("--seed", ea.seed)->capture_default_str();
  eval_cmd->add_option("--count", ea.count)->capture_default_str();

  PacParams pp;
  double d_l = 0, d_prev = 0;
  auto* pac_cmd = app.add_subcommand("pac", "Sample-complexity numbers");
  pac_cmd->add_option("--epsilon", pp.epsilon)->capture_default_str();
  pac_cmd->add_option("--delta", pp.delta)->capture_default_str();
  pac_cmd->add_option("--d", pp.d)->capture_default_str();
  pac_cmd->add_option("--L", pp.L)->capture_default_str();
  pac_cmd->add_option("--m", pp.m)->capture_default_str();
  pac_cmd->add_option("--t", pp.t)->capture_default_str();
  pac_cmd->add_option("--p", pp.p)->capture_default_str();
  pac_cmd->add_option("--i", pp.i)->capture_default_str();
  pac_cmd->add_option("--j", pp.j)->capture_default_str();
  pac_cmd->add_option("--inputs", pp.num_inputs)->capture_default_str();
  pac_cmd->add_option("--lib-size", pp.lib_size)->capture_default_str();
  pac_cmd->add_option("--q", pp.q)->capture_default_str();
  pac_cmd->add_option("--D-l", d_l, "Distance at iteration l");
  pac_cmd->add_option("--D-prev", d_prev, "Distance at iteration l-1");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*induce_cmd) return induce(ia);
    if (*serve_cmd) return induce(sa);
    if (*bench_cmd) return benchmark(ba);
    if (*dist_cmd) return distance(da);
    if (*plan_cmd) return plan(pa);
    if (*eval_cmd) {
      if (ea.concept_name.empty() && ea.pos.empty() && ea.neg.empty())
        throw std::invalid_argument("give --pos/--neg files or --concept with --data");
      if (!ea.concept_name.empty() && ea.data.empty()) throw std::invalid_argument("--concept needs --data");
      return eval(ea);
    }
    if (*pac_cmd) return pac(pp, d_l, d_prev);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
