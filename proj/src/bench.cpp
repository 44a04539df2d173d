#include "goci/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "goci/advice.hpp"
#include "goci/coverage.hpp"
#include "goci/io.hpp"
#include "goci/parse.hpp"

namespace goci {

namespace {

std::string n(std::int64_t v) { return std::to_string(v); }

ConceptSpec block_concept(std::string name, std::string truth, std::vector<ParamRange> ranges, Params ref,
                          std::function<std::string(const Params&)> facts) {
  return {std::move(name), "blocks", "Contains", std::move(truth), std::move(ranges), std::move(ref), std::move(facts)};
}

ConceptSpec assembly_concept(std::string name, std::string truth, std::vector<ParamRange> ranges, Params ref,
                             std::function<std::string(const Params&)> facts) {
  return {std::move(name), "assembly", "Uses", std::move(truth), std::move(ranges), std::move(ref), std::move(facts)};
}

// Row under a tower one shorter than the whole; only the corner differs.
ConceptSpec ell_like(const std::string& name, const std::string& corner) {
  return block_concept(
      name,
      name + "(S) :- Height(S,Hs), Base(S,Ws), Contains(S,A), Contains(S,B), Row(A), Tower(B), Width(A,Wa), "
             "Height(B,Hb), Equal(Ws,Wa), Sub(Hb,Hs,1), SpRel(B,A,\"" + corner + "\").",
      {{"base", 3, 9}, {"height", 3, 9}}, {{"base", 4}, {"height", 5}}, [corner](const Params& p) {
        auto w = p.at("base"), h = p.at("height");
        return "Height(s," + n(h) + ").\nBase(s," + n(w) + ").\nContains(s,a).\nContains(s,b).\nRow(a).\nTower(b).\n"
               "Width(a," + n(w) + ").\nHeight(b," + n(h - 1) + ").\nSpRel(b,a,\"" + corner + "\").\n";
      });
}

std::vector<ConceptSpec> build_concepts() {
  std::vector<ConceptSpec> v;
  v.push_back(ell_like("Ell", "NWTop"));
  v.push_back(ell_like("Tee", "CenterTop"));
  v.push_back(ell_like("MirrorEll", "NETop"));
  v.push_back(block_concept(
      "Gate",
      "Gate(S) :- Height(S,Hs), Base(S,Ws), Contains(S,A), Contains(S,B), Contains(S,C), Row(A), Tower(B), "
      "Tower(C), Width(A,Wa), Height(B,Hb), Height(C,Hc), Equal(Ws,Wa), Sub(Hb,Hs,1), Equal(Hb,Hc), "
      "SpRel(B,A,\"SWBelow\"), SpRel(C,A,\"SEBelow\").",
      {{"base", 3, 9}, {"height", 3, 9}}, {{"base", 5}, {"height", 4}}, [](const Params& p) {
        auto w = p.at("base"), h = p.at("height");
        return "Height(s," + n(h) + ").\nBase(s," + n(w) + ").\nContains(s,a).\nContains(s,b).\nContains(s,c).\n"
               "Row(a).\nTower(b).\nTower(c).\nWidth(a," + n(w) + ").\nHeight(b," + n(h - 1) + ").\nHeight(c," +
               n(h - 1) + ").\nSpRel(b,a,\"SWBelow\").\nSpRel(c,a,\"SEBelow\").\n";
      }));
  v.push_back(block_concept(
      "Stairs",
      "Stairs(S) :- Height(S,Hs), Contains(S,B), Contains(S,C), Contains(S,D), Tower(B), Tower(C), Tower(D), "
      "Height(B,Hb), Height(C,Hc), Height(D,Hd), Equal(Hs,Hb), Sub(Hc,Hb,1), Sub(Hd,Hc,1), "
      "SpRel(C,B,\"E\"), SpRel(D,C,\"E\").",
      {{"height", 4, 10}}, {{"height", 5}}, [](const Params& p) {
        auto h = p.at("height");
        return "Height(s," + n(h) + ").\nContains(s,b).\nContains(s,c).\nContains(s,d).\nTower(b).\nTower(c).\n"
               "Tower(d).\nHeight(b," + n(h) + ").\nHeight(c," + n(h - 1) + ").\nHeight(d," + n(h - 2) + ").\n"
               "SpRel(c,b,\"E\").\nSpRel(d,c,\"E\").\n";
      }));
  v.push_back(block_concept(
      "Pillar",
      "Pillar(S) :- Height(S,Hs), Contains(S,B), Contains(S,C), Tower(B), Cube(C), Height(B,Hb), Sub(Hb,Hs,1), "
      "SpRel(C,B,\"Top\").",
      {{"height", 3, 10}}, {{"height", 6}}, [](const Params& p) {
        auto h = p.at("height");
        return "Height(s," + n(h) + ").\nContains(s,b).\nContains(s,c).\nTower(b).\nCube(c).\nHeight(b," + n(h - 1) +
               ").\nSpRel(c,b,\"Top\").\n";
      }));
  v.push_back(block_concept(
      "Ziggurat",
      "Ziggurat(S) :- Base(S,Ws), Contains(S,A), Contains(S,C), Row(A), Row(C), Width(A,Wa), Width(C,Wc), "
      "Equal(Ws,Wa), Sub(Wc,Wa,2), SpRel(C,A,\"CenterTop\").",
      {{"base", 5, 11}}, {{"base", 7}}, [](const Params& p) {
        auto w = p.at("base");
        return "Base(s," + n(w) + ").\nContains(s,a).\nContains(s,c).\nRow(a).\nRow(c).\nWidth(a," + n(w) +
               ").\nWidth(c," + n(w - 2) + ").\nSpRel(c,a,\"CenterTop\").\n";
      }));
  v.push_back(assembly_concept(
      "Bench",
      "Bench(S) :- Span(S,Ns), Height(S,Hs), Uses(S,P), Uses(S,L1), Uses(S,L2), Plank(P), Leg(L1), Leg(L2), "
      "Length(P,Lp), Length(L1,Ll), Length(L2,Lm), Equal(Ns,Lp), Equal(Ll,Lm), Sub(Ll,Hs,1), fetch(P,T0), "
      "join(L1,P,\"under\",T1), join(L2,P,\"under\",T2).",
      {{"span", 4, 12}, {"height", 3, 8}}, {{"span", 8}, {"height", 4}}, [](const Params& p) {
        auto s = p.at("span"), h = p.at("height");
        return "Span(s," + n(s) + ").\nHeight(s," + n(h) + ").\nUses(s,p).\nUses(s,l1).\nUses(s,l2).\nPlank(p).\n"
               "Leg(l1).\nLeg(l2).\nLength(p," + n(s) + ").\nLength(l1," + n(h - 1) + ").\nLength(l2," + n(h - 1) +
               ").\n@time 0: fetch(p).\n@time 1: join(l1,p,\"under\").\n@time 2: join(l2,p,\"under\").\n";
      }));
  v.push_back(assembly_concept(
      "Shelf",
      "Shelf(S) :- Span(S,Ns), Height(S,Hs), Uses(S,A), Uses(S,B), Uses(S,C), Plank(A), Plank(B), Plank(C), "
      "Length(A,La), Length(B,Lb), Length(C,Lc), Equal(La,Hs), Equal(Lb,Hs), Sub(Lc,Ns,2), fetch(C,T0), "
      "join(C,A,\"side\",T1), join(C,B,\"side\",T2).",
      {{"span", 5, 12}, {"height", 3, 12}}, {{"span", 9}, {"height", 5}}, [](const Params& p) {
        auto s = p.at("span"), h = p.at("height");
        return "Span(s," + n(s) + ").\nHeight(s," + n(h) + ").\nUses(s,a).\nUses(s,b).\nUses(s,c).\nPlank(a).\n"
               "Plank(b).\nPlank(c).\nLength(a," + n(h) + ").\nLength(b," + n(h) + ").\nLength(c," + n(s - 2) +
               ").\n@time 0: fetch(c).\n@time 1: join(c,a,\"side\").\n@time 2: join(c,b,\"side\").\n";
      }));
  v.push_back(assembly_concept(
      "Cart",
      "Cart(S) :- Span(S,Ns), Height(S,Hs), Uses(S,P), Uses(S,X), Uses(S,W), Uses(S,H), Plank(P), Plank(X), "
      "Wheel(W), Leg(H), Length(P,Lp), Length(X,Lx), Length(H,Lh), Equal(Lp,Ns), Sub(Ns,Lx,1), Sub(Lh,Hs,2), "
      "fetch(X,T0), join(W,X,\"under\",T1), join(X,P,\"under\",T2), join(H,P,\"back\",T3).",
      {{"span", 3, 10}, {"height", 4, 12}}, {{"span", 5}, {"height", 9}}, [](const Params& p) {
        auto s = p.at("span"), h = p.at("height");
        return "Span(s," + n(s) + ").\nHeight(s," + n(h) + ").\nUses(s,p).\nUses(s,x).\nUses(s,w).\nUses(s,h).\n"
               "Plank(p).\nPlank(x).\nWheel(w).\nLeg(h).\nLength(p," + n(s) + ").\nLength(x," + n(s + 1) +
               ").\nLength(h," + n(h - 2) + ").\n@time 0: fetch(x).\n@time 1: join(w,x,\"under\").\n"
               "@time 2: join(x,p,\"under\").\n@time 3: join(h,p,\"back\").\n";
      }));
  return v;
}

// For every numeric occurrence, the index of the first occurrence with the
// same type and value.
std::vector<std::size_t> sharing_pattern(const GroundExample& x, const Domain& d) {
  std::vector<std::pair<std::string, std::int64_t>> seen;
  std::vector<std::size_t> out;
  auto visit = [&](const std::string& type, const Term& t) {
    if (!t.is_int() || !d.is_numeric_type(type)) return;
    std::pair<std::string, std::int64_t> key{type, t.value};
    auto it = std::find(seen.begin(), seen.end(), key);
    out.push_back(static_cast<std::size_t>(it - seen.begin()));
    if (it == seen.end()) seen.push_back(key);
  };
  for (const auto& f : x.facts)
    for (std::size_t i = 0; i < f.arity(); ++i) visit(d.position_type(f.signature(), i), f.args[i]);
  return out;
}

bool truth_covers(const Theory& truth, const GroundExample& x) { return covers(truth, x).covered; }

std::uint64_t mix(std::uint64_t seed, const std::string& name, std::uint32_t stream) {
  const std::uint64_t h = std::stoull(digest(name), nullptr, 16);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32), stream};
  std::uint32_t w[2];
  seq.generate(w, w + 2);
  return (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
}

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

}  // namespace

const std::vector<ConceptSpec>& standard_concepts() {
  static const std::vector<ConceptSpec> v = build_concepts();
  return v;
}

std::string to_string(Perturbation p) {
  switch (p) {
    case Perturbation::FlipRelation: return "flip";
    case Perturbation::OffByOne: return "off-by-one";
    case Perturbation::DropContainment: return "drop";
  }
  return "?";
}

std::string to_string(Arm a) {
  switch (a) {
    case Arm::Goci: return "GOCI";
    case Arm::Ilp: return "ILP";
    case Arm::IlpScore: return "ILP+Score";
    case Arm::IlpGuidance: return "ILP+Guidance";
  }
  return "?";
}

Arm parse_arm(const std::string& s) {
  for (Arm a : {Arm::Goci, Arm::Ilp, Arm::IlpScore, Arm::IlpGuidance})
    if (to_string(a) == s) return a;
  throw std::invalid_argument("unknown arm '" + s + "'");
}

LoopConfig arm_config(Arm a, LoopConfig base) {
  base.use_distance = a == Arm::Goci || a == Arm::IlpScore;
  base.use_advice = a == Arm::Goci || a == Arm::IlpGuidance;
  return base;
}

GroundExample instantiate(const ConceptSpec& c, const Params& p) {
  std::string text = "@concept " + c.name + "(s).\n@params s:";
  bool first = true;
  for (const auto& [k, v] : p) {
    text += (first ? " " : ", ") + k + "=" + n(v);
    first = false;
  }
  return parse_example(text + "\n" + c.facts(p));
}

GroundExample sample_positive(const ConceptSpec& c, const Domain& d, std::mt19937_64& rng) {
  const auto want = sharing_pattern(instantiate(c, c.reference), d);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Params p;
    for (const auto& r : c.ranges) p[r.name] = std::uniform_int_distribution<std::int64_t>(r.lo, r.hi)(rng);
    auto x = instantiate(c, p);
    if (sharing_pattern(x, d) == want) return x;
  }
  throw std::logic_error("no general-position parameters for " + c.name);
}

std::optional<GroundExample> perturb(const GroundExample& x, Perturbation kind, const ConceptSpec& c,
                                     const Theory& truth, const Domain& d, std::mt19937_64& rng) {
  std::vector<GroundExample> options;
  auto consider = [&](GroundExample y) {
    if (!truth_covers(truth, y)) options.push_back(std::move(y));
  };
  const std::set<Term> head_terms(x.head.args.begin(), x.head.args.end());
  for (std::size_t fi = 0; fi < x.facts.size(); ++fi) {
    const auto& f = x.facts[fi];
    const auto sig = f.signature();
    const auto* mode = d.mode_for(sig);
    if (kind == Perturbation::DropContainment) {
      if (f.predicate != c.containment) continue;
      GroundExample y = x;
      y.facts.erase(y.facts.begin() + static_cast<std::ptrdiff_t>(fi));
      if (!y.time_index.empty()) y.time_index.erase(y.time_index.begin() + static_cast<std::ptrdiff_t>(fi));
      consider(std::move(y));
      continue;
    }
    for (std::size_t i = 0; i < f.arity(); ++i) {
      if (kind == Perturbation::FlipRelation) {
        if (!mode || mode->modes[i] != ArgMode::Constant || !d.keep_constant.count(f.args[i])) continue;
        for (const auto& alt : d.keep_constant) {
          if (alt == f.args[i]) continue;
          GroundExample y = x;
          y.facts[fi].args[i] = alt;
          consider(std::move(y));
        }
      } else {
        if (!f.args[i].is_int() || !d.is_numeric_type(d.position_type(sig, i))) continue;
        for (std::int64_t delta : {-1, 1}) {
          auto v = f.args[i].value + delta;
          if (v < 1) continue;
          GroundExample y = x;
          y.facts[fi].args[i] = Term::num(v);
          // Keep the declared parameters in step with the head's attributes.
          if (i + 1 == f.arity() && head_terms.count(f.args[0])) {
            std::string key = f.predicate;
            for (auto& ch : key) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            if (y.params.count(key)) y.params[key] = v;
          }
          consider(std::move(y));
        }
      }
    }
  }
  if (options.empty()) return std::nullopt;
  return pick(options, rng);
}

void BenchmarkSpec::validate() const {
  if (concepts.empty()) throw std::invalid_argument("benchmark needs at least one concept");
  if (seeds.empty()) throw std::invalid_argument("benchmark needs at least one seed");
  if (sizes.empty() || std::find(sizes.begin(), sizes.end(), 0u) != sizes.end())
    throw std::invalid_argument("sample sizes must be positive");
  if (arms.empty()) throw std::invalid_argument("benchmark needs at least one arm");
  if (perturbations.empty()) throw std::invalid_argument("benchmark needs at least one perturbation kind");
  if (eval_pos == 0 && eval_neg == 0) throw std::invalid_argument("evaluation sets are empty");
  if (threads == 0) throw std::invalid_argument("threads must be at least 1");
  loop.validate();
}

ConceptData generate(const ConceptSpec& c, const Domain& d, std::uint64_t seed, std::size_t max_n,
                     const BenchmarkSpec& spec) {
  ConceptData out{d, parse_theory(c.truth), {}, {}, {}, {}};
  std::mt19937_64 eval_rng(mix(seed, c.name, 0)), train_rng(mix(seed, c.name, 1));

  auto positive = [&](std::mt19937_64& rng) {
    auto x = sample_positive(c, d, rng);
    if (!truth_covers(out.truth, x)) throw std::logic_error(c.name + ": truth does not cover " + render(x.head));
    return x;
  };
  auto negative = [&](std::mt19937_64& rng, std::size_t i) {
    auto base = positive(rng);
    for (std::size_t k = 0; k < spec.perturbations.size(); ++k) {
      auto kind = spec.perturbations[(i + k) % spec.perturbations.size()];
      if (auto y = perturb(base, kind, c, out.truth, d, rng)) return *y;
    }
    throw std::logic_error(c.name + ": no perturbation escapes the truth theory");
  };

  for (std::size_t i = 0; i < spec.eval_pos; ++i) out.eval_pos.push_back(positive(eval_rng));
  for (std::size_t i = 0; i < spec.eval_neg; ++i) out.eval_neg.push_back(negative(eval_rng, i));
  for (std::size_t i = 0; i < max_n; ++i) out.train_pos.push_back(positive(train_rng));
  // Near misses of the training positives, one kind after another.
  for (std::size_t i = 0; i + 1 < max_n; ++i) {
    std::optional<GroundExample> y;
    for (std::size_t k = 0; k < spec.perturbations.size() && !y; ++k)
      y = perturb(out.train_pos[i], spec.perturbations[(i + k) % spec.perturbations.size()], c, out.truth, d,
                  train_rng);
    if (!y) throw std::logic_error(c.name + ": no near miss for a training positive");
    out.train_neg.push_back(*y);
  }
  return out;
}

std::vector<SummaryRow> BenchmarkReport::summary() const {
  std::vector<SummaryRow> rows;
  for (const auto& r : runs) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& s) { return s.arm == r.arm && s.n == r.n; });
    if (it == rows.end()) {
      rows.push_back({r.arm, r.n, 0, 0, 0, 0});
      it = rows.end() - 1;
    }
    if (!r.valid) {
      ++it->invalid;
      continue;
    }
    it->precision += r.precision;
    it->queries += static_cast<double>(r.queries);
    ++it->runs;
  }
  for (auto& s : rows) {
    if (s.runs == 0) continue;
    s.precision /= static_cast<double>(s.runs);
    s.queries /= static_cast<double>(s.runs);
  }
  std::sort(rows.begin(), rows.end(),
            [](const SummaryRow& a, const SummaryRow& b) { return std::tie(a.n, a.arm) < std::tie(b.n, b.arm); });
  return rows;
}

std::string BenchmarkReport::table() const {
  std::string out = "arm           n  precision  queries  runs  invalid\n";
  char buf[160];
  for (const auto& s : summary()) {
    std::snprintf(buf, sizeof buf, "%-12s %2zu  %9.3f  %7.2f  %4zu  %7zu\n", to_string(s.arm).c_str(), s.n, s.precision,
                  s.queries, s.runs, s.invalid);
    out += buf;
  }
  return out;
}

std::string BenchmarkReport::jsonl() const {
  std::string out;
  for (const auto& r : runs) {
    nlohmann::ordered_json j;
    j["arm"] = to_string(r.arm);
    j["concept"] = r.concept_name;
    j["n"] = r.n;
    j["seed"] = r.seed;
    j["precision"] = r.valid ? nlohmann::ordered_json(r.precision) : nlohmann::ordered_json(nullptr);
    j["queries"] = r.queries;
    j["iterations"] = r.iterations;
    j["seconds"] = r.seconds;
    if (!r.valid) j["error"] = r.error;
    out += j.dump() + "\n";
  }
  return out;
}

BenchmarkReport run_benchmark(const BenchmarkSpec& spec) {
  spec.validate();
  const std::size_t max_n = *std::max_element(spec.sizes.begin(), spec.sizes.end());
  const auto lib = ConstraintLibrary::standard();

  std::map<std::string, Domain> domains;
  for (const auto& c : spec.concepts)
    if (!domains.count(c.family))
      domains.emplace(c.family, parse_domain(read_file(spec.data_dir / c.family / (c.family + ".dom"))));

  // Data per (concept, seed), generated up front so runs share nothing mutable.
  struct Job {
    const ConceptSpec* spec;
    std::uint64_t seed;
    std::size_t n;
    Arm arm;
    std::size_t data;
  };
  std::vector<ConceptData> data;
  std::vector<std::string> data_errors;
  std::vector<Job> jobs;
  for (const auto& c : spec.concepts)
    for (auto seed : spec.seeds) {
      std::string err;
      try {
        data.push_back(generate(c, domains.at(c.family), seed, max_n, spec));
      } catch (const std::exception& e) {
        data.push_back({});
        err = e.what();
      }
      data_errors.push_back(err);
      for (auto n : spec.sizes)
        for (auto arm : spec.arms) jobs.push_back({&c, seed, n, arm, data.size() - 1});
    }

  BenchmarkReport report;
  report.runs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      const auto& job = jobs[i];
      auto& r = report.runs[i];
      r.arm = job.arm;
      r.concept_name = job.spec->name;
      r.n = job.n;
      r.seed = job.seed;
      if (!data_errors[job.data].empty()) {
        r.valid = false;
        r.error = data_errors[job.data];
        continue;
      }
      const auto& cd = data[job.data];
      std::vector<GroundExample> pos(cd.train_pos.begin(), cd.train_pos.begin() + static_cast<std::ptrdiff_t>(job.n));
      std::vector<GroundExample> neg(cd.train_neg.begin(),
                                     cd.train_neg.begin() + static_cast<std::ptrdiff_t>(job.n - 1));
      auto cfg = arm_config(job.arm, spec.loop);
      cfg.seed = job.seed;
      auto t0 = std::chrono::steady_clock::now();
      try {
        std::unique_ptr<Teacher> teacher;
        if (cfg.use_advice) teacher = scripted_oracle(cd.truth, lib);
        r.result = run_goci(pos, neg, cd.domain, lib, cfg, teacher.get());
        r.theory = render(r.result.theory);
        r.precision = evaluate_precision(r.result.theory, cd.eval_pos, cd.eval_neg, lib.registry);
        r.queries = r.result.queries();
        r.iterations = r.result.trace.size();
        r.covers_training = std::all_of(pos.begin(), pos.end(), [&](const GroundExample& x) {
          CoverOptions o;
          o.builtins = &lib.registry;
          return covers(r.result.theory, x, o).covered;
        });
      } catch (const std::exception& e) {
        r.valid = false;
        r.error = e.what();
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < spec.threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return report;
}

}  // namespace goci
