// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "goci/bench.hpp"
#include "goci/coverage.hpp"
#include "goci/distance.hpp"
#include "goci/io.hpp"
#include "goci/pac.hpp"
#include "goci/parse.hpp"
#include "goci/plan.hpp"
#include "goci/session.hpp"
#include "support/random_instances.hpp"

using namespace goci;

namespace {

const std::string kData = GOCI_DATA_DIR;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ---- 1

Outcome distance_suite() {
  auto t0 = Clock::now();
  std::vector<std::string> plans;
  std::map<std::string, Domain> domains;
  for (std::uint64_t seed = 1; plans.size() < 100 && seed < 50; ++seed)
    for (const auto& c : standard_concepts()) {
      if (!domains.count(c.family))
        domains.emplace(c.family, parse_domain(read_file(kData + "/" + c.family + "/" + c.family + ".dom")));
      const auto& d = domains.at(c.family);
      std::mt19937_64 rng(seed);
      auto p = derive_plan(sample_positive(c, d, rng), d);
      if (p.size() >= 128 && plans.size() < 100) plans.push_back(p);
    }
  if (plans.size() < 100) return {false, "only " + std::to_string(plans.size()) + " plans of 128+ bytes"};

  double worst_self = 0, worst_asym = 0, lo = 1, hi = 0;
  auto track = [&](double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  for (std::size_t i = 0; i < plans.size(); ++i) {
    double s = ncd(plans[i], plans[i]).ncd;
    worst_self = std::max(worst_self, s);
    track(s);
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto& other = plans[(i + k * 17) % plans.size()];
      double ab = ncd(plans[i], other).ncd, ba = ncd(other, plans[i]).ncd;
      worst_asym = std::max(worst_asym, std::abs(ab - ba));
      track(ab);
      track(ba);
    }
  }

  auto blocks = parse_domain(read_file(kData + "/blocks/blocks.dom"));
  auto tower = derive_plan({parse_literal("Tower(b)"), parse_literal("Height(b,8)")}, blocks);
  auto row = derive_plan({parse_literal("Row(a)"), parse_literal("Width(a,8)")}, blocks);
  double cross = std::min(ncd(tower, row).ncd, ncd(row, tower).ncd);
  double secs = since(t0);

  bool ok = worst_self <= 0.15 && worst_asym <= 0.05 && lo >= 0 && hi <= 1.15 && cross >= 0.3 && secs < 10;
  return {ok, fmt("self<=%.3f asym<=%.3f range=[%.3f,%.3f]", worst_self, worst_asym, lo, hi) +
                  fmt(" tower/row=%.3f %.2fs", cross, secs)};
}

// ---- 2

Outcome stub_ncd() {
  auto stub = [](std::string_view s) -> std::size_t { return s == "a" ? 10 : s == "b" ? 12 : 15; };
  double v = ncd("a", "b", stub).ncd;
  return {std::abs(v - 5.0 / 12.0) <= 1e-12, fmt("ncd=%.15f", v)};
}

// ---- 3

Outcome coverage_oracle() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::size_t bad = 0, covered = 0;
  for (int k = 0; k < 500; ++k) {
    auto in = goci::testing::random_instance(rng);
    bool want = goci::testing::brute_covers(in.clause, in.example);
    covered += want;
    if (covers(in.clause, in.example).covered != want) ++bad;
  }
  double secs = since(t0);
  return {bad == 0 && secs < 60,
          std::to_string(bad) + " disagreements over 500 (" + std::to_string(covered) + " covered)" +
              fmt(" %.2fs", secs)};
}

// ---- 4

Outcome recovery() {
  auto d = parse_domain(read_file(kData + "/blocks/blocks.dom"));
  auto x = parse_example(read_file(kData + "/blocks/L.facts"));
  auto lib = ConstraintLibrary::standard();
  auto oracle = scripted_oracle(parse_theory(read_file(kData + "/blocks/L_truth.thy")), lib);
  auto t0 = Clock::now();
  auto r = run_goci(x, d, lib, LoopConfig{}, oracle.get());
  double secs = since(t0);
  bool cov = covers(r.theory, x).covered;
  double dist = conceptual_distance(r.theory, x, d).ncd;
  return {cov && dist <= kNcdTolerance && secs < 30,
          std::string(cov ? "covers" : "MISSES") + fmt(" distance=%.4f queries=%.0f %.2fs", dist,
                                                        static_cast<double>(r.queries()), secs)};
}

// ---- 5..8 share the benchmark runs

struct Bench {
  BenchmarkSpec spec;
  BenchmarkReport one, one_again, rest;  // n=1 twice, then n=2 and n=5
  double one_seconds = 0;

  Bench() {
    spec.data_dir = kData;
    spec.sizes = {1};
    auto t0 = Clock::now();
    one = run_benchmark(spec);
    one_seconds = since(t0);
    one_again = run_benchmark(spec);
    spec.sizes = {2, 5};
    rest = run_benchmark(spec);
  }

  std::vector<const RunRecord*> all() const {
    std::vector<const RunRecord*> out;
    for (const auto* rep : {&one, &rest})
      for (const auto& r : rep->runs) out.push_back(&r);
    return out;
  }

  // mean over valid runs of (arm, n)
  double precision(Arm a, std::size_t n) const {
    double sum = 0;
    std::size_t k = 0;
    for (const auto* r : all())
      if (r->valid && r->arm == a && r->n == n) sum += r->precision, ++k;
    return k ? sum / static_cast<double>(k) : std::nan("");
  }
  double queries(Arm a, std::size_t n) const {
    double sum = 0;
    std::size_t k = 0;
    for (const auto* r : all())
      if (r->valid && r->arm == a && r->n == n) sum += static_cast<double>(r->queries), ++k;
    return k ? sum / static_cast<double>(k) : std::nan("");
  }
  std::size_t invalid() const {
    std::size_t k = 0;
    for (const auto* r : all()) k += !r->valid;
    return k;
  }
};

Outcome benchmark_gap(const Bench& b) {
  double g = b.precision(Arm::Goci, 1), i = b.precision(Arm::Ilp, 1), q = b.queries(Arm::Goci, 1);
  bool ok = g >= i + 0.2 && q <= 10 && b.one_seconds < 300 && b.invalid() == 0;
  return {ok, fmt("GOCI=%.3f ILP=%.3f queries=%.2f %.1fs", g, i, q, b.one_seconds) +
                  (b.invalid() ? " invalid runs: " + std::to_string(b.invalid()) : "")};
}

Outcome ablation(const Bench& b) {
  auto P = [&](Arm a, std::size_t n) { return b.precision(a, n); };
  bool n1 = P(Arm::Goci, 1) >= P(Arm::IlpGuidance, 1) && P(Arm::IlpGuidance, 1) >= P(Arm::Ilp, 1) - 0.05 &&
            P(Arm::Goci, 1) >= P(Arm::IlpScore, 1);
  bool n5 = P(Arm::Goci, 5) >= P(Arm::IlpScore, 5) && P(Arm::IlpScore, 5) >= P(Arm::Ilp, 5) - 0.05;
  return {n1 && n5, fmt("n=1 GOCI=%.3f +Guid=%.3f +Score=%.3f ILP=%.3f", P(Arm::Goci, 1), P(Arm::IlpGuidance, 1),
                        P(Arm::IlpScore, 1), P(Arm::Ilp, 1)) +
                        fmt("; n=5 GOCI=%.3f +Score=%.3f ILP=%.3f +Guid=%.3f", P(Arm::Goci, 5), P(Arm::IlpScore, 5),
                            P(Arm::Ilp, 5), P(Arm::IlpGuidance, 5))};
}

Outcome learning_curve(const Bench& b) {
  double g2 = b.precision(Arm::Goci, 2), g5 = b.precision(Arm::Goci, 5);
  double i2 = b.precision(Arm::Ilp, 2), i5 = b.precision(Arm::Ilp, 5);
  bool ok = std::abs(g5 - g2) <= 0.05 && std::abs(i5 - i2) > 0.05;
  return {ok, fmt("GOCI n2=%.3f n5=%.3f; ILP n2=%.3f n5=%.3f", g2, g5, i2, i5)};
}

std::string strip_seconds(const std::string& jsonl) {
  std::istringstream in(jsonl);
  std::string line, out;
  while (std::getline(in, line)) {
    auto j = Json::parse(line);
    j.erase("seconds");
    out += j.dump() + "\n";
  }
  return out;
}

Outcome loop_invariants(const Bench& b) {
  auto t0 = Clock::now();
  std::size_t runs = 0, not_decreasing = 0, uncovered = 0, replay_bad = 0;

  for (const auto* r : b.all()) {
    if (!r->valid) continue;
    ++runs;
    double prev = r->result.initial.total;
    for (const auto& t : r->result.trace)
      if (t.accepted) {
        if (!(t.score.total < prev)) ++not_decreasing;
        prev = t.score.total;
      }
    uncovered += !r->covers_training;
  }

  bool same = strip_seconds(b.one.jsonl()) == strip_seconds(b.one_again.jsonl());
  for (std::size_t i = 0; i < b.one.runs.size(); ++i) same = same && b.one.runs[i].theory == b.one_again.runs[i].theory;

  // Every run goes through a written session log and back.
  const auto lib = ConstraintLibrary::standard();
  std::map<std::string, std::string> domain_text;
  std::map<std::pair<std::string, std::uint64_t>, ConceptData> data;
  for (const auto* r : b.all()) {
    if (!r->valid) continue;
    const auto& c = *std::find_if(b.spec.concepts.begin(), b.spec.concepts.end(),
                                  [&](const ConceptSpec& s) { return s.name == r->concept_name; });
    if (!domain_text.count(c.family))
      domain_text[c.family] = read_file(kData + "/" + c.family + "/" + c.family + ".dom");
    auto key = std::make_pair(c.name, r->seed);
    if (!data.count(key)) data.emplace(key, generate(c, parse_domain(domain_text[c.family]), r->seed, 5, b.spec));
    const auto& cd = data.at(key);
    std::vector<GroundExample> pos(cd.train_pos.begin(), cd.train_pos.begin() + static_cast<std::ptrdiff_t>(r->n));
    std::vector<GroundExample> neg(cd.train_neg.begin(), cd.train_neg.begin() + static_cast<std::ptrdiff_t>(r->n - 1));
    auto cfg = arm_config(r->arm, b.spec.loop);
    cfg.seed = r->seed;
    auto text = to_log(make_record("acc", r->result, pos, neg, domain_text[c.family], "standard", cfg, r->seconds), lib);
    try {
      auto again = replay_session(parse_log(text), pos, neg, cd.domain, domain_text[c.family], lib, "standard");
      if (render(again.theory) != r->theory || again.final.total != r->result.final.total) ++replay_bad;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "replay %s n=%zu seed=%llu: %s\n", r->concept_name.c_str(), r->n,
                   static_cast<unsigned long long>(r->seed), e.what());
      ++replay_bad;
    }
  }

  bool ok = runs > 0 && not_decreasing == 0 && uncovered == 0 && same && replay_bad == 0;
  return {ok, std::to_string(runs) + " runs: " + std::to_string(not_decreasing) + " non-decreasing, " +
                  std::to_string(uncovered) + " uncovered, " + (same ? "deterministic" : "NONDETERMINISTIC") + ", " +
                  std::to_string(replay_bad) + " replay mismatches" + fmt(" (replay %.1fs)", since(t0))};
}

// ---- 9

Outcome pac_values() {
  auto rel = [](double got, double want) { return std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)); };
  bool ok = true;
  ok &= rel(hypothesis_space_size(2, 2, 2, 1, 2).value, 64);
  PacParams p;
  p.epsilon = 1;
  p.delta = std::exp(-1.0);
  p.d = 1;
  p.L = 1;
  p.m = 1;
  ok &= rel(sample_complexity(p, std::exp(1.0) - 2), 2);
  ok &= rel(refinement_distance_bounds(0.5, 0.2, 2, 3, 2).lower, 0.3);
  ok &= rel(refinement_distance_bounds(0.5, 0.2, 2, 3, 2).upper, 6);
  ok &= rel(advice_examples(21, 1, 10), 2);
  bool exact = ok;

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  std::size_t violations = 0;
  for (int k = 0; k < 1000; ++k) {
    PacParams q;
    q.epsilon = 0.01 + 0.98 * u(rng);
    q.delta = 0.01 + 0.9 * u(rng);
    q.d = 1 + 2 * u(rng);
    q.L = 1 + std::floor(8 * u(rng));
    q.m = 1 + std::floor(20 * u(rng));
    double h0 = 1 + 100 * u(rng), base = sample_complexity(q, h0);
    auto tweak = [&](auto f) {
      auto r = q;
      f(r);
      return sample_complexity(r, h0);
    };
    violations += tweak([](PacParams& r) { r.epsilon *= 0.9; }) < base;
    violations += tweak([](PacParams& r) { r.delta *= 0.9; }) < base;
    violations += tweak([](PacParams& r) { r.L += 1; }) < base;
    violations += sample_complexity(q, 2 * h0) < base;
    double t = 1 + std::floor(10 * u(rng)), pl = 1 + std::floor(4 * u(rng));
    double i = 1 + std::floor(3 * u(rng)), j = 1 + std::floor(3 * u(rng));
    auto h = hypothesis_space_size(t, pl, q.m, i, j).log_value;
    violations += hypothesis_space_size(t + 1, pl, q.m, i, j).log_value < h;
    violations += hypothesis_space_size(t, pl, q.m, i, j + 1).log_value < h;
    double D = u(rng), Dp = u(rng);
    auto bnd = refinement_distance_bounds(D, Dp, 1 + k % 4, 2 + k % 3, 2);
    violations += bnd.lower > bnd.upper;
    violations += advice_examples(base, 1, q.L + 1) > advice_examples(base, 1, q.L);
  }
  return {exact && violations == 0,
          std::string(exact ? "worked examples exact" : "WORKED EXAMPLE MISMATCH") + ", " +
              std::to_string(violations) + " monotonicity violations over 1000 points"};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  };
  auto guarded = [](const std::function<Outcome()>& f) -> Outcome {
    try {
      return f();
    } catch (const std::exception& e) {
      return {false, std::string("threw: ") + e.what()};
    }
  };

  report(1, "distance sanity", guarded(distance_suite));
  report(2, "ncd from stub sizes", guarded(stub_ncd));
  report(3, "coverage vs enumeration", guarded(coverage_oracle));
  report(4, "L-shape recovery", guarded(recovery));

  std::unique_ptr<Bench> b;
  std::string bench_error;
  try {
    b = std::make_unique<Bench>();
  } catch (const std::exception& e) {
    bench_error = e.what();
  }
  auto with_bench = [&](Outcome (*f)(const Bench&)) {
    return b ? guarded([&] { return f(*b); }) : Outcome{false, "benchmark failed: " + bench_error};
  };
  report(5, "one-shot benchmark gap", with_bench(benchmark_gap));
  report(6, "ablation ordering", with_bench(ablation));
  report(7, "learning-curve convergence", with_bench(learning_curve));
  report(8, "loop invariants", with_bench(loop_invariants));
  report(9, "PAC calculator", guarded(pac_values));

  std::printf("%d of 9 failed\n", failed);
  return failed ? 1 : 0;
}
