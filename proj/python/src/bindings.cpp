#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "goci/bench.hpp"
#include "goci/coverage.hpp"
#include "goci/distance.hpp"
#include "goci/pac.hpp"
#include "goci/parse.hpp"
#include "goci/plan.hpp"
#include "goci/session.hpp"

namespace py = pybind11;
using namespace goci;

namespace {

std::vector<GroundExample> examples(const std::vector<std::string>& texts) {
  std::vector<GroundExample> out;
  for (const auto& t : texts) out.push_back(parse_example(t));
  return out;
}

py::dict score_dict(const ScoreParts& s) {
  py::dict d;
  d["total"] = s.total;
  d["nll"] = s.nll;
  d["distance"] = s.distance;
  d["pos_covered"] = s.pos_covered;
  d["neg_covered"] = s.neg_covered;
  return d;
}

}  // namespace

PYBIND11_MODULE(_goci, m) {
  m.doc() = "Guided one-shot concept induction";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ProtocolError>(m, "ProtocolError", PyExc_ValueError);

  m.def("normalize_theory", [](const std::string& text) { return render(parse_theory(text)); },
        "Parse and re-render a theory.");

  m.def(
      "covers",
      [](const std::string& theory, const std::string& example) {
        return covers(parse_theory(theory), parse_example(example)).covered;
      },
      py::arg("theory"), py::arg("example"));

  m.def(
      "precision",
      [](const std::string& theory, const std::vector<std::string>& pos, const std::vector<std::string>& neg) {
        return evaluate_precision(parse_theory(theory), examples(pos), examples(neg));
      },
      py::arg("theory"), py::arg("pos"), py::arg("neg"));

  m.def("compressed_size", [](py::bytes b) { return compressed_size(std::string(b)); });
  m.def("ncd", [](const std::string& a, const std::string& b) { return ncd(a, b).ncd; }, py::arg("a"), py::arg("b"));
  m.def(
      "ncd_with",
      [](const std::string& a, const std::string& b, py::function size) {
        return ncd(a, b, [&](std::string_view s) { return size(std::string(s)).cast<std::size_t>(); }).ncd;
      },
      py::arg("a"), py::arg("b"), py::arg("compressed_size"), "NCD with a caller-supplied compressor size.");

  m.def(
      "plan",
      [](const std::string& example, const std::string& domain, std::optional<std::string> theory, bool lenient) {
        auto d = parse_domain(domain);
        auto x = parse_example(example);
        if (!theory) return derive_plan(x, d);
        return derive_plan(ground_theory(parse_theory(*theory), x, d, lenient).facts, d);
      },
      py::arg("example"), py::arg("domain"), py::arg("theory") = py::none(), py::arg("lenient") = false);

  m.def(
      "conceptual_distance",
      [](const std::string& theory, const std::string& example, const std::string& domain) {
        return conceptual_distance(parse_theory(theory), parse_example(example), parse_domain(domain)).ncd;
      },
      py::arg("theory"), py::arg("example"), py::arg("domain"));

  m.def(
      "induce",
      [](const std::vector<std::string>& pos, const std::string& domain, std::optional<std::string> truth,
         std::vector<std::string> neg, std::size_t max_iterations, bool use_distance, bool use_advice,
         std::string constraints) {
        LoopConfig cfg;
        cfg.max_iterations = max_iterations;
        cfg.use_distance = use_distance;
        cfg.use_advice = use_advice;
        auto lib = constraints.empty() ? ConstraintLibrary::standard() : parse_constraint_library(constraints);
        auto P = examples(pos), N = examples(neg);
        auto d = parse_domain(domain);
        std::unique_ptr<Teacher> teacher;
        if (truth) teacher = scripted_oracle(parse_theory(*truth), lib);
        InductionResult r;
        {
          py::gil_scoped_release unlock;
          r = run_goci(P, N, d, lib, cfg, teacher.get());
        }
        py::dict out;
        out["theory"] = render(r.theory);
        out["queries"] = r.queries();
        out["iterations"] = r.trace.size();
        out["score"] = score_dict(r.final);
        out["initial"] = score_dict(r.initial);
        py::list trace;
        for (const auto& t : r.trace) trace.append(trace_record(t).dump());
        out["trace"] = trace;
        out["log"] = to_log(make_record("py", r, P, N, domain, constraints.empty() ? "standard" : constraints, cfg, 0),
                            lib);
        return out;
      },
      py::arg("pos"), py::arg("domain"), py::arg("truth") = py::none(), py::arg("neg") = std::vector<std::string>{},
      py::arg("max_iterations") = 10, py::arg("use_distance") = true, py::arg("use_advice") = true,
      py::arg("constraints") = "",
      "Runs the induction loop; `truth` drives a scripted teacher. Returns theory, counts, scores, trace and "
      "the session log.");

  m.def(
      "replay",
      [](const std::string& log, const std::vector<std::string>& pos, const std::string& domain,
         std::vector<std::string> neg, std::string constraints) {
        auto lib = constraints.empty() ? ConstraintLibrary::standard() : parse_constraint_library(constraints);
        auto r = replay_session(parse_log(log), examples(pos), examples(neg), parse_domain(domain), domain, lib,
                                constraints.empty() ? "standard" : constraints);
        return render(r.theory);
      },
      py::arg("log"), py::arg("pos"), py::arg("domain"), py::arg("neg") = std::vector<std::string>{},
      py::arg("constraints") = "");

  m.def("concepts", [] {
    std::vector<std::string> names;
    for (const auto& c : standard_concepts()) names.push_back(c.name);
    return names;
  });

  m.def(
      "benchmark",
      [](const std::string& data_dir, std::vector<std::string> concepts, std::vector<std::uint64_t> seeds,
         std::vector<std::size_t> sizes, std::vector<std::string> arms, std::size_t threads) {
        BenchmarkSpec spec;
        spec.data_dir = data_dir;
        if (!concepts.empty()) {
          std::vector<ConceptSpec> keep;
          for (const auto& c : standard_concepts())
            if (std::find(concepts.begin(), concepts.end(), c.name) != concepts.end()) keep.push_back(c);
          if (keep.size() != concepts.size()) throw std::invalid_argument("unknown concept name");
          spec.concepts = keep;
        }
        spec.seeds = seeds;
        spec.sizes = sizes;
        if (!arms.empty()) {
          spec.arms.clear();
          for (const auto& a : arms) spec.arms.push_back(parse_arm(a));
        }
        if (threads) spec.threads = threads;
        BenchmarkReport rep;
        {
          py::gil_scoped_release unlock;
          rep = run_benchmark(spec);
        }
        return rep.jsonl();
      },
      py::arg("data_dir"), py::arg("concepts") = std::vector<std::string>{},
      py::arg("seeds") = std::vector<std::uint64_t>{1}, py::arg("sizes") = std::vector<std::size_t>{1},
      py::arg("arms") = std::vector<std::string>{}, py::arg("threads") = 0,
      "Runs the benchmark; returns one JSON line per run.");

  m.def("hypothesis_space_size", [](double t, double p, double mm, double i, double j) {
    auto h = hypothesis_space_size(t, p, mm, i, j);
    return py::make_tuple(h.value, h.log_value);
  });
  m.def(
      "sample_complexity",
      [](double h0, double epsilon, double delta, double d, double L, double mm) {
        PacParams p;
        p.epsilon = epsilon;
        p.delta = delta;
        p.d = d;
        p.L = L;
        p.m = mm;
        return sample_complexity(p, h0);
      },
      py::arg("h0"), py::arg("epsilon"), py::arg("delta"), py::arg("d") = 1.0, py::arg("L") = 10.0,
      py::arg("m") = 1.0);
  m.def(
      "refinement_distance_bounds",
      [](double D_l, double D_prev, std::size_t lib_size, std::size_t t, std::size_t q, std::vector<double> probs) {
        auto b = refinement_distance_bounds(D_l, D_prev, lib_size, t, q, probs);
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("D_l"), py::arg("D_prev"), py::arg("lib_size"), py::arg("t"), py::arg("q"),
      py::arg("probs") = std::vector<double>{});
  m.def("advice_examples", &advice_examples, py::arg("n_star"), py::arg("num_inputs"), py::arg("L"));
}
