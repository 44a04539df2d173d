#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "goci/domain.hpp"
#include "goci/logic.hpp"
#include "goci/loop.hpp"

namespace goci {

using Params = std::map<std::string, std::int64_t>;

struct ParamRange {
  std::string name;
  std::int64_t lo;
  std::int64_t hi;  // inclusive
};

/// One target concept of the synthetic suite. `facts` writes the body of a
/// fact file for head object `s`; `reference` is a parameter choice whose
/// pattern of equal numbers is the intended one.
struct ConceptSpec {
  std::string name;
  std::string family;       // subdirectory of the data dir holding <family>.dom
  std::string containment;  // predicate dropped by the containment perturbation
  std::string truth;        // theory text
  std::vector<ParamRange> ranges;
  Params reference;
  std::function<std::string(const Params&)> facts;
};

/// Ell, Tee, MirrorEll, Gate, Stairs, Pillar, Ziggurat, Bench, Shelf, Cart.
const std::vector<ConceptSpec>& standard_concepts();

enum class Perturbation { FlipRelation, OffByOne, DropContainment };
std::string to_string(Perturbation p);

enum class Arm { Goci, Ilp, IlpScore, IlpGuidance };
std::string to_string(Arm a);
Arm parse_arm(const std::string& s);
LoopConfig arm_config(Arm a, LoopConfig base);

/// A positive drawn in general position: same-typed numbers coincide only
/// where the reference instance has them coincide.
GroundExample sample_positive(const ConceptSpec& c, const Domain& d, std::mt19937_64& rng);
GroundExample instantiate(const ConceptSpec& c, const Params& p);

/// A near miss of `x` of the given kind that `truth` does not cover, or
/// nothing if no such perturbation exists.
std::optional<GroundExample> perturb(const GroundExample& x, Perturbation kind, const ConceptSpec& c,
                                     const Theory& truth, const Domain& d, std::mt19937_64& rng);

struct ConceptData {
  Domain domain;
  Theory truth;
  std::vector<GroundExample> train_pos;  // nested: the first n form size n
  std::vector<GroundExample> train_neg;  // the first n-1 go with size n
  std::vector<GroundExample> eval_pos;
  std::vector<GroundExample> eval_neg;
};

struct BenchmarkSpec {
  std::vector<ConceptSpec> concepts = standard_concepts();
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<std::size_t> sizes{1, 2, 3, 4, 5};
  std::vector<Arm> arms{Arm::Goci, Arm::Ilp, Arm::IlpScore, Arm::IlpGuidance};
  std::vector<Perturbation> perturbations{Perturbation::FlipRelation, Perturbation::OffByOne,
                                          Perturbation::DropContainment};
  std::size_t eval_pos = 10;
  std::size_t eval_neg = 10;
  std::filesystem::path data_dir;
  LoopConfig loop;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());

  void validate() const;
};

/// Training and evaluation sets for one concept and seed, up to the largest
/// requested size. Throws std::logic_error if the truth misclassifies any
/// generated example.
ConceptData generate(const ConceptSpec& c, const Domain& d, std::uint64_t seed, std::size_t max_n,
                     const BenchmarkSpec& spec);

struct RunRecord {
  Arm arm = Arm::Goci;
  std::string concept_name;
  std::size_t n = 1;
  std::uint64_t seed = 0;
  double precision = 0;
  std::size_t queries = 0;
  std::size_t iterations = 0;
  double seconds = 0;
  bool valid = true;
  std::string error;
  std::string theory;
  InductionResult result;
  bool covers_training = false;
};

struct SummaryRow {
  Arm arm;
  std::size_t n;
  double precision;
  double queries;
  std::size_t runs;
  std::size_t invalid;
};

struct BenchmarkReport {
  std::vector<RunRecord> runs;

  std::vector<SummaryRow> summary() const;
  std::string table() const;
  /// One JSON object per run with the fixed column set.
  std::string jsonl() const;
};

BenchmarkReport run_benchmark(const BenchmarkSpec& spec);

}  // namespace goci
