#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "goci/builtins.hpp"
#include "goci/domain.hpp"
#include "goci/logic.hpp"

namespace goci {

/// Constraint templates offered as advice, most specific first.
struct ConstraintLibrary {
  BuiltinRegistry registry;
  std::vector<std::string> order;

  static ConstraintLibrary standard();
  std::size_t size() const { return order.size(); }
  std::size_t max_arity() const;
  /// Position in `order`; lower is more specific.
  std::size_t rank(const std::string& predicate) const;
};

/// Lines of the form `constraint: Sub(x:int, y:int, n:#int) means y - x = n`.
ConstraintLibrary parse_constraint_library(std::string_view text);

/// True instantiations of the library over distinct numeric variables of
/// `c` with compatible types, evaluated under `theta`. Symmetric templates
/// appear once per unordered pair; derived slots are solved and must be
/// at least 1.
std::vector<Literal> enumerate_constraints(const Clause& c, const Substitution& theta, const ConstraintLibrary& lib,
                                           const Domain& d);

struct AdviceCandidate {
  Literal literal;
  std::size_t clause = 0;
  std::vector<std::int64_t> witness;  // values of the literal's arguments under theta
  std::string rendered;
};

struct AdviceQuery {
  std::size_t id = 0;
  std::size_t iteration = 0;
  std::vector<AdviceCandidate> candidates;
  Theory theory;  // the theory the candidates refer to
};

struct AdvicePreference {
  std::size_t query_id = 0;
  std::vector<std::size_t> chosen;  // indices into the query's candidates
  bool timed_out = false;
  double seconds = 0;  // teacher latency
};

/// Anything that can answer a query. An empty optional means no answer
/// arrived in time.
class Teacher {
 public:
  virtual ~Teacher() = default;
  virtual std::optional<std::vector<std::size_t>> answer(const AdviceQuery& q, std::chrono::milliseconds timeout) = 0;
};

struct AdviceExchange {
  AdviceQuery query;
  AdvicePreference preference;
};

/// Every query and its answer, in order.
using AdviceLog = std::vector<AdviceExchange>;

/// Human-readable gloss with witness values, e.g. `Sub(V7,V2,1)  [5 - 4 = 1]`.
std::string gloss(const Literal& lit, const std::vector<std::int64_t>& witness, const ConstraintLibrary& lib);

/// Orders candidates by template specificity, then render; keeps the top k.
std::vector<AdviceCandidate> rank_candidates(std::vector<AdviceCandidate> cands, std::size_t k,
                                             const ConstraintLibrary& lib);

/// Offers the top k candidates to the teacher and records the exchange.
/// No candidates means no teacher call and an empty preference.
AdvicePreference pose_query(AdviceQuery query, std::size_t k, const ConstraintLibrary& lib, Teacher& teacher,
                            AdviceLog& log, std::chrono::milliseconds timeout = std::chrono::milliseconds{60000});

struct ApplyResult {
  Theory theory;
  std::vector<Literal> skipped;  // would have exceeded the body bound
};

ApplyResult apply_advice(const Theory& t, const std::vector<AdviceCandidate>& chosen, std::size_t max_body);

/// Chooses exactly the offered constraints that the truth theory states,
/// reading truth's variables through the best structural correspondence
/// with the clause each candidate belongs to.
std::unique_ptr<Teacher> scripted_oracle(Theory truth, const ConstraintLibrary& lib = ConstraintLibrary::standard());

/// Variable map from `truth` into `current` matching as many non-built-in
/// literals as possible, heads aligned, one-to-one on variables.
Substitution structural_correspondence(const Clause& truth, const Clause& current, const BuiltinRegistry& reg);

/// Replays recorded choices in order; throws if a query differs from the record.
std::unique_ptr<Teacher> replay_teacher(std::vector<AdviceExchange> recorded);

/// Prompts on `out`, reads comma-separated indices from `in`.
std::unique_ptr<Teacher> terminal_teacher(std::istream& in, std::ostream& out, const ConstraintLibrary& lib);

}  // namespace goci
