#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "goci/advice.hpp"
#include "goci/domain.hpp"
#include "goci/loop.hpp"

namespace goci {

/// A record that does not follow the session protocol.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

inline constexpr int kProtocolVersion = 1;

// Records shared by the live session protocol and the .log files.
Json hello_record(const std::string& session_id, const std::string& target);
Json state_record(const std::string& theory, const ScoreParts& score, std::size_t iteration);
Json query_record(const AdviceQuery& q, const ConstraintLibrary& lib);
Json prefer_record(std::size_t query_id, const std::vector<std::size_t>& chosen, bool timed_out = false);
Json trace_record(const IterationTrace& t);
Json done_record(const InductionResult& r);
Json error_record(const std::string& message);

AdviceQuery query_from_record(const Json& j);
/// Validates kind, id and indices against the pending query; throws ProtocolError.
AdvicePreference preference_from_record(const Json& j, const AdviceQuery& pending);
IterationTrace trace_from_record(const Json& j);
ScoreParts score_from_json(const Json& j);
Json score_json(const ScoreParts& s);

Json config_json(const LoopConfig& c);
LoopConfig config_from_json(const Json& j);

/// Everything needed to audit or replay one induction run.
struct SessionRecord {
  std::string session_id;
  std::string domain_digest;
  std::string library_digest;
  std::vector<std::string> positive_digests;
  std::vector<std::string> negative_digests;
  LoopConfig config;
  std::vector<IterationTrace> trace;
  std::string final_theory;
  ScoreParts final_score;
  AdviceLog transcript;  // each preference carries the teacher's latency
  double seconds = 0;
};

/// Digests are taken over rendered inputs, so formatting of the source files
/// does not matter.
SessionRecord make_record(const std::string& session_id, const InductionResult& r,
                          const std::vector<GroundExample>& pos, const std::vector<GroundExample>& neg,
                          std::string_view domain_text, std::string_view library_text, const LoopConfig& cfg,
                          double seconds);

std::string to_log(const SessionRecord& s, const ConstraintLibrary& lib);
SessionRecord parse_log(std::string_view text);

/// Reruns the session against the same inputs with its recorded answers.
/// Throws std::runtime_error if an input digest differs or the final theory
/// is not reproduced byte for byte.
InductionResult replay_session(const SessionRecord& s, const std::vector<GroundExample>& pos,
                               const std::vector<GroundExample>& neg, const Domain& d, std::string_view domain_text,
                               const ConstraintLibrary& lib, std::string_view library_text);

}  // namespace goci
