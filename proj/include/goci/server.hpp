#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "goci/loop.hpp"

namespace goci {

struct ServeInputs {
  std::vector<GroundExample> pos, neg;
  Domain domain;
  ConstraintLibrary lib;
  LoopConfig cfg;
  std::string session_id = "session";
};

/// One induction session behind a TCP socket speaking NDJSON records.
/// At most one client at a time; a second is sent an error and closed.
/// Dropping the client pauses the loop at its pending query (the teacher
/// timeout only runs while someone is attached); reconnecting gets hello,
/// state and the pending query again.
class SessionServer {
 public:
  /// host "127.0.0.1", port 0 picks a free port.
  SessionServer(ServeInputs in, const std::string& host = "127.0.0.1", std::uint16_t port = 0);
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  std::uint16_t port() const;
  /// Runs the session to completion. The done record goes to the client
  /// attached at that moment, if any.
  InductionResult run();
  /// Makes run() return early; safe from any thread.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// "host:port" or ":port" or "port".
std::pair<std::string, std::uint16_t> parse_bind(const std::string& addr);

}  // namespace goci
