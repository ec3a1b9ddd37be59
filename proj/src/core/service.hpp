#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "dialog.hpp"
#include "exec.hpp"
#include "limits.hpp"
#include "search.hpp"

namespace netbench {

class ServiceError : public std::runtime_error {
 public:
  enum class Kind { BadRequest, Parse, Invalid, Limit, NotFound, Conflict, IllegalAnswer };

  ServiceError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

  std::vector<std::string> allowed;       // IllegalAnswer
  std::optional<int> line, column;        // Parse

 private:
  Kind kind_;
};

std::string_view to_string(ServiceError::Kind kind);
int http_status(ServiceError::Kind kind);

struct AgentAction {
  enum class Kind { Ask, Act, Stop } kind = Kind::Stop;
  // Ask
  std::string slot;
  std::string prompt;
  std::vector<std::string> answers;
  // Act
  std::string op;
  std::string message;
};

struct SessionTurn {
  Turn turn;
  bool is_ask = false;
  std::string message;  // prompt for asks, rendered text for acts
  std::string answer;   // asks only
};

enum class SessionStatus { AwaitingUser, AgentActing, Finished };

std::string_view to_string(SessionStatus status);

struct Accounting {
  Rational cost;
  Rational utility;
  Rational value;
};

// Result of create/reply: every agent action emitted while advancing, the
// last of which is the pending ask or the stop.
struct StepResult {
  std::string session_id;
  std::vector<AgentAction> actions;
  std::uint32_t remaining = 0;
  Accounting accounting;
  SessionStatus status = SessionStatus::Finished;
};

struct SessionSnapshot {
  std::string session_id;
  SessionStatus status = SessionStatus::Finished;
  std::optional<EpisodeStatus> outcome;  // set once finished
  std::uint32_t remaining = 0;
  Accounting accounting;
  std::vector<SessionTurn> turns;
  AgentAction pending;  // the open ask, or stop
};

struct ServiceOptions {
  Limits limits;
  Algorithm algorithm = Algorithm::Dp;
  std::chrono::seconds idle_timeout{30 * 60};
  // Append-only per-session transcript files when set.
  std::optional<std::string> transcript_dir;
  std::function<std::chrono::steady_clock::time_point()> clock = [] {
    return std::chrono::steady_clock::now();
  };
};

// In-memory live dialogs. Thread-safe: writes to one session are serialized,
// reads may run concurrently, distinct sessions never share mutable state.
class SessionManager {
 public:
  explicit SessionManager(ServiceOptions options = {});
  ~SessionManager();
  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  StepResult create_from_text(std::string_view spec_text);
  StepResult create_from_builtin(std::string_view name);
  StepResult create(DialogSpec spec);

  StepResult reply(const std::string& id, const std::string& answer);
  SessionSnapshot get(const std::string& id) const;

  std::size_t size() const;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;

  ServiceOptions options_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

// Wire encodings (HTTP bodies and the C API).
std::string action_json(const AgentAction& a);
std::string step_json(const StepResult& r);
std::string snapshot_json(const SessionSnapshot& s);
std::string error_json(const ServiceError& e);

// 128 random bits, hex encoded.
std::string new_session_id();

}  // namespace netbench
