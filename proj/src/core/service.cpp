#include "service.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <random>

#include "textio.hpp"

namespace netbench {

using json = nlohmann::ordered_json;

std::string_view to_string(ServiceError::Kind kind) {
  switch (kind) {
    case ServiceError::Kind::BadRequest: return "bad_request";
    case ServiceError::Kind::Parse: return "parse";
    case ServiceError::Kind::Invalid: return "invalid";
    case ServiceError::Kind::Limit: return "limit";
    case ServiceError::Kind::NotFound: return "not_found";
    case ServiceError::Kind::Conflict: return "conflict";
    case ServiceError::Kind::IllegalAnswer: return "illegal_answer";
  }
  return "?";
}

int http_status(ServiceError::Kind kind) {
  switch (kind) {
    case ServiceError::Kind::NotFound: return 404;
    case ServiceError::Kind::Conflict: return 409;
    case ServiceError::Kind::IllegalAnswer: return 422;
    default: return 400;
  }
}

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::AwaitingUser: return "awaiting_user";
    case SessionStatus::AgentActing: return "agent_acting";
    case SessionStatus::Finished: return "finished";
  }
  return "?";
}

std::string new_session_id() {
  std::random_device rd;
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 4; ++i) {
    std::uint32_t word = rd();
    for (int j = 0; j < 8; ++j) {
      id += kHex[word & 0xF];
      word >>= 4;
    }
  }
  return id;
}

namespace {

void persist(const ServiceOptions& opts, const std::string& id, const std::string& line) {
  if (!opts.transcript_dir) return;
  std::ofstream out(*opts.transcript_dir + "/" + id + ".transcript", std::ios::app);
  out << line << '\n';
}

std::string turn_line(const SessionTurn& t) {
  Episode one;
  one.turns.push_back(t.turn);
  std::string text = transcript_text(one);
  return text.substr(0, text.find('\n'));
}

}  // namespace

struct SessionManager::Session {
  std::string id;
  DialogSpec spec;
  Problem problem;
  State state;
  std::uint32_t remaining;
  std::map<std::string, std::string> bindings;
  std::vector<SessionTurn> turns;
  Accounting accounting;
  SessionStatus status = SessionStatus::AgentActing;
  std::optional<EpisodeStatus> outcome;
  std::optional<std::string> pending_slot;
  std::chrono::steady_clock::time_point last_active;
  mutable std::shared_mutex mu;

  Session(std::string id_, DialogSpec spec_, Problem problem_)
      : id(std::move(id_)),
        spec(std::move(spec_)),
        problem(std::move(problem_)),
        state(problem.initial()),
        remaining(problem.horizon()) {}

  AgentAction pending_action() const {
    AgentAction a;
    if (status == SessionStatus::AwaitingUser && pending_slot) {
      const Slot& s = *spec.find_slot(*pending_slot);
      a.kind = AgentAction::Kind::Ask;
      a.slot = s.name;
      a.prompt = s.prompt;
      a.answers = s.answers;
    }
    return a;
  }

  void touch(const ServiceOptions& opts) { last_active = opts.clock(); }

  // Idle sessions end as abandoned on their next access.
  void expire_if_idle(const ServiceOptions& opts) {
    if (status == SessionStatus::Finished) return;
    if (opts.clock() - last_active > opts.idle_timeout) {
      finish(opts, EpisodeStatus::UserAbandoned);
    }
  }

  void finish(const ServiceOptions& opts, EpisodeStatus why) {
    status = SessionStatus::Finished;
    outcome = why;
    pending_slot.reset();
    persist(opts, id, "end realized_value=" + accounting.value.str() +
                          " status=" + std::string(to_string(why)));
  }

  void execute(const ServiceOptions& opts, const Operator& op, const State& observed,
               bool is_ask, std::string message, std::string answer) {
    const State predicted = apply(op, state);
    SessionTurn t{make_turn(problem, turns.size(), op, predicted, observed), is_ask,
                  std::move(message), std::move(answer)};
    accounting.cost += t.turn.cost;
    accounting.utility += t.turn.utility;
    accounting.value += problem.objective().kind == ObjectiveKind::MinCost ? t.turn.cost
                                                                           : t.turn.contribution;
    persist(opts, id, turn_line(t));
    turns.push_back(std::move(t));
    state = observed;
    --remaining;
  }

  // Runs the agent until it needs an answer, stops, or runs out of turns.
  void advance(const ServiceOptions& opts, std::vector<AgentAction>& actions) {
    status = SessionStatus::AgentActing;
    for (;;) {
      const auto offset = static_cast<std::uint32_t>(turns.size());
      ReplanDecision d;
      try {
        d = replan_step(problem, state, remaining, offset, opts.algorithm, opts.limits);
      } catch (const LimitError& e) {
        finish(opts, EpisodeStatus::Aborted);
        throw ServiceError(ServiceError::Kind::Limit, e.what());
      }
      if (!d.op) {
        finish(opts, stop_status(problem, state, remaining));
        actions.push_back(AgentAction{});
        return;
      }
      const Operator& op = problem.operators()[*d.op];
      const auto act = classify_operator(spec, op.name);
      if (act && act->kind == DialogAct::Kind::Ask) {
        status = SessionStatus::AwaitingUser;
        pending_slot = act->element;
        actions.push_back(pending_action());
        return;
      }
      AgentAction a;
      a.kind = AgentAction::Kind::Act;
      a.op = op.name;
      if (act && act->kind == DialogAct::Kind::Advise) {
        a.message = render_template(spec.find_advisory(act->element)->message_template, bindings);
      } else if (act) {
        a.message = "Running query " + act->element + ".";
      } else {
        a.message = op.name;
      }
      execute(opts, op, apply(op, state), false, a.message, "");
      actions.push_back(std::move(a));
    }
  }

  StepResult result(std::vector<AgentAction> actions) const {
    return {id, std::move(actions), remaining, accounting, status};
  }

  SessionSnapshot snapshot() const {
    return {id, status, outcome, remaining, accounting, turns, pending_action()};
  }
};


SessionManager::SessionManager(ServiceOptions options) : options_(std::move(options)) {}

SessionManager::~SessionManager() = default;

std::size_t SessionManager::size() const {
  std::shared_lock lock(mu_);
  return sessions_.size();
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(ServiceError::Kind::NotFound, "no session " + id);
  return it->second;
}

StepResult SessionManager::create_from_text(std::string_view spec_text) {
  DialogSpec spec;
  try {
    spec = parse_dialog_spec(spec_text);
  } catch (const SourceError& e) {
    ServiceError err(ServiceError::Kind::Parse, e.render());
    err.line = e.line();
    err.column = e.column();
    throw err;
  }
  return create(std::move(spec));
}

StepResult SessionManager::create_from_builtin(std::string_view name) {
  auto spec = builtin_dialog(name);
  if (!spec) throw ServiceError(ServiceError::Kind::BadRequest, "unknown builtin " + std::string(name));
  return create(std::move(*spec));
}

StepResult SessionManager::create(DialogSpec spec) {
  Problem problem = [&] {
    try {
      return compile_dialog(spec, options_.limits);
    } catch (const LimitError& e) {
      throw ServiceError(ServiceError::Kind::Limit, e.what());
    } catch (const ModelError& e) {
      throw ServiceError(ServiceError::Kind::Invalid, e.what());
    }
  }();
  auto session = std::make_shared<Session>(new_session_id(), std::move(spec), std::move(problem));
  session->touch(options_);

  // Registered before the first move so transcript lines carry the final id.
  std::unique_lock session_lock(session->mu);
  {
    std::unique_lock lock(mu_);
    while (sessions_.count(session->id)) session->id = new_session_id();
    sessions_.emplace(session->id, session);
  }
  std::vector<AgentAction> actions;
  try {
    session->advance(options_, actions);
  } catch (...) {
    std::unique_lock lock(mu_);
    sessions_.erase(session->id);
    throw;
  }
  return session->result(std::move(actions));
}

StepResult SessionManager::reply(const std::string& id, const std::string& answer) {
  auto session = find(id);
  std::unique_lock lock(session->mu);
  session->expire_if_idle(options_);
  if (session->status != SessionStatus::AwaitingUser || !session->pending_slot) {
    throw ServiceError(ServiceError::Kind::Conflict, "session " + id + " is not awaiting an answer");
  }
  const Slot& slot = *session->spec.find_slot(*session->pending_slot);
  const auto it = std::find(slot.answers.begin(), slot.answers.end(), answer);
  if (it == slot.answers.end()) {
    ServiceError err(ServiceError::Kind::IllegalAnswer,
                     "'" + answer + "' is not an allowed answer for " + slot.name);
    err.allowed = slot.answers;
    throw err;
  }

  const Problem& pr = session->problem;
  const Operator& op = pr.operators()[*pr.find_operator(ask_operator(slot.name))];
  State observed = apply(op, session->state);
  observed[op.eff.bindings().front().var] = static_cast<ValueIndex>(it - slot.answers.begin() + 1);
  session->bindings[slot.name] = answer;
  session->pending_slot.reset();
  session->execute(options_, op, observed, true, slot.prompt, answer);
  session->touch(options_);

  std::vector<AgentAction> actions;
  session->advance(options_, actions);
  return session->result(std::move(actions));
}

SessionSnapshot SessionManager::get(const std::string& id) const {
  auto session = find(id);
  {
    std::unique_lock lock(session->mu);
    session->expire_if_idle(options_);
  }
  std::shared_lock lock(session->mu);
  return session->snapshot();
}

// ---------------------------------------------------------------------------
// Wire encoding

namespace {

json action_doc(const AgentAction& a) {
  switch (a.kind) {
    case AgentAction::Kind::Ask:
      return {{"kind", "ask"}, {"slot", a.slot}, {"prompt", a.prompt}, {"answers", a.answers}};
    case AgentAction::Kind::Act:
      return {{"kind", "act"}, {"op", a.op}, {"message", a.message}};
    case AgentAction::Kind::Stop:
      break;
  }
  return {{"kind", "stop"}};
}

json accounting_doc(const Accounting& a) {
  return {{"cost", a.cost.str()}, {"utility", a.utility.str()}, {"value", a.value.str()}};
}

}  // namespace

std::string action_json(const AgentAction& a) { return action_doc(a).dump(); }

std::string step_json(const StepResult& r) {
  json doc;
  doc["session_id"] = r.session_id;
  doc["action"] = r.actions.empty() ? action_doc(AgentAction{}) : action_doc(r.actions.back());
  doc["actions"] = json::array();
  for (const auto& a : r.actions) doc["actions"].push_back(action_doc(a));
  doc["remaining"] = r.remaining;
  doc["value"] = r.accounting.value.str();
  doc["status"] = std::string(to_string(r.status));
  doc["accounting"] = accounting_doc(r.accounting);
  return doc.dump();
}

std::string snapshot_json(const SessionSnapshot& s) {
  json doc;
  doc["session_id"] = s.session_id;
  doc["status"] = std::string(to_string(s.status));
  if (s.outcome) doc["outcome"] = std::string(to_string(*s.outcome));
  doc["remaining"] = s.remaining;
  doc["value"] = s.accounting.value.str();
  doc["accounting"] = accounting_doc(s.accounting);
  doc["action"] = action_doc(s.pending);
  doc["turns"] = json::array();
  for (const auto& t : s.turns) {
    json turn = {{"index", t.turn.index},
                 {"op", t.turn.op},
                 {"cost", t.turn.cost.str()},
                 {"utility", t.turn.utility.str()},
                 {"weight", t.turn.weight.str()},
                 {"contribution", t.turn.contribution.str()},
                 {"diverged", t.turn.diverged() ? "yes" : "no"},
                 {"kind", t.is_ask ? "ask" : "act"},
                 {"message", t.message}};
    if (t.is_ask) turn["answer"] = t.answer;
    doc["turns"].push_back(std::move(turn));
  }
  return doc.dump();
}

std::string error_json(const ServiceError& e) {
  json err = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
  if (e.kind() == ServiceError::Kind::IllegalAnswer) err["allowed"] = e.allowed;
  if (e.line) err["line"] = *e.line;
  if (e.column) err["column"] = *e.column;
  return json{{"error", err}}.dump();
}

}  // namespace netbench
