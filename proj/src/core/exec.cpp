#include "exec.hpp"

#include <json.hpp>
#include <sstream>

namespace netbench {

std::string_view to_string(EpisodeStatus status) {
  switch (status) {
    case EpisodeStatus::Completed: return "completed";
    case EpisodeStatus::UserAbandoned: return "user_abandoned";
    case EpisodeStatus::HorizonExhausted: return "horizon_exhausted";
    case EpisodeStatus::Aborted: return "aborted";
  }
  return "?";
}

ReplanDecision replan_step(const Problem& pr, const State& s, std::uint32_t remaining,
                           std::uint32_t global_offset, Algorithm algo, const Limits& limits) {
  const auto& obj = pr.objective();
  if (remaining == 0) {
    if (obj.kind == ObjectiveKind::MinCost && obj.goal && !consistent(*obj.goal, s)) return {};
    return {std::nullopt, Rational(0)};
  }
  const SolveResult r = solve(pr, s, remaining, algo, limits);
  if (!r.feasible) return {};
  const Rational scale = obj.step_discount().pow(global_offset);
  ReplanDecision d{std::nullopt, r.optimal_value * scale};
  if (!r.plan.empty()) d.op = pr.find_operator(r.plan.steps.front());
  return d;
}

Turn make_turn(const Problem& pr, std::size_t index, const Operator& op, const State& predicted,
               const State& observed) {
  Turn t;
  t.index = index;
  t.op = op.name;
  t.predicted = predicted;
  t.observed = observed;
  t.cost = op.cost;
  t.utility = op.utility;
  t.weight = pr.objective().step_discount().pow(static_cast<unsigned>(index));
  t.contribution = op.net() * t.weight;
  return t;
}

EpisodeStatus stop_status(const Problem& pr, const State& s, std::uint32_t remaining) {
  const auto& obj = pr.objective();
  if (obj.kind == ObjectiveKind::MinCost) {
    return !obj.goal || consistent(*obj.goal, s) ? EpisodeStatus::Completed
                                                  : EpisodeStatus::HorizonExhausted;
  }
  if (remaining > 0) return EpisodeStatus::Completed;
  for (const auto& o : pr.operators()) {
    if (o.net().sign() > 0 && applicable(o, s)) return EpisodeStatus::HorizonExhausted;
  }
  return EpisodeStatus::Completed;
}

Episode run_episode(const Problem& pr, Environment& env, Algorithm algo, const Limits& limits) {
  Episode ep;
  State state = pr.initial();
  std::uint32_t remaining = pr.horizon();
  const bool min_cost = pr.objective().kind == ObjectiveKind::MinCost;

  for (;;) {
    if (env.terminal()) {
      ep.status = EpisodeStatus::UserAbandoned;
      break;
    }
    const auto offset = static_cast<std::uint32_t>(ep.turns.size());
    const ReplanDecision d = replan_step(pr, state, remaining, offset, algo, limits);
    if (!d.op) {
      ep.status = stop_status(pr, state, remaining);
      break;
    }
    const Operator& op = pr.operators()[*d.op];
    const State predicted = apply(op, state);
    State observed = env.observe(op, state, predicted);
    try {
      pr.check_state(observed);
    } catch (const ModelError& e) {
      ep.status = EpisodeStatus::Aborted;
      ep.diagnostic = "environment returned an ill-formed state after " + op.name + ": " + e.what();
      break;
    }
    Turn turn = make_turn(pr, ep.turns.size(), op, predicted, observed);
    ep.realized_value += min_cost ? turn.cost : turn.contribution;
    ep.turns.push_back(std::move(turn));
    state = std::move(observed);
    --remaining;
  }
  ep.final_state = std::move(state);
  return ep;
}

std::string transcript_text(const Episode& ep) {
  std::ostringstream out;
  for (const auto& t : ep.turns) {
    out << "turn index=" << t.index << " op=" << t.op << " cost=" << t.cost
        << " utility=" << t.utility << " weight=" << t.weight
        << " contribution=" << t.contribution << " diverged=" << (t.diverged() ? "yes" : "no")
        << '\n';
  }
  out << "end realized_value=" << ep.realized_value << " status=" << to_string(ep.status) << '\n';
  return out.str();
}

std::string transcript_json(const Episode& ep) {
  nlohmann::ordered_json doc;
  doc["turns"] = nlohmann::ordered_json::array();
  for (const auto& t : ep.turns) {
    doc["turns"].push_back({{"index", t.index},
                            {"op", t.op},
                            {"cost", t.cost.str()},
                            {"utility", t.utility.str()},
                            {"weight", t.weight.str()},
                            {"contribution", t.contribution.str()},
                            {"diverged", t.diverged() ? "yes" : "no"}});
  }
  doc["realized_value"] = ep.realized_value.str();
  doc["status"] = std::string(to_string(ep.status));
  if (!ep.diagnostic.empty()) doc["diagnostic"] = ep.diagnostic;
  return doc.dump(2);
}

}  // namespace netbench
