#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "limits.hpp"
#include "model.hpp"
#include "search.hpp"

namespace netbench {

// Where plans meet the world. Given the operator the agent executed, the
// state before it, and the state the model predicts, returns the state that
// was actually observed.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual State observe(const Operator& op, const State& before, const State& predicted) = 0;
  // True once the environment refuses further interaction.
  virtual bool terminal() const { return false; }
};

// Observed always equals predicted.
class FaithfulEnvironment final : public Environment {
 public:
  State observe(const Operator&, const State&, const State& predicted) override {
    return predicted;
  }
};

struct Turn {
  std::size_t index = 0;
  std::string op;
  State predicted;
  State observed;
  Rational cost;
  Rational utility;
  Rational weight;        // gamma^index, global turn index
  Rational contribution;  // (utility - cost) * weight

  bool diverged() const { return predicted != observed; }
};

enum class EpisodeStatus { Completed, UserAbandoned, HorizonExhausted, Aborted };

std::string_view to_string(EpisodeStatus status);

struct Episode {
  std::vector<Turn> turns;
  // Sum of contributions, or sum of costs under MinCost.
  Rational realized_value;
  EpisodeStatus status = EpisodeStatus::Completed;
  std::string diagnostic;
  State final_state;
};

struct ReplanDecision {
  // Index into pr.operators(); nullopt means stop.
  std::optional<std::size_t> op;
  // Value of the suffix plan in global terms: the re-based optimum scaled by
  // gamma^global_offset. Zero when stopping by choice, nullopt if infeasible.
  std::optional<Rational> value;
};

// One planning step of the interleaved loop: the first operator of the
// optimal plan from s with `remaining` steps left. Solver refusals
// (LimitError) propagate.
ReplanDecision replan_step(const Problem& pr, const State& s, std::uint32_t remaining,
                           std::uint32_t global_offset, Algorithm algo,
                           const Limits& limits = {});

// Accounting for executing op at global turn position `index`.
Turn make_turn(const Problem& pr, std::size_t index, const Operator& op, const State& predicted,
               const State& observed);

// Status of an episode that stopped in s with `remaining` steps left:
// HorizonExhausted when the goal is unmet (MinCost) or when the horizon is
// spent while some applicable operator still has positive net benefit.
EpisodeStatus stop_status(const Problem& pr, const State& s, std::uint32_t remaining);

// Plan, execute the first step, observe, replan with the remaining horizon.
Episode run_episode(const Problem& pr, Environment& env, Algorithm algo,
                    const Limits& limits = {});

// One "turn ..." line per turn followed by an "end ..." trailer.
std::string transcript_text(const Episode& ep);
// {"turns": [...], "realized_value": "...", "status": "..."}
std::string transcript_json(const Episode& ep);

}  // namespace netbench
