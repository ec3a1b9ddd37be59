#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "limits.hpp"
#include "model.hpp"

namespace netbench {

enum class Algorithm { Brute, Dp, Bnb };

std::string_view to_string(Algorithm algo);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct SolveResult {
  // False only for MinCost when no plan within the horizon reaches the goal.
  bool feasible = true;
  Rational optimal_value;
  Plan plan;
  std::uint64_t nodes_expanded = 0;
  std::string algorithm;
  // MinCost without a goal: the empty plan is trivially optimal.
  bool degenerate = false;
};

struct ParetoPoint {
  Rational cost;
  Rational utility;
  Plan plan;
};

// Non-dominated (cost, utility) outcomes, ascending cost.
struct ParetoFront {
  std::vector<ParetoPoint> points;
};

// Tie-break shared by every solver: better objective value first, then the
// shorter plan, then the lexicographically smaller operator-name sequence.
// Returns true when (value_a, plan_a) is strictly preferred.
bool preferred(const Objective& objective, const Rational& value_a, const Plan& plan_a,
               const Rational& value_b, const Plan& plan_b);

// Exhaustive depth-first enumeration of every valid plan. Throws LimitError
// when sum_{d=0..k} |O|^d exceeds limits.brute_plans. With parallel set, root
// branches are explored on separate threads; the result is identical.
SolveResult solve_brute(const Problem& pr, const Limits& limits = {}, bool parallel = false);
SolveResult solve_brute(const Problem& pr, const State& start, std::uint32_t horizon,
                        const Limits& limits = {}, bool parallel = false);

// Backward induction over the reachable (state, remaining-steps) table.
// Throws LimitError when states x (k + 1) exceeds limits.dp_cells.
SolveResult solve_dp(const Problem& pr, const Limits& limits = {});
SolveResult solve_dp(const Problem& pr, const State& start, std::uint32_t horizon,
                     const Limits& limits = {});

// Depth-first branch-and-bound with admissible, precondition-free bounds and
// (state, depth) dominance memo. No size guard.
SolveResult solve_bnb(const Problem& pr);
SolveResult solve_bnb(const Problem& pr, const State& start, std::uint32_t horizon);

SolveResult solve(const Problem& pr, Algorithm algo, const Limits& limits = {});
SolveResult solve(const Problem& pr, const State& start, std::uint32_t horizon, Algorithm algo,
                  const Limits& limits = {});

// Exact Pareto front by per-cell dominance-pruned DP. Same guard as solve_dp.
ParetoFront pareto_front(const Problem& pr, const Limits& limits = {});

// The table solve_dp builds, exposed for inspection. value(s, d) is the
// optimal re-based value from s with d steps left; nullopt when (s, d) is
// outside the table or (MinCost) infeasible. The table covers (s, d) when s
// is reachable in at most k - d steps.
class ValueTable {
 public:
  ValueTable(const Problem& pr, const Limits& limits = {});

  std::optional<Rational> value(const State& s, std::uint32_t remaining) const;
  bool covers(const State& s, std::uint32_t remaining) const;
  std::size_t state_count() const;
  const std::vector<State>& states() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace netbench
