#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace netbench {

using VarIndex = std::uint32_t;
using ValueIndex = std::uint16_t;

// Largest accepted horizon. Solvers recurse once per plan step.
inline constexpr std::uint32_t kMaxHorizon = 10000;

class ModelError : public std::runtime_error {
 public:
  enum class Kind { Validation, Precondition, HorizonExceeded, InvalidAtStep, UnknownOperator };

  ModelError(Kind kind, const std::string& message, std::size_t step = 0)
      : std::runtime_error(message), kind_(kind), step_(step) {}

  Kind kind() const { return kind_; }
  // Plan position for InvalidAtStep; 0 otherwise.
  std::size_t step() const { return step_; }

 private:
  Kind kind_;
  std::size_t step_;
};

struct VariableDef {
  std::string name;
  std::vector<std::string> domain;

  friend bool operator==(const VariableDef&, const VariableDef&) = default;
};

struct Binding {
  VarIndex var;
  ValueIndex value;

  friend bool operator==(const Binding&, const Binding&) = default;
};

// Assignment to a subset of the variables, kept sorted by variable index.
class PartialState {
 public:
  PartialState() = default;
  // Throws ModelError(Validation) when the same variable is bound twice.
  explicit PartialState(std::vector<Binding> bindings);

  const std::vector<Binding>& bindings() const { return bindings_; }
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  std::optional<ValueIndex> get(VarIndex var) const;

  friend bool operator==(const PartialState&, const PartialState&) = default;

 private:
  std::vector<Binding> bindings_;
};

// Complete assignment; one value per variable in declaration order.
class State {
 public:
  State() = default;
  explicit State(std::vector<ValueIndex> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  ValueIndex operator[](VarIndex var) const { return values_[var]; }
  ValueIndex& operator[](VarIndex var) { return values_[var]; }
  const std::vector<ValueIndex>& values() const { return values_; }

  friend bool operator==(const State&, const State&) = default;
  friend auto operator<=>(const State&, const State&) = default;

 private:
  std::vector<ValueIndex> values_;
};

struct StateHash {
  std::size_t operator()(const State& s) const noexcept;
};

struct Operator {
  std::string name;
  PartialState pre;
  PartialState eff;
  Rational cost;
  Rational utility;

  Rational net() const { return utility - cost; }

  friend bool operator==(const Operator&, const Operator&) = default;
};

enum class ObjectiveKind { MinCost, NetBenefit, DiscountedNetBenefit };

std::string_view to_string(ObjectiveKind kind);

struct Objective {
  ObjectiveKind kind = ObjectiveKind::NetBenefit;
  std::optional<PartialState> goal;  // MinCost only
  Rational gamma{1};                 // != 1 only for DiscountedNetBenefit

  static Objective min_cost(std::optional<PartialState> goal = std::nullopt);
  static Objective net_benefit();
  static Objective discounted(Rational gamma);

  bool maximizes() const { return kind != ObjectiveKind::MinCost; }
  // Discount applied per step; 1 unless discounted.
  Rational step_discount() const {
    return kind == ObjectiveKind::DiscountedNetBenefit ? gamma : Rational(1);
  }

  friend bool operator==(const Objective&, const Objective&) = default;
};

// The bounded-length planning problem (variables, operators, initial state,
// horizon) together with the objective under which plans are compared.
//
// Construction validates every structural invariant and throws
// ModelError(Validation) on the first violation. Operators are stored sorted
// by name, which is also the tie-break order used by every solver.
class Problem {
 public:
  Problem(std::string name, std::vector<VariableDef> variables, std::vector<Operator> operators,
          State initial, std::uint32_t horizon, Objective objective);

  const std::string& name() const { return name_; }
  const std::vector<VariableDef>& variables() const { return variables_; }
  const std::vector<Operator>& operators() const { return operators_; }
  const State& initial() const { return initial_; }
  std::uint32_t horizon() const { return horizon_; }
  const Objective& objective() const { return objective_; }

  std::optional<VarIndex> find_variable(std::string_view name) const;
  std::optional<ValueIndex> find_value(VarIndex var, std::string_view value) const;
  std::optional<std::size_t> find_operator(std::string_view name) const;

  // Name-level builders; throw ModelError(Validation) on unknown names.
  PartialState partial(const std::vector<std::pair<std::string, std::string>>& bindings) const;
  State state(const std::vector<std::pair<std::string, std::string>>& bindings) const;

  // Throws ModelError(Validation) unless s is total and within domains.
  void check_state(const State& s) const;

  const std::string& value_name(VarIndex var, ValueIndex value) const {
    return variables_[var].domain[value];
  }

  // Same structure, different objective or start. Revalidates.
  Problem with_objective(Objective objective) const;
  Problem with_start(State initial, std::uint32_t horizon) const;

  friend bool operator==(const Problem&, const Problem&) = default;

 private:
  std::string name_;
  std::vector<VariableDef> variables_;
  std::vector<Operator> operators_;
  State initial_;
  std::uint32_t horizon_;
  Objective objective_;
};

struct Plan {
  std::vector<std::string> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }

  friend bool operator==(const Plan&, const Plan&) = default;
};

struct PlanEval {
  Rational total_cost;
  Rational total_utility;
  Rational net_benefit;
  Rational discounted_net;
  State final_state;
};

bool consistent(const PartialState& p, const State& s);
// Name-level check. Throws ModelError(Validation) on an unknown variable or
// out-of-domain value in p.
bool consistent(const Problem& pr, const std::vector<std::pair<std::string, std::string>>& p,
                const State& s);

bool applicable(const Operator& o, const State& s);

// Throws ModelError(Precondition) if o is not applicable in s.
State apply(const Operator& o, const State& s);

// Checks horizon, name resolution and step-by-step applicability, then
// evaluates. Throws ModelError(HorizonExceeded | UnknownOperator |
// InvalidAtStep).
PlanEval validate_plan(const Problem& pr, const Plan& pl);

// Same contract as validate_plan; the discount exponent is the 0-based step.
PlanEval evaluate_plan(const Problem& pr, const Plan& pl);

// Objective value of an evaluated plan: total cost for MinCost, net benefit,
// or discounted net benefit.
Rational objective_value(const Objective& objective, const PlanEval& eval);

bool is_identifier(std::string_view s);
bool is_value_word(std::string_view s);

}  // namespace netbench
