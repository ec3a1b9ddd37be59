#include "model.hpp"

#include <algorithm>
#include <unordered_set>

namespace netbench {

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw ModelError(ModelError::Kind::Validation, message);
}

bool is_word_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-';
}

void check_partial(const std::vector<VariableDef>& vars, const PartialState& p,
                   std::string_view what) {
  for (const auto& b : p.bindings()) {
    if (b.var >= vars.size()) invalid(std::string(what) + ": variable index out of range");
    if (b.value >= vars[b.var].domain.size()) {
      invalid(std::string(what) + ": value out of domain of variable " + vars[b.var].name);
    }
  }
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  const char c = s.front();
  if (!((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_')) return false;
  return std::all_of(s.begin(), s.end(), is_word_char);
}

bool is_value_word(std::string_view s) {
  return !s.empty() && s.front() != '-' && std::all_of(s.begin(), s.end(), is_word_char);
}

PartialState::PartialState(std::vector<Binding> bindings) : bindings_(std::move(bindings)) {
  std::sort(bindings_.begin(), bindings_.end(),
            [](const Binding& a, const Binding& b) { return a.var < b.var; });
  for (std::size_t i = 1; i < bindings_.size(); ++i) {
    if (bindings_[i].var == bindings_[i - 1].var) invalid("variable bound twice in partial state");
  }
}

std::optional<ValueIndex> PartialState::get(VarIndex var) const {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), var,
                             [](const Binding& b, VarIndex v) { return b.var < v; });
  if (it == bindings_.end() || it->var != var) return std::nullopt;
  return it->value;
}

std::size_t StateHash::operator()(const State& s) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (ValueIndex v : s.values()) {
    h ^= v;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::MinCost: return "mincost";
    case ObjectiveKind::NetBenefit: return "netbenefit";
    case ObjectiveKind::DiscountedNetBenefit: return "discounted";
  }
  return "?";
}

Objective Objective::min_cost(std::optional<PartialState> goal) {
  Objective o;
  o.kind = ObjectiveKind::MinCost;
  o.goal = std::move(goal);
  return o;
}

Objective Objective::net_benefit() { return Objective{}; }

Objective Objective::discounted(Rational gamma) {
  Objective o;
  o.kind = ObjectiveKind::DiscountedNetBenefit;
  o.gamma = std::move(gamma);
  return o;
}

Problem::Problem(std::string name, std::vector<VariableDef> variables,
                 std::vector<Operator> operators, State initial, std::uint32_t horizon,
                 Objective objective)
    : name_(std::move(name)),
      variables_(std::move(variables)),
      operators_(std::move(operators)),
      initial_(std::move(initial)),
      horizon_(horizon),
      objective_(std::move(objective)) {
  if (!is_identifier(name_)) invalid("invalid problem name '" + name_ + "'");

  std::unordered_set<std::string> seen;
  for (const auto& v : variables_) {
    if (!is_identifier(v.name)) invalid("invalid variable name '" + v.name + "'");
    if (!seen.insert(v.name).second) invalid("duplicate variable " + v.name);
    if (v.domain.empty()) invalid("variable " + v.name + " has an empty domain");
    if (v.domain.size() > 0xFFFF) invalid("domain of variable " + v.name + " too large");
    std::unordered_set<std::string> values;
    for (const auto& val : v.domain) {
      if (!is_value_word(val)) invalid("invalid value '" + val + "' in variable " + v.name);
      if (!values.insert(val).second) invalid("duplicate value " + val + " in variable " + v.name);
    }
  }

  std::sort(operators_.begin(), operators_.end(),
            [](const Operator& a, const Operator& b) { return a.name < b.name; });
  for (std::size_t i = 0; i < operators_.size(); ++i) {
    const auto& o = operators_[i];
    if (!is_identifier(o.name)) invalid("invalid operator name '" + o.name + "'");
    if (i > 0 && operators_[i - 1].name == o.name) invalid("duplicate operator " + o.name);
    check_partial(variables_, o.pre, "precondition of " + o.name);
    check_partial(variables_, o.eff, "effect of " + o.name);
    if (o.cost.sign() < 0) invalid("negative cost in operator " + o.name);
    if (o.utility.sign() < 0) invalid("negative utility in operator " + o.name);
  }

  check_state(initial_);
  if (horizon_ < 1) invalid("horizon must be positive");
  if (horizon_ > kMaxHorizon) invalid("horizon exceeds " + std::to_string(kMaxHorizon));

  if (objective_.kind == ObjectiveKind::DiscountedNetBenefit) {
    if (objective_.gamma.sign() <= 0 || objective_.gamma > Rational(1)) {
      invalid("discount must be in (0, 1]");
    }
  } else if (objective_.gamma != Rational(1)) {
    invalid("discount given for an undiscounted objective");
  }
  if (objective_.goal && objective_.goal->empty()) objective_.goal.reset();
  if (objective_.goal) {
    if (objective_.kind != ObjectiveKind::MinCost) invalid("goal given for a non-mincost objective");
    check_partial(variables_, *objective_.goal, "goal");
  }
}

std::optional<VarIndex> Problem::find_variable(std::string_view name) const {
  for (VarIndex i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<ValueIndex> Problem::find_value(VarIndex var, std::string_view value) const {
  const auto& dom = variables_.at(var).domain;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (dom[i] == value) return static_cast<ValueIndex>(i);
  }
  return std::nullopt;
}

std::optional<std::size_t> Problem::find_operator(std::string_view name) const {
  auto it = std::lower_bound(operators_.begin(), operators_.end(), name,
                             [](const Operator& o, std::string_view n) { return o.name < n; });
  if (it == operators_.end() || it->name != name) return std::nullopt;
  return static_cast<std::size_t>(it - operators_.begin());
}

PartialState Problem::partial(
    const std::vector<std::pair<std::string, std::string>>& bindings) const {
  std::vector<Binding> out;
  out.reserve(bindings.size());
  for (const auto& [var, val] : bindings) {
    auto vi = find_variable(var);
    if (!vi) invalid("unknown variable " + var);
    auto xi = find_value(*vi, val);
    if (!xi) invalid("value " + val + " not in domain of " + var);
    out.push_back({*vi, *xi});
  }
  return PartialState(std::move(out));
}

State Problem::state(const std::vector<std::pair<std::string, std::string>>& bindings) const {
  PartialState p = partial(bindings);
  if (p.size() != variables_.size()) invalid("state must bind every variable exactly once");
  std::vector<ValueIndex> values;
  values.reserve(p.size());
  for (const auto& b : p.bindings()) values.push_back(b.value);
  return State(std::move(values));
}

void Problem::check_state(const State& s) const {
  if (s.size() != variables_.size()) invalid("state is not total over the variables");
  for (VarIndex i = 0; i < s.size(); ++i) {
    if (s[i] >= variables_[i].domain.size()) {
      invalid("state value out of domain of variable " + variables_[i].name);
    }
  }
}

Problem Problem::with_objective(Objective objective) const {
  return Problem(name_, variables_, operators_, initial_, horizon_, std::move(objective));
}

Problem Problem::with_start(State initial, std::uint32_t horizon) const {
  return Problem(name_, variables_, operators_, std::move(initial), horizon, objective_);
}

bool consistent(const PartialState& p, const State& s) {
  for (const auto& b : p.bindings()) {
    if (s[b.var] != b.value) return false;
  }
  return true;
}

bool consistent(const Problem& pr, const std::vector<std::pair<std::string, std::string>>& p,
                const State& s) {
  pr.check_state(s);
  return consistent(pr.partial(p), s);
}

bool applicable(const Operator& o, const State& s) { return consistent(o.pre, s); }

State apply(const Operator& o, const State& s) {
  if (!applicable(o, s)) {
    throw ModelError(ModelError::Kind::Precondition, "operator " + o.name + " is not applicable");
  }
  State out = s;
  for (const auto& b : o.eff.bindings()) out[b.var] = b.value;
  return out;
}

PlanEval validate_plan(const Problem& pr, const Plan& pl) {
  if (pl.size() > pr.horizon()) {
    throw ModelError(ModelError::Kind::HorizonExceeded,
                     "plan has " + std::to_string(pl.size()) + " steps, horizon is " +
                         std::to_string(pr.horizon()));
  }
  const Rational gamma = pr.objective().step_discount();
  PlanEval ev{0, 0, 0, 0, pr.initial()};
  Rational weight(1);
  for (std::size_t i = 0; i < pl.size(); ++i) {
    auto idx = pr.find_operator(pl.steps[i]);
    if (!idx) {
      throw ModelError(ModelError::Kind::UnknownOperator, "unknown operator " + pl.steps[i], i);
    }
    const Operator& o = pr.operators()[*idx];
    if (!applicable(o, ev.final_state)) {
      throw ModelError(ModelError::Kind::InvalidAtStep,
                       "step " + std::to_string(i) + " (" + o.name + ") is not applicable", i);
    }
    ev.final_state = apply(o, ev.final_state);
    ev.total_cost += o.cost;
    ev.total_utility += o.utility;
    ev.discounted_net += o.net() * weight;
    weight *= gamma;
  }
  ev.net_benefit = ev.total_utility - ev.total_cost;
  return ev;
}

PlanEval evaluate_plan(const Problem& pr, const Plan& pl) { return validate_plan(pr, pl); }

Rational objective_value(const Objective& objective, const PlanEval& eval) {
  switch (objective.kind) {
    case ObjectiveKind::MinCost: return eval.total_cost;
    case ObjectiveKind::NetBenefit: return eval.net_benefit;
    case ObjectiveKind::DiscountedNetBenefit: return eval.discounted_net;
  }
  return eval.net_benefit;
}

}  // namespace netbench
