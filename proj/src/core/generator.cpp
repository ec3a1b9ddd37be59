#include "generator.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace netbench {

std::string_view to_string(InstanceClass c) {
  switch (c) {
    case InstanceClass::ConstantCost: return "constant_cost";
    case InstanceClass::ConstantUtilityAndCost: return "constant_utility_and_cost";
    case InstanceClass::VaryingUtilityConstantCost: return "varying_utility_constant_cost";
  }
  return "?";
}

std::optional<InstanceClass> parse_instance_class(std::string_view name) {
  if (name == "constant_cost") return InstanceClass::ConstantCost;
  if (name == "constant_utility_and_cost") return InstanceClass::ConstantUtilityAndCost;
  if (name == "varying_utility_constant_cost") return InstanceClass::VaryingUtilityConstantCost;
  return std::nullopt;
}

Problem gen_instance(const GenClass& g) {
  if (g.vars < 1 || g.vars > 64) throw std::invalid_argument("vars must be in 1..64");
  if (g.dom < 1 || g.dom > 256) throw std::invalid_argument("dom must be in 1..256");
  if (g.ops < 1 || g.ops > 10000) throw std::invalid_argument("ops must be in 1..10000");
  if (g.k < 1 || g.k > kMaxHorizon) {
    throw std::invalid_argument("k must be in 1.." + std::to_string(kMaxHorizon));
  }

  // Raw engine output only: std distributions are not portable across
  // standard libraries, and output must be byte-identical per seed.
  std::mt19937_64 rng(g.seed);
  auto draw = [&](std::uint64_t n) { return static_cast<std::uint32_t>(rng() % n); };

  std::vector<VariableDef> vars;
  for (std::uint32_t i = 0; i < g.vars; ++i) {
    VariableDef v{"v" + std::to_string(i), {}};
    for (std::uint32_t j = 0; j < g.dom; ++j) v.domain.push_back("d" + std::to_string(j));
    vars.push_back(std::move(v));
  }

  std::vector<ValueIndex> s0;
  for (std::uint32_t i = 0; i < g.vars; ++i) s0.push_back(static_cast<ValueIndex>(draw(g.dom)));

  const Rational cost(1 + draw(3));
  const Rational shared_utility(draw(7));
  std::vector<Rational> utilities;
  for (std::uint32_t i = 0; i < g.ops; ++i) {
    utilities.push_back(g.instance_class == InstanceClass::ConstantUtilityAndCost
                            ? shared_utility
                            : Rational(draw(7)));
  }
  if (g.instance_class == InstanceClass::VaryingUtilityConstantCost && g.ops >= 2) {
    while (std::all_of(utilities.begin(), utilities.end(),
                       [&](const Rational& u) { return u == utilities.front(); })) {
      utilities.back() = Rational(draw(7));
    }
  }

  std::vector<Operator> ops;
  for (std::uint32_t i = 0; i < g.ops; ++i) {
    const std::uint32_t touched = 1 + draw(std::min<std::uint32_t>(2, g.vars));
    std::vector<VarIndex> chosen;
    while (chosen.size() < touched) {
      const VarIndex v = draw(g.vars);
      if (std::find(chosen.begin(), chosen.end(), v) == chosen.end()) chosen.push_back(v);
    }
    std::vector<Binding> pre;
    std::vector<Binding> eff;
    for (VarIndex v : chosen) {
      if (draw(2) == 0) pre.push_back({v, static_cast<ValueIndex>(draw(g.dom))});
      eff.push_back({v, static_cast<ValueIndex>(draw(g.dom))});
    }
    ops.push_back({"o" + std::to_string(i), PartialState(std::move(pre)),
                   PartialState(std::move(eff)), cost, utilities[i]});
  }

  const ObjectiveKind kind = g.objective.value_or(
      g.instance_class == InstanceClass::ConstantCost ? ObjectiveKind::MinCost
                                                      : ObjectiveKind::NetBenefit);
  Objective objective;
  switch (kind) {
    case ObjectiveKind::MinCost: {
      const VarIndex v = draw(g.vars);
      objective = Objective::min_cost(PartialState({{v, static_cast<ValueIndex>(draw(g.dom))}}));
      break;
    }
    case ObjectiveKind::NetBenefit: objective = Objective::net_benefit(); break;
    case ObjectiveKind::DiscountedNetBenefit: objective = Objective::discounted(g.gamma); break;
  }

  return Problem("gen_" + std::string(to_string(g.instance_class)) + "_" + std::to_string(g.seed),
                 std::move(vars), std::move(ops), State(std::move(s0)), g.k, std::move(objective));
}

}  // namespace netbench
