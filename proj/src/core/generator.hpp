#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "model.hpp"

namespace netbench {

// Structural instance classes: all costs equal; all costs and all utilities
// equal; costs equal with utilities drawn per operator.
enum class InstanceClass { ConstantCost, ConstantUtilityAndCost, VaryingUtilityConstantCost };

std::string_view to_string(InstanceClass c);
std::optional<InstanceClass> parse_instance_class(std::string_view name);

struct GenClass {
  InstanceClass instance_class = InstanceClass::ConstantCost;
  std::uint32_t vars = 3;
  std::uint32_t dom = 3;
  std::uint32_t ops = 5;
  std::uint32_t k = 5;
  std::uint64_t seed = 0;
  // Default: MinCost with a one-variable goal for ConstantCost, NetBenefit
  // otherwise. Discounted instances use `gamma`.
  std::optional<ObjectiveKind> objective;
  Rational gamma{1, 2};
};

// Seeded pseudo-random instance. Operators touch one or two variables each.
// Throws std::invalid_argument on sizes outside 1..64 vars, 1..256 values,
// 1..10000 operators, 1..kMaxHorizon steps.
Problem gen_instance(const GenClass& g);

}  // namespace netbench
