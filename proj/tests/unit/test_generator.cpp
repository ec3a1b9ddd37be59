#include <doctest.h>

#include <set>

#include "generator.hpp"
#include "textio.hpp"

using namespace netbench;

namespace {

GenClass make(InstanceClass c, std::uint64_t seed) {
  GenClass g;
  g.instance_class = c;
  g.seed = seed;
  return g;
}

}  // namespace

TEST_CASE("same seed, same instance") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const GenClass g = make(InstanceClass::VaryingUtilityConstantCost, seed);
    CHECK(serialize_problem(gen_instance(g)) == serialize_problem(gen_instance(g)));
  }
  CHECK(serialize_problem(gen_instance(make(InstanceClass::ConstantCost, 1))) !=
        serialize_problem(gen_instance(make(InstanceClass::ConstantCost, 2))));
}

TEST_CASE("instance classes hold their defining property") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    for (auto c : {InstanceClass::ConstantCost, InstanceClass::ConstantUtilityAndCost,
                   InstanceClass::VaryingUtilityConstantCost}) {
      const Problem p = gen_instance(make(c, seed));
      std::set<Rational> costs, utilities;
      for (const auto& o : p.operators()) {
        costs.insert(o.cost);
        utilities.insert(o.utility);
        CHECK_FALSE(o.eff.empty());
        CHECK(o.eff.size() <= 2);
      }
      CHECK(costs.size() == 1);
      if (c == InstanceClass::ConstantUtilityAndCost) CHECK(utilities.size() == 1);
      if (c == InstanceClass::VaryingUtilityConstantCost) CHECK(utilities.size() >= 2);
      CHECK(p.objective().kind == (c == InstanceClass::ConstantCost ? ObjectiveKind::MinCost
                                                                     : ObjectiveKind::NetBenefit));
    }
  }
}

TEST_CASE("sizes and objective override") {
  GenClass g;
  g.vars = 5;
  g.dom = 4;
  g.ops = 12;
  g.k = 7;
  g.objective = ObjectiveKind::DiscountedNetBenefit;
  g.gamma = Rational(2, 3);
  const Problem p = gen_instance(g);
  CHECK(p.variables().size() == 5);
  CHECK(p.variables()[0].domain.size() == 4);
  CHECK(p.operators().size() == 12);
  CHECK(p.horizon() == 7);
  CHECK(p.objective().gamma == Rational(2, 3));

  g.vars = 1;
  g.ops = 1;
  CHECK_NOTHROW(gen_instance(g));
  for (auto edit : {+[](GenClass& x) { x.vars = 0; }, +[](GenClass& x) { x.dom = 0; },
                    +[](GenClass& x) { x.ops = 0; }, +[](GenClass& x) { x.k = 0; },
                    +[](GenClass& x) { x.vars = 65; }, +[](GenClass& x) { x.k = kMaxHorizon + 1; }}) {
    GenClass bad;
    edit(bad);
    CHECK_THROWS_AS(gen_instance(bad), std::invalid_argument);
  }
}

TEST_CASE("class names") {
  CHECK(parse_instance_class("constant_cost") == InstanceClass::ConstantCost);
  CHECK(to_string(InstanceClass::ConstantUtilityAndCost) == "constant_utility_and_cost");
  CHECK_FALSE(parse_instance_class("random"));
}
