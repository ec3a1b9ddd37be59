#include <doctest.h>

#include <json.hpp>
#include <random>

#include "dialog.hpp"
#include "exec.hpp"
#include "oracle.hpp"
#include "random_problem.hpp"

using namespace netbench;

namespace {

Problem two_op(Objective obj = Objective::net_benefit(), std::uint32_t k = 3) {
  std::vector<VariableDef> vars{{"x", {"0", "1"}}};
  std::vector<Operator> ops{
      {"a", PartialState({{0, 0}}), PartialState({{0, 1}}), 1, 3},
      {"b", PartialState({{0, 1}}), PartialState({{0, 0}}), 1, 1},
  };
  return Problem("two_op", vars, ops, State({0}), k, std::move(obj));
}

const Algorithm kAll[] = {Algorithm::Dp, Algorithm::Bnb, Algorithm::Brute};

// Jumps to a random state after every step.
class ChaosEnvironment final : public Environment {
 public:
  ChaosEnvironment(const Problem& p, std::uint64_t seed) : p_(p), rng_(seed) {}
  State observe(const Operator&, const State&, const State& predicted) override {
    if (rng_() % 2) return predicted;
    State s = predicted;
    for (VarIndex v = 0; v < s.size(); ++v) {
      s[v] = static_cast<ValueIndex>(rng_() % p_.variables()[v].domain.size());
    }
    return s;
  }

 private:
  const Problem& p_;
  std::mt19937_64 rng_;
};

class BrokenEnvironment final : public Environment {
 public:
  State observe(const Operator&, const State&, const State&) override { return State({7, 7}); }
};

}  // namespace

TEST_CASE("property: faithful episodes realize the open-loop optimum") {
  std::mt19937_64 rng(17);
  int feasible = 0;
  for (int i = 0; i < 150; ++i) {
    const Problem p = gen::random_problem(rng);
    const auto want = oracle::optimum(p);
    for (Algorithm a : kAll) {
      FaithfulEnvironment env;
      const Episode ep = run_episode(p, env, a);
      if (!want.feasible) {
        CHECK(ep.turns.empty());
        CHECK(ep.status == EpisodeStatus::HorizonExhausted);
        continue;
      }
      CHECK(ep.realized_value == want.value);
      std::vector<std::string> ops;
      for (const auto& t : ep.turns) {
        ops.push_back(t.op);
        CHECK_FALSE(t.diverged());
      }
      CHECK(ops == want.plan);
      CHECK(ep.status != EpisodeStatus::Aborted);
      CHECK(ep.status != EpisodeStatus::UserAbandoned);
    }
    feasible += want.feasible;
  }
  CHECK(feasible >= 100);
}

TEST_CASE("property: chaotic environments keep accounting consistent") {
  std::mt19937_64 rng(18);
  for (int i = 0; i < 150; ++i) {
    const Problem p = gen::random_problem(rng);
    ChaosEnvironment env(p, i);
    const Episode ep = run_episode(p, env, Algorithm::Dp);
    CHECK(ep.turns.size() <= p.horizon());
    Rational total;
    State s = p.initial();
    for (const auto& t : ep.turns) {
      const Operator& op = p.operators()[*p.find_operator(t.op)];
      REQUIRE(applicable(op, s));
      CHECK(t.predicted == apply(op, s));
      CHECK(t.weight == p.objective().step_discount().pow(static_cast<unsigned>(t.index)));
      total += p.objective().kind == ObjectiveKind::MinCost ? t.cost : t.contribution;
      s = t.observed;
    }
    CHECK(total == ep.realized_value);
    CHECK(s == ep.final_state);
  }
}

TEST_CASE("divergent water users still realize six") {
  const DialogSpec ds = *builtin_dialog("water");
  const Problem p = compile_dialog(ds);
  for (const char* loc : {"cityA", "cityB"}) {
    for (const char* purpose : {"drink", "irrigate"}) {
      SimUser su;
      su.script = {{"location", loc}, {"purpose", purpose}};
      auto env = make_sim_env(ds, su);
      const Episode ep = run_episode(p, *env, Algorithm::Dp);
      CHECK(ep.realized_value == Rational(6));
      CHECK(ep.status == EpisodeStatus::Completed);
      REQUIRE(ep.turns.size() == 4);
      CHECK(ep.turns[0].diverged() == (std::string(loc) != "cityA"));
      CHECK(ep.turns[1].diverged() == (std::string(purpose) != "drink"));
      CHECK(ep.turns[2].op == run_operator("waterdata", {loc, purpose}));
      CHECK(ep.turns[3].op == "advise_advise");
    }
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SimUser su;
    su.seed = seed;
    auto env = make_sim_env(ds, su);
    CHECK(run_episode(p, *env, Algorithm::Bnb).realized_value == Rational(6));
  }
}

TEST_CASE("discounted water realizes the discounted optimum") {
  DialogSpec ds = *builtin_dialog("water");
  ds.discount = Rational(9, 10);
  SimUser su;
  su.script = {{"location", "cityB"}};
  auto env = make_sim_env(ds, su);
  const Episode ep = run_episode(compile_dialog(ds), *env, Algorithm::Dp);
  CHECK(ep.realized_value == Rational(377, 100));
  CHECK(ep.turns[3].weight == Rational(729, 1000));
}

TEST_CASE("a user who leaves ends the episode") {
  const DialogSpec ds = *builtin_dialog("water");
  SimUser su;
  su.patience = 1;
  auto env = make_sim_env(ds, su);
  const Episode ep = run_episode(compile_dialog(ds), *env, Algorithm::Dp);
  CHECK(ep.status == EpisodeStatus::UserAbandoned);
  CHECK(ep.turns.size() == 1);
  CHECK(ep.realized_value == Rational(-1));
}

TEST_CASE("horizon exhausted while value remains") {
  std::vector<VariableDef> vars{{"x", {"0"}}};
  std::vector<Operator> ops{{"a", {}, {}, 1, 2}};
  const Problem p("p", vars, ops, State({0}), 2, Objective::net_benefit());
  FaithfulEnvironment env;
  const Episode ep = run_episode(p, env, Algorithm::Dp);
  CHECK(ep.status == EpisodeStatus::HorizonExhausted);
  CHECK(ep.realized_value == Rational(2));

  FaithfulEnvironment env2;
  CHECK(run_episode(two_op(), env2, Algorithm::Dp).status == EpisodeStatus::Completed);
}

TEST_CASE("an ill-formed observation aborts with a diagnostic") {
  BrokenEnvironment env;
  const Episode ep = run_episode(two_op(), env, Algorithm::Dp);
  CHECK(ep.status == EpisodeStatus::Aborted);
  CHECK(ep.turns.empty());
  CHECK(ep.diagnostic.find("ill-formed") != std::string::npos);
  const auto doc = nlohmann::json::parse(transcript_json(ep));
  CHECK(doc["status"] == "aborted");
  CHECK(doc.contains("diagnostic"));
}

TEST_CASE("replanning scales by the global turn offset") {
  const Problem p = two_op(Objective::discounted(Rational(1, 2)));
  const ReplanDecision d = replan_step(p, State({1}), 2, 1, Algorithm::Dp);
  REQUIRE(d.op);
  CHECK(p.operators()[*d.op].name == "b");
  CHECK(*d.value == Rational(1, 2));
  const ReplanDecision done = replan_step(p, State({1}), 0, 3, Algorithm::Dp);
  CHECK_FALSE(done.op);
  CHECK(*done.value == Rational(0));
  const Problem mc = two_op(Objective::min_cost(PartialState({{0, 1}})));
  CHECK_FALSE(replan_step(mc, State({0}), 0, 0, Algorithm::Dp).value);
}

TEST_CASE("transcript formats") {
  FaithfulEnvironment env;
  const Episode ep = run_episode(two_op(Objective::discounted(Rational(1, 2))), env, Algorithm::Dp);
  CHECK(transcript_text(ep) ==
        "turn index=0 op=a cost=1 utility=3 weight=1 contribution=2 diverged=no\n"
        "turn index=1 op=b cost=1 utility=1 weight=1/2 contribution=0 diverged=no\n"
        "turn index=2 op=a cost=1 utility=3 weight=1/4 contribution=1/2 diverged=no\n"
        "end realized_value=5/2 status=completed\n");
  const auto doc = nlohmann::json::parse(transcript_json(ep));
  CHECK(doc["realized_value"] == "5/2");
  CHECK(doc["turns"].size() == 3);
  CHECK(doc["turns"][2]["weight"] == "1/4");
  CHECK_FALSE(doc.contains("diagnostic"));
}
