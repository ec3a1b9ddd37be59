#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "dialog.hpp"
#include "oracle.hpp"
#include "random_problem.hpp"
#include "search.hpp"

using namespace netbench;

namespace {

DialogSpec water(std::uint32_t turns = 4, std::optional<Rational> discount = std::nullopt) {
  DialogSpec ds = *builtin_dialog("water");
  ds.max_turns = turns;
  ds.discount = discount;
  return ds;
}

// Asks precede the runs that read them and runs precede the advice.
void check_ordering(const DialogSpec& ds, const Plan& plan) {
  std::set<std::string> asked, ran;
  for (const auto& step : plan.steps) {
    const auto act = classify_operator(ds, step);
    REQUIRE(act);
    switch (act->kind) {
      case DialogAct::Kind::Ask:
        CHECK(asked.insert(act->element).second);
        break;
      case DialogAct::Kind::Run:
        for (const auto& s : ds.find_query(act->element)->required_slots) CHECK(asked.count(s));
        CHECK(ran.insert(act->element).second);
        break;
      case DialogAct::Kind::Advise:
        for (const auto& q : ds.find_advisory(act->element)->required_queries) CHECK(ran.count(q));
        break;
    }
  }
}

}  // namespace

TEST_CASE("water compiles to the expected structure") {
  const Problem p = compile_dialog(water());
  CHECK(p.variables().size() == 4);
  CHECK(p.variables()[0].name == "slot_location");
  CHECK(p.variables()[0].domain == std::vector<std::string>{"unknown", "cityA", "cityB"});
  CHECK(p.find_variable("done_waterdata"));
  CHECK(p.find_variable("given_advise"));
  CHECK(p.operators().size() == compiled_operator_count(water()));
  CHECK(p.operators().size() == 7);
  CHECK(p.find_operator("run_waterdata__cityB__irrigate"));
  CHECK(p.find_operator("ask_purpose"));
  CHECK(p.find_operator("advise_advise"));
  CHECK(p.objective().kind == ObjectiveKind::NetBenefit);
  CHECK(p.horizon() == 4);
}

TEST_CASE("water optimum by enumeration") {
  const struct {
    std::uint32_t turns;
    std::optional<Rational> discount;
    Rational want;
  } cases[] = {{4, std::nullopt, Rational(6)},
               {3, std::nullopt, Rational(0)},
               {4, Rational(9, 10), Rational(377, 100)}};
  for (const auto& c : cases) {
    const Problem p = compile_dialog(water(c.turns, c.discount));
    const auto o = oracle::optimum(p);
    CHECK(o.value == c.want);
    for (Algorithm a : {Algorithm::Dp, Algorithm::Bnb, Algorithm::Brute}) {
      const SolveResult r = solve(p, a);
      CHECK(r.optimal_value == c.want);
      CHECK(r.plan.steps == o.plan);
      check_ordering(water(), r.plan);
    }
  }
  const auto plan = solve_dp(compile_dialog(water())).plan.steps;
  CHECK(plan == std::vector<std::string>{"ask_location", "ask_purpose",
                                         "run_waterdata__cityA__drink", "advise_advise"});
}

TEST_CASE("property: optimal plans of random dialogs respect the ordering") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    const DialogSpec ds = gen::random_dialog(rng);
    const Problem p = compile_dialog(ds);
    CHECK(p.operators().size() == compiled_operator_count(ds));
    const auto o = oracle::optimum(p);
    for (Algorithm a : {Algorithm::Dp, Algorithm::Bnb, Algorithm::Brute}) {
      SolveResult r;
      try {
        r = solve(p, a);
      } catch (const LimitError&) {
        // Brute force refuses wide compilations; the oracle walks valid plans only.
        CHECK(a == Algorithm::Brute);
        continue;
      }
      CHECK(r.optimal_value == o.value);
      check_ordering(ds, r.plan);
    }
  }
}

TEST_CASE("allstop is best left unsaid") {
  const Problem p = compile_dialog(*builtin_dialog("allstop"));
  const SolveResult r = solve_dp(p);
  CHECK(r.optimal_value == Rational(0));
  CHECK(r.plan.empty());
  CHECK(builtin_dialog_names() == std::vector<std::string>{"allstop", "water"});
  CHECK_FALSE(builtin_dialog("nope"));
}

TEST_CASE("operator limit refuses large compilations") {
  DialogSpec ds = water();
  Limits l;
  l.compile_ops = 6;
  CHECK_THROWS_AS(compile_dialog(ds, l), LimitError);
  l.compile_ops = 7;
  CHECK_NOTHROW(compile_dialog(ds, l));

  DialogSpec wide;
  wide.name = "wide";
  Query q{"q", {}, 0, 1};
  for (int i = 0; i < 20; ++i) {
    Slot s{"s" + std::to_string(i), "?", {"a", "b", "c", "d"}, "a", 1};
    q.required_slots.push_back(s.name);
    wide.slots.push_back(s);
  }
  wide.queries.push_back(q);
  CHECK(compiled_operator_count(wide) == 20 + (1ULL << 40));
  CHECK_THROWS_AS(compile_dialog(wide), LimitError);
}

TEST_CASE("dialog validation") {
  auto rejects = [](auto edit) {
    DialogSpec ds = *builtin_dialog("water");
    edit(ds);
    CHECK_THROWS_AS(validate_dialog(ds), ModelError);
  };
  rejects([](DialogSpec& d) { d.max_turns = 0; });
  rejects([](DialogSpec& d) { d.discount = Rational(0); });
  rejects([](DialogSpec& d) { d.slots[0].answers.push_back("unknown"); });
  rejects([](DialogSpec& d) { d.slots[0].answers.push_back("cityA"); });
  rejects([](DialogSpec& d) { d.slots[0].default_answer = "cityC"; });
  rejects([](DialogSpec& d) { d.slots[0].answers.clear(); });
  rejects([](DialogSpec& d) { d.slots[1].name = "location"; });
  rejects([](DialogSpec& d) { d.queries[0].name = "location"; });
  rejects([](DialogSpec& d) { d.queries[0].required_slots = {"nowhere"}; });
  rejects([](DialogSpec& d) { d.queries[0].required_slots.clear(); });
  rejects([](DialogSpec& d) { d.queries[0].run_cost = -1; });
  rejects([](DialogSpec& d) { d.advisories[0].required_queries = {"nothing"}; });
  rejects([](DialogSpec& d) { d.advisories[0].message_template = "In {town}."; });
  rejects([](DialogSpec& d) { d.advisories[0].message_template = "In {location."; });
  rejects([](DialogSpec& d) { d.slots[0].prompt = std::string("a\x01"); });
  CHECK_NOTHROW(validate_dialog(*builtin_dialog("water")));
}

TEST_CASE("templates") {
  CHECK(template_placeholders("{a} and {b}{a}") == std::vector<std::string>{"a", "b", "a"});
  CHECK(template_placeholders("none").empty());
  CHECK_THROWS_AS(template_placeholders("{}"), ModelError);
  CHECK(render_template("In {location} for {purpose}.", {{"location", "cityB"}}) ==
        "In cityB for unknown.");
}

TEST_CASE("operator classification and slot bindings") {
  const DialogSpec ds = water();
  const Problem p = compile_dialog(ds);
  CHECK(classify_operator(ds, "ask_location")->kind == DialogAct::Kind::Ask);
  CHECK(classify_operator(ds, "run_waterdata__cityA__drink")->element == "waterdata");
  CHECK(classify_operator(ds, "advise_advise")->kind == DialogAct::Kind::Advise);
  CHECK_FALSE(classify_operator(ds, "ask_nothing"));
  const auto b = slot_bindings(ds, p, State({2, 0, 0, 0}));
  CHECK(b.size() == 1);
  CHECK(b.at("location") == "cityB");
}

TEST_CASE("answer scripts") {
  const SimUser su = parse_answer_script("# comment\nlocation = cityB\n\npurpose=irrigate # trailing\n");
  CHECK(su.script.size() == 2);
  CHECK(su.script.at("location") == "cityB");
  CHECK_NOTHROW(check_sim_user(water(), su));
  CHECK_THROWS_AS(parse_answer_script("location cityB\n"), ModelError);
  CHECK_THROWS_AS(parse_answer_script("location=a\nlocation=b\n"), ModelError);
  CHECK_THROWS_AS(check_sim_user(water(), parse_answer_script("town=x\n")), ModelError);
  CHECK_THROWS_AS(check_sim_user(water(), parse_answer_script("location=cityC\n")), ModelError);
}

TEST_CASE("simulated users answer from script, seed or default") {
  const DialogSpec ds = water();
  const Problem p = compile_dialog(ds);
  const Operator& ask = p.operators()[*p.find_operator("ask_location")];
  const State s0 = p.initial();
  const State predicted = apply(ask, s0);

  auto scripted = make_sim_env(ds, parse_answer_script("location=cityB\n"));
  CHECK(scripted->observe(ask, s0, predicted)[0] == 2);

  auto by_default = make_sim_env(ds, {});
  CHECK(by_default->observe(ask, s0, predicted) == predicted);

  std::vector<ValueIndex> first, second;
  for (int round = 0; round < 2; ++round) {
    SimUser su;
    su.seed = 123;
    auto env = make_sim_env(ds, su);
    for (int i = 0; i < 32; ++i) (round ? second : first).push_back(env->observe(ask, s0, predicted)[0]);
  }
  CHECK(first == second);
  CHECK(std::count(first.begin(), first.end(), 1) > 0);
  CHECK(std::count(first.begin(), first.end(), 2) > 0);

  SimUser impatient;
  impatient.patience = 1;
  auto env = make_sim_env(ds, impatient);
  CHECK_FALSE(env->terminal());
  env->observe(ask, s0, predicted);
  CHECK(env->terminal());
}
