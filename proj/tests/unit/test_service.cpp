#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "dialog.hpp"
#include "exec.hpp"
#include "service.hpp"

using namespace netbench;
using json = nlohmann::json;

namespace {

ServiceError::Kind error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e.kind();
  }
  FAIL("no ServiceError");
  return ServiceError::Kind::BadRequest;
}

struct FakeClock {
  std::shared_ptr<std::chrono::steady_clock::time_point> now =
      std::make_shared<std::chrono::steady_clock::time_point>();
  void advance(std::chrono::seconds s) { *now += s; }
  std::function<std::chrono::steady_clock::time_point()> fn() const {
    return [n = now] { return *n; };
  }
};

}  // namespace

TEST_CASE("water dialog end to end") {
  SessionManager m;
  StepResult r = m.create_from_builtin("water");
  CHECK(r.session_id.size() == 32);
  CHECK(r.status == SessionStatus::AwaitingUser);
  REQUIRE(r.actions.size() == 1);
  CHECK(r.actions[0].kind == AgentAction::Kind::Ask);
  CHECK(r.actions[0].slot == "location");
  CHECK(r.actions[0].answers == std::vector<std::string>{"cityA", "cityB"});
  CHECK(r.remaining == 4);

  r = m.reply(r.session_id, "cityB");
  REQUIRE(r.actions.size() == 1);
  CHECK(r.actions[0].slot == "purpose");
  CHECK(r.accounting.value == Rational(-1));

  r = m.reply(r.session_id, "irrigate");
  REQUIRE(r.actions.size() == 3);
  CHECK(r.actions[0].op == "run_waterdata__cityB__irrigate");
  CHECK(r.actions[1].op == "advise_advise");
  CHECK(r.actions[1].message.find("cityB") != std::string::npos);
  CHECK(r.actions[1].message.find("irrigate") != std::string::npos);
  CHECK(r.actions[2].kind == AgentAction::Kind::Stop);
  CHECK(r.status == SessionStatus::Finished);
  CHECK(r.accounting.value == Rational(6));
  CHECK(r.accounting.cost == Rational(4));
  CHECK(r.accounting.utility == Rational(10));

  const SessionSnapshot s = m.get(r.session_id);
  CHECK(s.outcome == EpisodeStatus::Completed);
  REQUIRE(s.turns.size() == 4);
  CHECK(s.turns[0].is_ask);
  CHECK(s.turns[0].answer == "cityB");
  CHECK(s.turns[0].turn.diverged());
  CHECK_FALSE(s.turns[2].is_ask);

  const json step = json::parse(step_json(r));
  CHECK(step["value"] == "6");
  CHECK(step["status"] == "finished");
  CHECK(step["action"]["kind"] == "stop");
  const json snap = json::parse(snapshot_json(s));
  CHECK(snap["outcome"] == "completed");
  CHECK(snap["turns"].size() == 4);
  CHECK(snap["turns"][1]["answer"] == "irrigate");
}

TEST_CASE("illegal answers are rejected with the allowed set") {
  SessionManager m;
  const StepResult r = m.create_from_builtin("water");
  try {
    m.reply(r.session_id, "cityC");
    FAIL("accepted");
  } catch (const ServiceError& e) {
    CHECK(e.kind() == ServiceError::Kind::IllegalAnswer);
    CHECK(e.allowed == std::vector<std::string>{"cityA", "cityB"});
    CHECK(http_status(e.kind()) == 422);
    const json body = json::parse(error_json(e));
    CHECK(body["error"]["kind"] == "illegal_answer");
    CHECK(body["error"]["allowed"] == json::array({"cityA", "cityB"}));
  }
  const SessionSnapshot s = m.get(r.session_id);
  CHECK(s.turns.empty());
  CHECK(s.pending.slot == "location");
}

TEST_CASE("error kinds") {
  SessionManager m;
  CHECK(error_kind([&] { m.reply("nope", "x"); }) == ServiceError::Kind::NotFound);
  CHECK(error_kind([&] { m.get("nope"); }) == ServiceError::Kind::NotFound);
  CHECK(error_kind([&] { m.create_from_builtin("nope"); }) == ServiceError::Kind::BadRequest);
  try {
    m.create_from_text("dialog d\nturns x\n");
    FAIL("accepted");
  } catch (const ServiceError& e) {
    CHECK(e.kind() == ServiceError::Kind::Parse);
    CHECK(e.line == 2);
    CHECK(e.column == 7);
  }
  DialogSpec bad = *builtin_dialog("water");
  bad.slots[0].default_answer = "elsewhere";
  CHECK(error_kind([&] { m.create(bad); }) == ServiceError::Kind::Invalid);

  ServiceOptions tight;
  tight.limits.compile_ops = 3;
  SessionManager small(tight);
  CHECK(error_kind([&] { small.create_from_builtin("water"); }) == ServiceError::Kind::Limit);
  CHECK(small.size() == 0);

  const StepResult done = m.create_from_builtin("allstop");
  CHECK(done.status == SessionStatus::Finished);
  CHECK(done.accounting.value == Rational(0));
  CHECK(error_kind([&] { m.reply(done.session_id, "a"); }) == ServiceError::Kind::Conflict);
  CHECK(http_status(ServiceError::Kind::NotFound) == 404);
  CHECK(http_status(ServiceError::Kind::Conflict) == 409);
  CHECK(http_status(ServiceError::Kind::Parse) == 400);
}

TEST_CASE("discounted spec from text") {
  SessionManager m;
  StepResult r = m.create_from_text(
      "dialog w\nturns 4\ndiscount 9/10\n"
      "slot location { answers: cityA cityB ; default: cityA ; cost: 1 }\n"
      "slot purpose { answers: drink irrigate ; default: drink ; cost: 1 }\n"
      "query waterdata { requires: location, purpose ; cost: 2 }\n"
      "advisory advise { requires: waterdata ; utility: 10 ; message: \"{location}\" }\n");
  r = m.reply(r.session_id, "cityA");
  r = m.reply(r.session_id, "drink");
  CHECK(r.accounting.value == Rational(377, 100));
}

TEST_CASE("idle sessions expire as abandoned") {
  FakeClock clock;
  ServiceOptions opts;
  opts.clock = clock.fn();
  SessionManager m(opts);
  const StepResult r = m.create_from_builtin("water");
  clock.advance(std::chrono::minutes(29));
  CHECK(m.get(r.session_id).status == SessionStatus::AwaitingUser);
  m.reply(r.session_id, "cityA");
  clock.advance(std::chrono::minutes(29));
  CHECK(m.get(r.session_id).status == SessionStatus::AwaitingUser);
  clock.advance(std::chrono::minutes(2));
  const SessionSnapshot s = m.get(r.session_id);
  CHECK(s.status == SessionStatus::Finished);
  CHECK(s.outcome == EpisodeStatus::UserAbandoned);
  CHECK(s.accounting.value == Rational(-1));
  CHECK(error_kind([&] { m.reply(r.session_id, "drink"); }) == ServiceError::Kind::Conflict);
}

TEST_CASE("transcript files match the simulator") {
  const auto dir = std::filesystem::temp_directory_path() / "netbench_transcripts_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  ServiceOptions opts;
  opts.transcript_dir = dir.string();
  SessionManager m(opts);
  StepResult r = m.create_from_builtin("water");
  const std::string id = r.session_id;
  m.reply(id, "cityB");
  m.reply(id, "drink");

  std::ifstream in(dir / (id + ".transcript"));
  std::stringstream got;
  got << in.rdbuf();

  const DialogSpec ds = *builtin_dialog("water");
  SimUser su;
  su.script = {{"location", "cityB"}, {"purpose", "drink"}};
  auto env = make_sim_env(ds, su);
  CHECK(got.str() == transcript_text(run_episode(compile_dialog(ds), *env, Algorithm::Dp)));
  std::filesystem::remove_all(dir);
}

TEST_CASE("concurrent sessions do not cross-talk") {
  SessionManager m;
  const char* locs[] = {"cityA", "cityB"};
  const char* purposes[] = {"drink", "irrigate"};
  std::atomic<int> ok{0};
  std::atomic<bool> stop_readers{false};
  std::vector<std::string> ids(16);
  std::vector<std::thread> drivers;
  for (int i = 0; i < 16; ++i) {
    drivers.emplace_back([&, i] {
      for (int round = 0; round < 10; ++round) {
        const std::string loc = locs[(i + round) % 2];
        const std::string purpose = purposes[(i / 2 + round) % 2];
        StepResult r = m.create_from_builtin("water");
        ids[i] = r.session_id;
        std::this_thread::yield();
        r = m.reply(r.session_id, loc);
        std::this_thread::yield();
        r = m.reply(r.session_id, purpose);
        const SessionSnapshot s = m.get(r.session_id);
        const bool good = r.accounting.value == Rational(6) && s.turns.size() == 4 &&
                          s.turns[0].answer == loc && s.turns[1].answer == purpose &&
                          s.turns[2].turn.op == run_operator("waterdata", {loc, purpose}) &&
                          s.turns[3].message.find(loc) != std::string::npos;
        ok += good;
      }
    });
  }
  std::thread reader([&] {
    while (!stop_readers) {
      for (const auto& id : ids) {
        if (id.empty()) continue;
        try {
          const SessionSnapshot s = m.get(id);
          (void)snapshot_json(s);
        } catch (const ServiceError&) {
        }
      }
    }
  });
  for (auto& t : drivers) t.join();
  stop_readers = true;
  reader.join();
  CHECK(ok == 160);
  CHECK(m.size() == 160);
}

TEST_CASE("racing replies on one session apply exactly once") {
  SessionManager m;
  const StepResult r = m.create_from_builtin("water");
  std::atomic<int> accepted{0}, rejected{0};
  std::vector<std::thread> ts;
  for (int i = 0; i < 16; ++i) {
    ts.emplace_back([&] {
      try {
        m.reply(r.session_id, "cityA");
        ++accepted;
      } catch (const ServiceError& e) {
        CHECK(e.kind() == ServiceError::Kind::IllegalAnswer);
        ++rejected;
      }
    });
  }
  for (auto& t : ts) t.join();
  CHECK(accepted == 1);
  CHECK(rejected == 15);
  CHECK(m.get(r.session_id).turns.size() == 1);
}

TEST_CASE("session ids are unique hex") {
  std::set<std::string> seen;
  for (int i = 0; i < 2000; ++i) {
    const std::string id = new_session_id();
    CHECK(id.size() == 32);
    CHECK(id.find_first_not_of("0123456789abcdef") == std::string::npos);
    seen.insert(id);
  }
  CHECK(seen.size() == 2000);
}
