#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace {

const std::string kCli = NETBENCH_CLI;
const std::string kData = NETBENCH_DATA;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args, const std::string& input = "", const std::string& env = "") {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path();
  const std::string tag = "netbench_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  const auto in = dir / (tag + ".in"), out = dir / (tag + ".out"), err = dir / (tag + ".err");
  std::ofstream(in) << input;
  const std::string cmd = env + " " + kCli + " " + args + " <" + in.string() + " >" + out.string() +
                          " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  std::filesystem::remove(in);
  std::filesystem::remove(out);
  std::filesystem::remove(err);
  return r;
}

std::string data(const std::string& name) { return kData + "/" + name; }

}  // namespace

TEST_CASE("plan prints value and plan") {
  for (const char* algo : {"dp", "bnb", "brute"}) {
    const Run r = run(std::string("plan --algo ") + algo + " " + data("two_op.plan.txt"));
    CHECK(r.code == 0);
    CHECK(r.out.find("value 4\n") != std::string::npos);
    CHECK(r.out.find("plan a b a\n") != std::string::npos);
  }
  CHECK(run("plan " + data("two_op_discounted.plan.txt")).out.find("value 5/2\n") != std::string::npos);
  const Run mc = run("plan " + data("two_op_mincost.plan.txt"));
  CHECK(mc.out.find("value 1\nplan a\n") != std::string::npos);
  CHECK(run("plan " + data("water.dlg.txt")).out.find("value 6\n") != std::string::npos);
}

TEST_CASE("exit codes") {
  const Run infeasible = run("plan " + data("unreachable.plan.txt"));
  CHECK(infeasible.code == 1);
  CHECK(infeasible.out.find("infeasible") != std::string::npos);

  const Run bad = run("validate " + data("horizon0.bad.txt"));
  CHECK(bad.code == 1);
  CHECK(bad.err.find("horizon0.bad.txt:4:9: semantic error") != std::string::npos);

  CHECK(run("plan").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("plan --algo astar " + data("two_op.plan.txt")).code == 2);
  CHECK(run("plan " + data("missing.plan.txt")).code == 2);

  const Run refused = run("plan --algo brute " + data("two_op.plan.txt"), "",
                          "DIALOG_NETBENCH_LIMITS=brute=3");
  CHECK(refused.code == 3);
  CHECK(refused.out.empty());
  CHECK(run("plan " + data("water.dlg.txt"), "", "DIALOG_NETBENCH_LIMITS=ops=3").code == 3);
  CHECK(run("plan " + data("two_op.plan.txt"), "", "DIALOG_NETBENCH_LIMITS=nonsense").code == 2);
}

TEST_CASE("validate checks plans") {
  Run r = run("validate " + data("two_op.plan.txt") + " --plan a,b,a");
  CHECK(r.code == 0);
  CHECK(r.out.find("plan valid value 4") != std::string::npos);
  r = run("validate " + data("two_op.plan.txt") + " --plan a,a");
  CHECK(r.code == 1);
  CHECK(r.out.find("plan invalid at step 1") != std::string::npos);
  r = run("validate " + data("two_op.plan.txt") + " --plan -");
  CHECK(r.out.find("plan valid value 0") != std::string::npos);
}

TEST_CASE("pareto output") {
  const Run r = run("pareto " + data("two_op.plan.txt"));
  CHECK(r.out ==
        "point cost=0 utility=0 plan=\n"
        "point cost=1 utility=3 plan=a\n"
        "point cost=2 utility=4 plan=a,b\n"
        "point cost=3 utility=7 plan=a,b,a\n");
}

TEST_CASE("chat and simulate agree on every answer combination") {
  const auto dir = std::filesystem::temp_directory_path();
  for (const char* loc : {"cityA", "cityB"}) {
    for (const char* purpose : {"drink", "irrigate"}) {
      const auto script = dir / "netbench_cli_answers.txt";
      std::ofstream(script) << "location=" << loc << "\npurpose=" << purpose << "\n";
      const Run sim = run("simulate " + data("water.dlg.txt") + " --answers " + script.string());
      const Run chat = run("chat " + data("water.dlg.txt"), std::string(loc) + "\n" + purpose + "\n");
      CHECK(sim.code == 0);
      CHECK(chat.code == 0);
      const std::string tail = chat.out.substr(chat.out.find("turn index=0"));
      CHECK(tail == sim.out);
      CHECK(sim.out.find("end realized_value=6 status=completed") != std::string::npos);
      std::filesystem::remove(script);
    }
  }
  const Run numbered = run("chat --builtin water", "2\n1\n");
  CHECK(numbered.out.find("run_waterdata__cityB__drink") != std::string::npos);
  const Run retry = run("chat --builtin water", "Paris\ncityA\ndrink\n");
  CHECK(retry.err.find("not an allowed answer") != std::string::npos);
  CHECK(retry.out.find("end realized_value=6 status=completed") != std::string::npos);
  const Run left = run("chat --builtin water", "cityA\n");
  CHECK(left.out.find("end realized_value=-1 status=user_abandoned") != std::string::npos);
}

TEST_CASE("simulate problems and seeded users") {
  const Run r = run("simulate --json " + data("two_op.plan.txt"));
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["realized_value"] == "4");
  const Run a = run("simulate --seed 5 " + data("water.dlg.txt"));
  const Run b = run("simulate --seed 5 " + data("water.dlg.txt"));
  CHECK(a.out == b.out);
  CHECK(run("simulate --seed 5 " + data("two_op.plan.txt")).code == 2);
}

TEST_CASE("gen is reproducible and bench agrees") {
  const Run a = run("gen --class varying_utility_constant_cost --seed 3 --ops 4");
  const Run b = run("gen --class varying_utility_constant_cost --seed 3 --ops 4");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("problem gen_varying_utility_constant_cost_3\n", 0) == 0);
  CHECK(run("gen --vars 0").code == 2);

  const Run bench = run("bench " + kData + " --generate 30");
  CHECK(bench.code == 0);
  CHECK(bench.out.rfind("instance\talgorithm\tvalue\tnodes\tmicros\n", 0) == 0);
  CHECK(bench.err.find("0 disagreements") != std::string::npos);
}
