#include <netbench/netbench.h>

#include <algorithm>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitLimit = 3;

struct Failure {
  int code;
  std::string message;
};

int exit_code(nb_status st) {
  switch (st) {
    case NB_OK: return kExitOk;
    case NB_ERR_LIMIT: return kExitLimit;
    case NB_ERR_ARGUMENT: return kExitUsage;
    default: return kExitFailure;
  }
}

void check(nb_status st) {
  if (st != NB_OK) throw Failure{exit_code(st), nb_last_error()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitUsage, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// First keyword of the file, skipping blank lines and comments.
bool is_dialog_text(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  while (in >> word) {
    if (word.front() == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    return word == "dialog";
  }
  return false;
}

struct Owned {
  char* p = nullptr;
  ~Owned() { nb_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct ProblemHandle {
  nb_problem* p = nullptr;
  ProblemHandle() = default;
  ProblemHandle(ProblemHandle&& o) noexcept : p(std::exchange(o.p, nullptr)) {}
  ProblemHandle& operator=(ProblemHandle&&) = delete;
  ~ProblemHandle() { nb_problem_free(p); }
};

void load(const std::string& path, const nb_limits& limits, ProblemHandle& out) {
  const std::string text = read_file(path);
  const nb_status st = is_dialog_text(text)
                           ? nb_problem_from_dialog(text.data(), text.size(), &limits, &out.p)
                           : nb_problem_parse(text.data(), text.size(), &out.p);
  if (st != NB_OK) {
    std::string msg = nb_last_error();
    // Parse failures are prefixed with the file so editors can jump to them.
    if (st == NB_ERR_PARSE) msg = path + ":" + msg;
    throw Failure{exit_code(st), msg};
  }
}

nb_algorithm algorithm_of(const std::string& name) {
  if (name == "dp") return NB_ALGO_DP;
  if (name == "bnb") return NB_ALGO_BNB;
  return NB_ALGO_BRUTE;
}

std::string join_plan(const nb_solution* s, const char* sep) {
  std::string out;
  for (size_t i = 0; i < nb_solution_length(s); ++i) {
    if (i) out += sep;
    out += nb_solution_step(s, i);
  }
  return out;
}

int cmd_validate(const std::string& path, const std::string& plan, const nb_limits& limits) {
  ProblemHandle h;
  load(path, limits, h);
  std::cout << "ok " << nb_problem_name(h.p) << " vars=" << nb_problem_variable_count(h.p)
            << " ops=" << nb_problem_operator_count(h.p) << " horizon=" << nb_problem_horizon(h.p)
            << " objective=" << nb_problem_objective(h.p) << '\n';
  if (plan.empty()) return kExitOk;

  std::vector<std::string> steps;
  if (plan != "-") {
    std::stringstream ss(plan);
    std::string step;
    while (std::getline(ss, step, ',')) steps.push_back(step);
  }
  std::vector<const char*> ptrs;
  for (const auto& s : steps) ptrs.push_back(s.c_str());
  Owned value;
  size_t bad = 0;
  const nb_status st = nb_problem_evaluate(h.p, ptrs.data(), ptrs.size(), &value.p, &bad);
  if (st == NB_ERR_INVALID) {
    std::cout << "plan invalid at step " << bad << '\n';
    std::cerr << nb_last_error() << '\n';
    return kExitFailure;
  }
  check(st);
  std::cout << "plan valid value " << value.str() << '\n';
  return kExitOk;
}

int cmd_plan(const std::string& path, const std::string& algo, bool parallel,
             const nb_limits& limits) {
  ProblemHandle h;
  load(path, limits, h);
  nb_solution* s = nullptr;
  check(nb_solve(h.p, algorithm_of(algo), &limits, parallel ? 1 : 0, &s));
  std::cout << "algorithm " << nb_solution_algorithm(s) << '\n';
  int rc = kExitOk;
  if (!nb_solution_feasible(s)) {
    std::cout << "infeasible\n";
    rc = kExitFailure;
  } else {
    std::cout << "value " << nb_solution_value(s) << '\n';
    std::cout << "plan" << (nb_solution_length(s) ? " " : "") << join_plan(s, " ") << '\n';
  }
  std::cout << "nodes " << nb_solution_nodes(s) << '\n';
  if (nb_solution_degenerate(s)) std::cerr << "note: mincost without a goal; empty plan\n";
  nb_solution_free(s);
  return rc;
}

int cmd_pareto(const std::string& path, const nb_limits& limits) {
  ProblemHandle h;
  load(path, limits, h);
  nb_pareto* f = nullptr;
  check(nb_pareto_front(h.p, &limits, &f));
  for (size_t i = 0; i < nb_pareto_size(f); ++i) {
    std::cout << "point cost=" << nb_pareto_cost(f, i) << " utility=" << nb_pareto_utility(f, i)
              << " plan=";
    for (size_t j = 0; j < nb_pareto_plan_length(f, i); ++j) {
      std::cout << (j ? "," : "") << nb_pareto_plan_step(f, i, j);
    }
    std::cout << '\n';
  }
  nb_pareto_free(f);
  return kExitOk;
}

int episode_exit(const std::string& json_text) {
  return json::parse(json_text)["status"] == "aborted" ? kExitFailure : kExitOk;
}

int cmd_simulate(const std::string& path, const std::string& answers_path,
                 const std::optional<uint64_t>& seed, const std::string& algo, bool as_json,
                 const nb_limits& limits) {
  const std::string text = read_file(path);
  Owned out_text, out_json;
  if (is_dialog_text(text)) {
    const std::string answers = answers_path.empty() ? std::string() : read_file(answers_path);
    const uint64_t seed_value = seed.value_or(0);
    const nb_status st = nb_simulate_dialog(
        text.data(), text.size(), answers_path.empty() ? nullptr : answers.c_str(),
        seed ? &seed_value : nullptr, algorithm_of(algo), &limits, &out_text.p, &out_json.p);
    if (st == NB_ERR_PARSE) throw Failure{kExitFailure, path + ":" + nb_last_error()};
    check(st);
  } else {
    if (!answers_path.empty() || seed) {
      throw Failure{kExitUsage, "--answers and --seed apply to dialog specs only"};
    }
    ProblemHandle h;
    load(path, limits, h);
    check(nb_simulate_problem(h.p, algorithm_of(algo), &limits, &out_text.p, &out_json.p));
  }
  std::cout << (as_json ? out_json.str() + "\n" : out_text.str());
  return episode_exit(out_json.str());
}

void print_actions(const json& step) {
  for (const auto& a : step["actions"]) {
    if (a["kind"] == "ask") {
      std::cout << "ask " << a["slot"].get<std::string>() << ": "
                << a["prompt"].get<std::string>() << " [";
      const auto& answers = a["answers"];
      for (size_t i = 0; i < answers.size(); ++i) {
        std::cout << (i ? " | " : "") << i + 1 << "=" << answers[i].get<std::string>();
      }
      std::cout << "]\n";
    } else if (a["kind"] == "act") {
      std::cout << "act " << a["op"].get<std::string>() << ": "
                << a["message"].get<std::string>() << '\n';
    } else {
      std::cout << "stop\n";
    }
  }
}

int cmd_chat(const std::string& path, const std::string& builtin, const std::string& algo,
             const nb_limits& limits) {
  nb_service_options opts = nb_service_options_default();
  opts.algorithm = algorithm_of(algo);
  opts.limits = limits;
  nb_sessions* sessions = nullptr;
  check(nb_sessions_new(&opts, &sessions));
  std::unique_ptr<nb_sessions, void (*)(nb_sessions*)> guard(sessions, nb_sessions_free);

  Owned created;
  nb_status st;
  if (!builtin.empty()) {
    st = nb_session_create(sessions, nullptr, builtin.c_str(), &created.p);
  } else {
    const std::string text = read_file(path);
    st = nb_session_create(sessions, text.c_str(), nullptr, &created.p);
  }
  if (st != NB_OK) {
    throw Failure{st == NB_ERR_NOT_FOUND ? kExitUsage : exit_code(st), nb_last_error()};
  }
  json step = json::parse(created.str());
  const std::string id = step["session_id"];
  bool left = false;
  print_actions(step);
  while (step["status"] == "awaiting_user") {
    const auto& ask = step["action"];
    std::cout << "> " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line)) {
      left = true;
      break;
    }
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    std::string answer = line;
    const auto& answers = ask["answers"];
    if (!line.empty() && std::all_of(line.begin(), line.end(), ::isdigit)) {
      const size_t n = std::stoul(line);
      if (n >= 1 && n <= answers.size()) answer = answers[n - 1];
    }
    Owned replied;
    st = nb_session_reply(sessions, id.c_str(), answer.c_str(), &replied.p);
    if (st == NB_ERR_ILLEGAL_ANSWER) {
      std::cerr << nb_last_error() << '\n';
      continue;
    }
    check(st);
    step = json::parse(replied.str());
    print_actions(step);
  }

  Owned snap;
  check(nb_session_get(sessions, id.c_str(), &snap.p));
  const json doc = json::parse(snap.str());
  for (const auto& t : doc["turns"]) {
    std::cout << "turn index=" << t["index"].get<size_t>() << " op=" << t["op"].get<std::string>()
              << " cost=" << t["cost"].get<std::string>()
              << " utility=" << t["utility"].get<std::string>()
              << " weight=" << t["weight"].get<std::string>()
              << " contribution=" << t["contribution"].get<std::string>()
              << " diverged=" << t["diverged"].get<std::string>() << '\n';
  }
  const std::string outcome =
      left ? "user_abandoned" : doc.value("outcome", std::string("completed"));
  std::cout << "end realized_value=" << doc["value"].get<std::string>() << " status=" << outcome
            << '\n';
  return kExitOk;
}

struct GenArgs {
  std::string cls = "constant_cost";
  uint32_t vars = 3, dom = 3, ops = 5, k = 5;
  uint64_t seed = 0;
  std::string objective;
};

nb_gen_class gen_class_of(const std::string& name) {
  if (name == "constant_cost") return NB_GEN_CONSTANT_COST;
  if (name == "constant_utility_and_cost") return NB_GEN_CONSTANT_UTILITY_AND_COST;
  return NB_GEN_VARYING_UTILITY_CONSTANT_COST;
}

int cmd_gen(const GenArgs& g, const std::string& out_path) {
  ProblemHandle h;
  check(nb_generate(gen_class_of(g.cls), g.vars, g.dom, g.ops, g.k, g.seed,
                    g.objective.empty() ? nullptr : g.objective.c_str(), &h.p));
  Owned text;
  check(nb_problem_serialize(h.p, &text.p));
  if (out_path.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << text.str();
    if (!out) throw Failure{kExitFailure, "cannot write " + out_path};
  }
  return kExitOk;
}

struct BenchRow {
  std::string value;  // "infeasible" or "refused" when no number
  uint64_t nodes = 0;
  double micros = 0;
  bool ran = false;
};

BenchRow bench_one(const nb_problem* p, nb_algorithm algo, const nb_limits& limits) {
  BenchRow row;
  nb_solution* s = nullptr;
  const auto t0 = std::chrono::steady_clock::now();
  const nb_status st = nb_solve(p, algo, &limits, 0, &s);
  row.micros = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0)
                   .count();
  if (st == NB_ERR_LIMIT) {
    row.value = "refused";
    return row;
  }
  check(st);
  row.ran = true;
  row.value = nb_solution_feasible(s) ? nb_solution_value(s) : "infeasible";
  row.nodes = nb_solution_nodes(s);
  nb_solution_free(s);
  return row;
}

int cmd_bench(const std::vector<std::string>& inputs, int generate, const GenArgs& g,
              const nb_limits& limits) {
  std::vector<std::pair<std::string, ProblemHandle>> instances;
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::directory_iterator(in)) {
        const std::string name = e.path().filename().string();
        if (name.size() > 9 && name.ends_with(".plan.txt")) files.push_back(e.path().string());
      }
    } else {
      files.push_back(in);
    }
  }
  std::sort(files.begin(), files.end());
  instances.reserve(files.size() + static_cast<size_t>(std::max(generate, 0)));
  for (const auto& f : files) {
    instances.emplace_back(f, ProblemHandle{});
    load(f, limits, instances.back().second);
  }
  const char* classes[] = {"constant_cost", "constant_utility_and_cost",
                           "varying_utility_constant_cost"};
  for (int i = 0; i < generate; ++i) {
    GenArgs gi = g;
    gi.cls = classes[i % 3];
    gi.seed = g.seed + static_cast<uint64_t>(i);
    instances.emplace_back(gi.cls + "/" + std::to_string(gi.seed), ProblemHandle{});
    check(nb_generate(gen_class_of(gi.cls), gi.vars, gi.dom, gi.ops, gi.k, gi.seed,
                      gi.objective.empty() ? nullptr : gi.objective.c_str(),
                      &instances.back().second.p));
  }

  std::cout << "instance\talgorithm\tvalue\tnodes\tmicros\n";
  int disagreements = 0;
  int node_violations = 0;
  int compared = 0;
  for (const auto& [name, h] : instances) {
    const BenchRow dp = bench_one(h.p, NB_ALGO_DP, limits);
    const BenchRow bnb = bench_one(h.p, NB_ALGO_BNB, limits);
    const BenchRow brute = bench_one(h.p, NB_ALGO_BRUTE, limits);
    const std::pair<const char*, const BenchRow*> rows[] = {
        {"dp", &dp}, {"bnb", &bnb}, {"brute", &brute}};
    for (const auto& [algo, row] : rows) {
      std::cout << name << '\t' << algo << '\t' << row->value << '\t' << row->nodes << '\t'
                << static_cast<long long>(row->micros) << '\n';
    }
    std::vector<const BenchRow*> ran;
    for (const auto& [algo, row] : rows) {
      if (row->ran) ran.push_back(row);
    }
    for (const auto* r : ran) {
      if (r->value != ran.front()->value) {
        ++disagreements;
        std::cerr << "disagreement on " << name << '\n';
        break;
      }
    }
    if (bnb.ran && brute.ran) {
      ++compared;
      if (bnb.nodes > brute.nodes) {
        ++node_violations;
        std::cerr << "bnb expanded more nodes than brute on " << name << '\n';
      }
    }
  }
  std::cerr << instances.size() << " instances, " << disagreements << " disagreements, "
            << node_violations << " of " << compared << " with bnb nodes above brute\n";
  return disagreements == 0 && node_violations == 0 ? kExitOk : kExitFailure;
}

nb_server* g_server = nullptr;

void on_signal(int) {
  if (g_server) nb_server_stop(g_server);
}

int cmd_serve(const std::string& addr, int port, const std::string& static_dir,
              const std::string& transcripts, const std::string& algo, const nb_limits& limits) {
  nb_service_options opts = nb_service_options_default();
  opts.algorithm = algorithm_of(algo);
  opts.limits = limits;
  if (!transcripts.empty()) opts.transcript_dir = transcripts.c_str();
  nb_sessions* sessions = nullptr;
  check(nb_sessions_new(&opts, &sessions));
  int bound = 0;
  const nb_status st = nb_server_start(sessions, addr.c_str(), port,
                                       static_dir.empty() ? nullptr : static_dir.c_str(),
                                       &g_server, &bound);
  if (st != NB_OK) {
    nb_sessions_free(sessions);
    check(st);
  }
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << addr << ":" << bound << '\n';
  nb_server_wait(g_server);
  nb_server_free(g_server);
  g_server = nullptr;
  nb_sessions_free(sessions);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded-horizon planner and dialog agent"};
  app.require_subcommand(1);
  app.set_version_flag("--version", nb_version());

  const std::vector<std::string> algos = {"dp", "bnb", "brute"};
  std::string algo = "dp";
  std::string file;

  auto* validate = app.add_subcommand("validate", "Check a problem or dialog file");
  std::string plan_arg;
  validate->add_option("file", file, "Problem (.plan.txt) or dialog (.dlg.txt)")->required();
  validate->add_option("--plan", plan_arg, "Comma-separated operator names to check ('-' = empty)");

  auto* plan = app.add_subcommand("plan", "Compute an optimal plan");
  bool parallel = false;
  plan->add_option("file", file)->required();
  plan->add_option("--algo", algo)->check(CLI::IsMember(algos));
  plan->add_flag("--parallel", parallel, "Split brute-force enumeration across threads");

  auto* pareto = app.add_subcommand("pareto", "Print the cost/utility frontier");
  pareto->add_option("file", file)->required();

  auto* simulate = app.add_subcommand("simulate", "Run an interleaved plan-and-act episode");
  std::string answers;
  std::optional<uint64_t> seed;
  bool as_json = false;
  simulate->add_option("file", file)->required();
  simulate->add_option("--answers", answers, "Answer script, one slot=answer per line");
  simulate->add_option("--seed", seed, "Seed for unscripted answers");
  simulate->add_option("--algo", algo)->check(CLI::IsMember(algos));
  simulate->add_flag("--json", as_json);

  auto* chat = app.add_subcommand("chat", "Talk to the dialog agent on the terminal");
  std::string builtin;
  chat->add_option("file", file, "Dialog spec");
  chat->add_option("--builtin", builtin, "Built-in dialog name (water, allstop)");
  chat->add_option("--algo", algo)->check(CLI::IsMember(algos));

  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  GenArgs g;
  std::string out_path;
  const std::vector<std::string> classes = {"constant_cost", "constant_utility_and_cost",
                                            "varying_utility_constant_cost"};
  auto add_gen_options = [&](CLI::App* sub) {
    sub->add_option("--vars", g.vars)->check(CLI::Range(1, 64));
    sub->add_option("--dom", g.dom)->check(CLI::Range(1, 256));
    sub->add_option("--ops", g.ops)->check(CLI::Range(1, 10000));
    sub->add_option("--k", g.k)->check(CLI::Range(1, 10000));
    sub->add_option("--seed", g.seed);
    sub->add_option("--objective", g.objective, "mincost | netbenefit | discounted:<gamma>");
  };
  gen->add_option("--class", g.cls)->check(CLI::IsMember(classes));
  add_gen_options(gen);
  gen->add_option("-o,--output", out_path);

  auto* bench = app.add_subcommand("bench", "Compare all solvers on a corpus");
  std::vector<std::string> inputs;
  int generate = 0;
  bench->add_option("inputs", inputs, "Files or directories of .plan.txt files");
  bench->add_option("--generate", generate, "Also bench this many generated instances")
      ->check(CLI::NonNegativeNumber);
  add_gen_options(bench);

  auto* serve = app.add_subcommand("serve", "Serve the dialog HTTP API");
  std::string addr = "127.0.0.1";
  int port = 8750;
  std::string static_dir, transcripts;
  serve->add_option("--addr", addr);
  serve->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve->add_option("--static", static_dir, "Directory served under /")->check(CLI::ExistingDirectory);
  serve->add_option("--transcripts", transcripts, "Directory for per-session transcripts");
  serve->add_option("--algo", algo)->check(CLI::IsMember(algos));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  nb_limits limits = nb_limits_default();
  if (const char* env = std::getenv("DIALOG_NETBENCH_LIMITS"); env && *env) {
    if (nb_limits_parse(env, &limits) != NB_OK) {
      std::cerr << "DIALOG_NETBENCH_LIMITS: " << nb_last_error() << '\n';
      return kExitUsage;
    }
  }

  try {
    if (*validate) return cmd_validate(file, plan_arg, limits);
    if (*plan) return cmd_plan(file, algo, parallel, limits);
    if (*pareto) return cmd_pareto(file, limits);
    if (*simulate) return cmd_simulate(file, answers, seed, algo, as_json, limits);
    if (*chat) {
      if (file.empty() == builtin.empty()) {
        std::cerr << "chat needs exactly one of a spec file and --builtin\n";
        return kExitUsage;
      }
      return cmd_chat(file, builtin, algo, limits);
    }
    if (*gen) return cmd_gen(g, out_path);
    if (*bench) {
      if (inputs.empty() && generate == 0) {
        std::cerr << "bench needs inputs or --generate\n";
        return kExitUsage;
      }
      return cmd_bench(inputs, generate, g, limits);
    }
    if (*serve) return cmd_serve(addr, port, static_dir, transcripts, algo, limits);
  } catch (const Failure& f) {
    std::cerr << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
