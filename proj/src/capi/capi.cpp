#include "netbench/netbench.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <thread>

#include "dialog.hpp"
#include "exec.hpp"
#include "generator.hpp"
#include "http_service.hpp"
#include "limits.hpp"
#include "model.hpp"
#include "search.hpp"
#include "service.hpp"
#include "textio.hpp"

using namespace netbench;

struct nb_problem {
  Problem problem;
  std::string objective;
};

struct nb_solution {
  SolveResult result;
  std::string value;
};

struct nb_pareto {
  struct Point {
    std::string cost;
    std::string utility;
    Plan plan;
  };
  std::vector<Point> points;
};

struct nb_sessions {
  explicit nb_sessions(ServiceOptions options) : manager(std::move(options)) {}
  SessionManager manager;
};

struct nb_server {
  nb_server(SessionManager& m, std::optional<std::string> dir) : http(m, std::move(dir)) {}
  HttpService http;
  std::thread thread;
};

namespace {

thread_local std::string g_error;
thread_local int g_line = 0;
thread_local int g_column = 0;

nb_status fail(nb_status status, std::string message, int line = 0, int column = 0) {
  g_error = std::move(message);
  g_line = line;
  g_column = column;
  return status;
}

nb_status service_status(ServiceError::Kind kind) {
  switch (kind) {
    case ServiceError::Kind::BadRequest: return NB_ERR_ARGUMENT;
    case ServiceError::Kind::Parse: return NB_ERR_PARSE;
    case ServiceError::Kind::Invalid: return NB_ERR_INVALID;
    case ServiceError::Kind::Limit: return NB_ERR_LIMIT;
    case ServiceError::Kind::NotFound: return NB_ERR_NOT_FOUND;
    case ServiceError::Kind::Conflict: return NB_ERR_CONFLICT;
    case ServiceError::Kind::IllegalAnswer: return NB_ERR_ILLEGAL_ANSWER;
  }
  return NB_ERR_INTERNAL;
}

template <typename F>
nb_status guarded(F&& body) {
  try {
    body();
    return NB_OK;
  } catch (const SourceError& e) {
    return fail(NB_ERR_PARSE, e.render(), e.line(), e.column());
  } catch (const LimitError& e) {
    return fail(NB_ERR_LIMIT, e.what());
  } catch (const ServiceError& e) {
    return fail(service_status(e.kind()), e.what(), e.line.value_or(0), e.column.value_or(0));
  } catch (const ModelError& e) {
    return fail(NB_ERR_INVALID, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(NB_ERR_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NB_ERR_INTERNAL, "unknown failure");
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Limits to_limits(const nb_limits* l) {
  Limits out;
  if (l) {
    out.brute_plans = l->brute_plans;
    out.dp_cells = l->dp_cells;
    out.compile_ops = l->compile_ops;
  }
  return out;
}

Algorithm to_algorithm(nb_algorithm a) {
  switch (a) {
    case NB_ALGO_DP: return Algorithm::Dp;
    case NB_ALGO_BNB: return Algorithm::Bnb;
    case NB_ALGO_BRUTE: return Algorithm::Brute;
  }
  throw std::invalid_argument("unknown algorithm");
}

nb_problem* wrap(Problem p) {
  std::string kind(to_string(p.objective().kind));
  return new nb_problem{std::move(p), std::move(kind)};
}

void emit_episode(const Episode& ep, char** text, char** json) {
  if (text) *text = dup_string(transcript_text(ep));
  if (json) *json = dup_string(transcript_json(ep));
}

template <typename F>
nb_status session_call(char** json, F&& body) {
  try {
    std::string out = body();
    if (json) *json = dup_string(out);
    return NB_OK;
  } catch (const ServiceError& e) {
    if (json) *json = dup_string(error_json(e));
    return fail(service_status(e.kind()), e.what(), e.line.value_or(0), e.column.value_or(0));
  } catch (const std::exception& e) {
    return fail(NB_ERR_INTERNAL, e.what());
  }
}


}  // namespace

extern "C" {

const char* nb_version(void) { return "1.0.0"; }
const char* nb_last_error(void) { return g_error.c_str(); }
int nb_last_error_line(void) { return g_line; }
int nb_last_error_column(void) { return g_column; }

const char* nb_status_name(nb_status status) {
  switch (status) {
    case NB_OK: return "ok";
    case NB_ERR_PARSE: return "parse";
    case NB_ERR_INVALID: return "invalid";
    case NB_ERR_LIMIT: return "limit";
    case NB_ERR_NOT_FOUND: return "not_found";
    case NB_ERR_CONFLICT: return "conflict";
    case NB_ERR_ILLEGAL_ANSWER: return "illegal_answer";
    case NB_ERR_ARGUMENT: return "argument";
    case NB_ERR_IO: return "io";
    case NB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void nb_string_free(char* s) { delete[] s; }

nb_limits nb_limits_default(void) {
  Limits l;
  return nb_limits{l.brute_plans, l.dp_cells, l.compile_ops};
}

nb_status nb_limits_parse(const char* text, nb_limits* limits) {
  if (!text || !limits) return fail(NB_ERR_ARGUMENT, "null argument");
  auto parsed = parse_limits(text, to_limits(limits));
  if (!parsed) return fail(NB_ERR_ARGUMENT, std::string("malformed limits '") + text + "'");
  *limits = nb_limits{parsed->brute_plans, parsed->dp_cells, parsed->compile_ops};
  return NB_OK;
}

nb_status nb_problem_parse(const char* text, size_t len, nb_problem** out) {
  if (!text || !out) return fail(NB_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = wrap(parse_problem(std::string_view(text, len))); });
}

nb_status nb_problem_from_dialog(const char* text, size_t len, const nb_limits* limits,
                                 nb_problem** out) {
  if (!text || !out) return fail(NB_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = wrap(compile_dialog(parse_dialog_spec(std::string_view(text, len)), to_limits(limits)));
  });
}

nb_status nb_problem_from_builtin(const char* name, const nb_limits* limits, nb_problem** out) {
  if (!name || !out) return fail(NB_ERR_ARGUMENT, "null argument");
  auto spec = builtin_dialog(name);
  if (!spec) return fail(NB_ERR_NOT_FOUND, std::string("unknown builtin ") + name);
  return guarded([&] { *out = wrap(compile_dialog(*spec, to_limits(limits))); });
}

nb_status nb_generate(nb_gen_class cls, uint32_t vars, uint32_t dom, uint32_t ops, uint32_t k,
                      uint64_t seed, const char* objective, nb_problem** out) {
  if (!out) return fail(NB_ERR_ARGUMENT, "null argument");
  GenClass g;
  switch (cls) {
    case NB_GEN_CONSTANT_COST: g.instance_class = InstanceClass::ConstantCost; break;
    case NB_GEN_CONSTANT_UTILITY_AND_COST:
      g.instance_class = InstanceClass::ConstantUtilityAndCost;
      break;
    case NB_GEN_VARYING_UTILITY_CONSTANT_COST:
      g.instance_class = InstanceClass::VaryingUtilityConstantCost;
      break;
    default: return fail(NB_ERR_ARGUMENT, "unknown instance class");
  }
  g.vars = vars;
  g.dom = dom;
  g.ops = ops;
  g.k = k;
  g.seed = seed;
  if (objective) {
    std::string_view o(objective);
    if (o == "mincost") {
      g.objective = ObjectiveKind::MinCost;
    } else if (o == "netbenefit") {
      g.objective = ObjectiveKind::NetBenefit;
    } else if (o.starts_with("discounted:")) {
      auto gamma = Rational::parse(o.substr(11));
      if (!gamma || gamma->sign() <= 0 || *gamma > Rational(1)) {
        return fail(NB_ERR_ARGUMENT, "discount must be a rational in (0, 1]");
      }
      g.objective = ObjectiveKind::DiscountedNetBenefit;
      g.gamma = *gamma;
    } else {
      return fail(NB_ERR_ARGUMENT, std::string("unknown objective ") + objective);
    }
  }
  return guarded([&] { *out = wrap(gen_instance(g)); });
}

void nb_problem_free(nb_problem* p) { delete p; }

nb_status nb_problem_serialize(const nb_problem* p, char** out) {
  if (!p || !out) return fail(NB_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = dup_string(serialize_problem(p->problem)); });
}

const char* nb_problem_name(const nb_problem* p) { return p ? p->problem.name().c_str() : ""; }
const char* nb_problem_objective(const nb_problem* p) { return p ? p->objective.c_str() : ""; }
uint32_t nb_problem_horizon(const nb_problem* p) { return p ? p->problem.horizon() : 0; }

size_t nb_problem_variable_count(const nb_problem* p) {
  return p ? p->problem.variables().size() : 0;
}

size_t nb_problem_operator_count(const nb_problem* p) {
  return p ? p->problem.operators().size() : 0;
}

const char* nb_problem_operator_name(const nb_problem* p, size_t i) {
  if (!p || i >= p->problem.operators().size()) return nullptr;
  return p->problem.operators()[i].name.c_str();
}

nb_status nb_problem_evaluate(const nb_problem* p, const char* const* steps, size_t n,
                              char** value, size_t* bad_step) {
  if (!p || (n > 0 && !steps)) return fail(NB_ERR_ARGUMENT, "null argument");
  Plan plan;
  for (size_t i = 0; i < n; ++i) {
    if (!steps[i]) return fail(NB_ERR_ARGUMENT, "null plan step");
    plan.steps.emplace_back(steps[i]);
  }
  try {
    const PlanEval ev = validate_plan(p->problem, plan);
    if (value) *value = dup_string(objective_value(p->problem.objective(), ev).str());
    return NB_OK;
  } catch (const ModelError& e) {
    if (bad_step) {
      *bad_step = e.kind() == ModelError::Kind::HorizonExceeded ? p->problem.horizon() : e.step();
    }
    return fail(NB_ERR_INVALID, e.what());
  } catch (const std::exception& e) {
    return fail(NB_ERR_INTERNAL, e.what());
  }
}

nb_status nb_solve(const nb_problem* p, nb_algorithm algo, const nb_limits* limits, int parallel,
                   nb_solution** out) {
  if (!p || !out) return fail(NB_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const Algorithm a = to_algorithm(algo);
    SolveResult r = a == Algorithm::Brute ? solve_brute(p->problem, to_limits(limits), parallel != 0)
                                          : solve(p->problem, a, to_limits(limits));
    std::string value = r.feasible ? r.optimal_value.str() : std::string();
    *out = new nb_solution{std::move(r), std::move(value)};
  });
}

void nb_solution_free(nb_solution* s) { delete s; }
int nb_solution_feasible(const nb_solution* s) { return s && s->result.feasible ? 1 : 0; }
int nb_solution_degenerate(const nb_solution* s) { return s && s->result.degenerate ? 1 : 0; }
const char* nb_solution_value(const nb_solution* s) { return s ? s->value.c_str() : ""; }

const char* nb_solution_algorithm(const nb_solution* s) {
  return s ? s->result.algorithm.c_str() : "";
}

uint64_t nb_solution_nodes(const nb_solution* s) { return s ? s->result.nodes_expanded : 0; }
size_t nb_solution_length(const nb_solution* s) { return s ? s->result.plan.size() : 0; }

const char* nb_solution_step(const nb_solution* s, size_t i) {
  if (!s || i >= s->result.plan.size()) return nullptr;
  return s->result.plan.steps[i].c_str();
}

nb_status nb_pareto_front(const nb_problem* p, const nb_limits* limits, nb_pareto** out) {
  if (!p || !out) return fail(NB_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto front = pareto_front(p->problem, to_limits(limits));
    auto* f = new nb_pareto;
    for (auto& pt : front.points) {
      f->points.push_back({pt.cost.str(), pt.utility.str(), std::move(pt.plan)});
    }
    *out = f;
  });
}

void nb_pareto_free(nb_pareto* f) { delete f; }
size_t nb_pareto_size(const nb_pareto* f) { return f ? f->points.size() : 0; }

const char* nb_pareto_cost(const nb_pareto* f, size_t i) {
  return f && i < f->points.size() ? f->points[i].cost.c_str() : nullptr;
}

const char* nb_pareto_utility(const nb_pareto* f, size_t i) {
  return f && i < f->points.size() ? f->points[i].utility.c_str() : nullptr;
}

size_t nb_pareto_plan_length(const nb_pareto* f, size_t i) {
  return f && i < f->points.size() ? f->points[i].plan.size() : 0;
}

const char* nb_pareto_plan_step(const nb_pareto* f, size_t i, size_t j) {
  if (!f || i >= f->points.size() || j >= f->points[i].plan.size()) return nullptr;
  return f->points[i].plan.steps[j].c_str();
}

nb_status nb_simulate_problem(const nb_problem* p, nb_algorithm algo, const nb_limits* limits,
                              char** text, char** json) {
  if (!p) return fail(NB_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    FaithfulEnvironment env;
    emit_episode(run_episode(p->problem, env, to_algorithm(algo), to_limits(limits)), text, json);
  });
}

nb_status nb_simulate_dialog(const char* spec_text, size_t len, const char* answers,
                             const uint64_t* seed, nb_algorithm algo, const nb_limits* limits,
                             char** text, char** json) {
  if (!spec_text) return fail(NB_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const DialogSpec spec = parse_dialog_spec(std::string_view(spec_text, len));
    const Problem compiled = compile_dialog(spec, to_limits(limits));
    SimUser user = answers ? parse_answer_script(answers) : SimUser{};
    if (seed) user.seed = *seed;
    check_sim_user(spec, user);
    auto env = make_sim_env(spec, std::move(user));
    emit_episode(run_episode(compiled, *env, to_algorithm(algo), to_limits(limits)), text, json);
  });
}

nb_service_options nb_service_options_default(void) {
  return nb_service_options{NB_ALGO_DP, nb_limits_default(), 30 * 60, nullptr};
}

nb_status nb_sessions_new(const nb_service_options* options, nb_sessions** out) {
  if (!out) return fail(NB_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const nb_service_options o = options ? *options : nb_service_options_default();
    ServiceOptions so;
    so.algorithm = to_algorithm(o.algorithm);
    so.limits = to_limits(&o.limits);
    so.idle_timeout = std::chrono::seconds(o.idle_timeout_seconds);
    if (o.transcript_dir) so.transcript_dir = std::string(o.transcript_dir);
    *out = new nb_sessions(std::move(so));
  });
}

void nb_sessions_free(nb_sessions* s) { delete s; }


nb_status nb_session_create(nb_sessions* s, const char* spec_text, const char* builtin,
                            char** json) {
  if (!s || (spec_text == nullptr) == (builtin == nullptr)) {
    return fail(NB_ERR_ARGUMENT, "exactly one of spec text and builtin name is required");
  }
  return session_call(json, [&] {
    return step_json(spec_text ? s->manager.create_from_text(spec_text)
                               : s->manager.create_from_builtin(builtin));
  });
}

nb_status nb_session_reply(nb_sessions* s, const char* id, const char* answer, char** json) {
  if (!s || !id || !answer) return fail(NB_ERR_ARGUMENT, "null argument");
  return session_call(json, [&] { return step_json(s->manager.reply(id, answer)); });
}

nb_status nb_session_get(nb_sessions* s, const char* id, char** json) {
  if (!s || !id) return fail(NB_ERR_ARGUMENT, "null argument");
  return session_call(json, [&] { return snapshot_json(s->manager.get(id)); });
}

nb_status nb_server_start(nb_sessions* s, const char* addr, int port, const char* static_dir,
                          nb_server** out, int* bound_port) {
  if (!s || !addr || !out) return fail(NB_ERR_ARGUMENT, "null argument");
  if (port < 0 || port > 65535) return fail(NB_ERR_ARGUMENT, "port out of range");
  std::unique_ptr<nb_server> srv;
  int bound = -1;
  const nb_status st = guarded([&] {
    std::optional<std::string> dir;
    if (static_dir) dir = std::string(static_dir);
    srv = std::make_unique<nb_server>(s->manager, std::move(dir));
    bound = srv->http.bind(addr, port);
  });
  if (st != NB_OK) return st;
  if (bound < 0) {
    return fail(NB_ERR_IO, "cannot bind " + std::string(addr) + ":" + std::to_string(port));
  }
  srv->thread = std::thread([h = &srv->http] { h->listen(); });
  if (bound_port) *bound_port = bound;
  *out = srv.release();
  return NB_OK;
}

void nb_server_wait(nb_server* srv) {
  if (srv && srv->thread.joinable()) srv->thread.join();
}

void nb_server_stop(nb_server* srv) {
  if (srv) srv->http.stop();
}

void nb_server_free(nb_server* srv) {
  if (!srv) return;
  srv->http.stop();
  if (srv->thread.joinable()) srv->thread.join();
  delete srv;
}

}  // extern "C"
