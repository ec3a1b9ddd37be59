#ifndef NETBENCH_NETBENCH_H
#define NETBENCH_NETBENCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(NB_BUILDING)
#define NB_API __declspec(dllexport)
#else
#define NB_API __declspec(dllimport)
#endif
#else
#define NB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status. On failure a message is available
 * from nb_last_error() on the calling thread until its next failing call. */
typedef enum nb_status {
  NB_OK = 0,
  NB_ERR_PARSE = 1,          /* malformed problem, dialog or answer text */
  NB_ERR_INVALID = 2,        /* well-formed but semantically invalid input */
  NB_ERR_LIMIT = 3,          /* refused by a size guard */
  NB_ERR_NOT_FOUND = 4,      /* unknown session or builtin */
  NB_ERR_CONFLICT = 5,       /* session already finished */
  NB_ERR_ILLEGAL_ANSWER = 6, /* answer outside the slot's answer set */
  NB_ERR_ARGUMENT = 7,       /* null pointer or out-of-range argument */
  NB_ERR_IO = 8,             /* socket or file failure */
  NB_ERR_INTERNAL = 9
} nb_status;

typedef enum nb_algorithm { NB_ALGO_DP = 0, NB_ALGO_BNB = 1, NB_ALGO_BRUTE = 2 } nb_algorithm;

typedef enum nb_gen_class {
  NB_GEN_CONSTANT_COST = 0,
  NB_GEN_CONSTANT_UTILITY_AND_COST = 1,
  NB_GEN_VARYING_UTILITY_CONSTANT_COST = 2
} nb_gen_class;

typedef struct nb_problem nb_problem;
typedef struct nb_solution nb_solution;
typedef struct nb_pareto nb_pareto;
typedef struct nb_sessions nb_sessions;
typedef struct nb_server nb_server;

typedef struct nb_limits {
  uint64_t brute_plans; /* sum over d <= k of |O|^d */
  uint64_t dp_cells;    /* reachable states times (k + 1) */
  uint64_t compile_ops; /* operators of a compiled dialog */
} nb_limits;

NB_API const char* nb_version(void);
NB_API const char* nb_last_error(void);
/* 1-based position of the last parse failure, 0 when not applicable. */
NB_API int nb_last_error_line(void);
NB_API int nb_last_error_column(void);
NB_API const char* nb_status_name(nb_status status);

/* Strings returned through char** out-parameters are owned by the caller. */
NB_API void nb_string_free(char* s);

NB_API nb_limits nb_limits_default(void);
/* Applies "brute=<n>,states=<n>,ops=<n>" (any subset) onto *limits. */
NB_API nb_status nb_limits_parse(const char* text, nb_limits* limits);

/* Problems. A null limits pointer means the defaults. */
NB_API nb_status nb_problem_parse(const char* text, size_t len, nb_problem** out);
NB_API nb_status nb_problem_from_dialog(const char* text, size_t len, const nb_limits* limits,
                                        nb_problem** out);
NB_API nb_status nb_problem_from_builtin(const char* name, const nb_limits* limits,
                                         nb_problem** out);
NB_API nb_status nb_generate(nb_gen_class cls, uint32_t vars, uint32_t dom, uint32_t ops,
                             uint32_t k, uint64_t seed,
                             /* NULL, "mincost", "netbenefit" or "discounted:<gamma>" */
                             const char* objective, nb_problem** out);
NB_API void nb_problem_free(nb_problem* p);
NB_API nb_status nb_problem_serialize(const nb_problem* p, char** out);
NB_API const char* nb_problem_name(const nb_problem* p);
NB_API const char* nb_problem_objective(const nb_problem* p);
NB_API uint32_t nb_problem_horizon(const nb_problem* p);
NB_API size_t nb_problem_variable_count(const nb_problem* p);
NB_API size_t nb_problem_operator_count(const nb_problem* p);
NB_API const char* nb_problem_operator_name(const nb_problem* p, size_t i);
/* Evaluates a plan. On success *value receives the objective value. On an
 * inapplicable step, NB_ERR_INVALID is returned and *bad_step is set. */
NB_API nb_status nb_problem_evaluate(const nb_problem* p, const char* const* steps, size_t n,
                                     char** value, size_t* bad_step);

/* Solving. An infeasible instance is a successful call with feasible == 0. */
NB_API nb_status nb_solve(const nb_problem* p, nb_algorithm algo, const nb_limits* limits,
                          int parallel, nb_solution** out);
NB_API void nb_solution_free(nb_solution* s);
NB_API int nb_solution_feasible(const nb_solution* s);
/* Set when the objective is mincost without a goal. */
NB_API int nb_solution_degenerate(const nb_solution* s);
NB_API const char* nb_solution_value(const nb_solution* s); /* "n" or "n/d" */
NB_API const char* nb_solution_algorithm(const nb_solution* s);
NB_API uint64_t nb_solution_nodes(const nb_solution* s);
NB_API size_t nb_solution_length(const nb_solution* s);
NB_API const char* nb_solution_step(const nb_solution* s, size_t i);

/* Cost/utility trade-off frontier, ordered by cost. */
NB_API nb_status nb_pareto_front(const nb_problem* p, const nb_limits* limits, nb_pareto** out);
NB_API void nb_pareto_free(nb_pareto* f);
NB_API size_t nb_pareto_size(const nb_pareto* f);
NB_API const char* nb_pareto_cost(const nb_pareto* f, size_t i);
NB_API const char* nb_pareto_utility(const nb_pareto* f, size_t i);
NB_API size_t nb_pareto_plan_length(const nb_pareto* f, size_t i);
NB_API const char* nb_pareto_plan_step(const nb_pareto* f, size_t i, size_t j);

/* Interleaved plan-and-act episodes. Output strings may be NULL if unwanted.
 * A problem runs against a faithful environment; a dialog runs against a
 * simulated user given by an answer script ("slot=answer" lines, may be
 * NULL) and an optional seed for unscripted slots. */
NB_API nb_status nb_simulate_problem(const nb_problem* p, nb_algorithm algo,
                                     const nb_limits* limits, char** text, char** json);
NB_API nb_status nb_simulate_dialog(const char* spec_text, size_t len, const char* answers,
                                    const uint64_t* seed, nb_algorithm algo,
                                    const nb_limits* limits, char** text, char** json);

/* Live dialog sessions. Results are JSON bodies identical to the HTTP API.
 * On failure, *json (when non-null) receives the error body. */
typedef struct nb_service_options {
  nb_algorithm algorithm;
  nb_limits limits;
  uint32_t idle_timeout_seconds;
  const char* transcript_dir; /* NULL disables transcript files */
} nb_service_options;

NB_API nb_service_options nb_service_options_default(void);
NB_API nb_status nb_sessions_new(const nb_service_options* options, nb_sessions** out);
NB_API void nb_sessions_free(nb_sessions* s);
/* Exactly one of spec_text and builtin must be non-null. */
NB_API nb_status nb_session_create(nb_sessions* s, const char* spec_text, const char* builtin,
                                   char** json);
NB_API nb_status nb_session_reply(nb_sessions* s, const char* id, const char* answer,
                                  char** json);
NB_API nb_status nb_session_get(nb_sessions* s, const char* id, char** json);

/* HTTP front end on a background thread. Port 0 picks a free port. The
 * sessions handle must outlive the server. */
NB_API nb_status nb_server_start(nb_sessions* s, const char* addr, int port,
                                 const char* static_dir, nb_server** out, int* bound_port);
NB_API void nb_server_wait(nb_server* srv);
NB_API void nb_server_stop(nb_server* srv);
NB_API void nb_server_free(nb_server* srv);

#ifdef __cplusplus
}
#endif

#endif
