/* The public header must be usable from plain C. */
#include <netbench/netbench.h>
#include <stdio.h>
#include <string.h>

int main(void) {
  const char* text =
      "problem p\nvar x { 0 1 }\ninit x=0\nhorizon 3\nobjective netbenefit\n"
      "op a { pre: x=0 ; eff: x=1 ; cost: 1 ; utility: 3 }\n"
      "op b { pre: x=1 ; eff: x=0 ; cost: 1 ; utility: 1 }\n";
  nb_problem* p = NULL;
  nb_solution* s = NULL;
  int ok;
  if (nb_problem_parse(text, strlen(text), &p) != NB_OK) return 1;
  if (nb_solve(p, NB_ALGO_DP, NULL, 0, &s) != NB_OK) return 1;
  ok = strcmp(nb_solution_value(s), "4") == 0 && nb_solution_length(s) == 3;
  nb_solution_free(s);
  nb_problem_free(p);
  printf("%s\n", ok ? "ok" : "mismatch");
  return ok ? 0 : 1;
}
