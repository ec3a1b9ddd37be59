#include "search.hpp"

#include <algorithm>
#include <future>
#include <unordered_map>

namespace netbench {

namespace {

using OpSeq = std::vector<std::uint32_t>;

Plan to_plan(const Problem& pr, const OpSeq& seq) {
  Plan p;
  p.steps.reserve(seq.size());
  for (auto o : seq) p.steps.push_back(pr.operators()[o].name);
  return p;
}

bool has_goal(const Objective& obj) { return obj.goal.has_value() && !obj.goal->empty(); }

// MinCost without a goal (or with an empty one) is satisfied by the empty plan.
std::optional<SolveResult> degenerate_result(const Problem& pr, std::string_view algo) {
  const auto& obj = pr.objective();
  if (obj.kind != ObjectiveKind::MinCost || has_goal(obj)) return std::nullopt;
  SolveResult r;
  r.optimal_value = 0;
  r.nodes_expanded = 1;
  r.algorithm = std::string(algo);
  r.degenerate = true;
  return r;
}

// Strict preference between two candidates found by the same solver, where
// index order equals name order.
bool better(bool maximize, const Rational& va, const OpSeq& a, const Rational& vb, const OpSeq& b) {
  if (va != vb) return maximize ? va > vb : va < vb;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

// ---------------------------------------------------------------------------
// Reachable state space within the horizon.

struct StateSpace {
  std::vector<State> states;
  std::vector<std::uint32_t> dist;  // BFS depth from start
  // Applicable (operator, successor) pairs in operator order; filled only for
  // states with dist < horizon.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> succ;
  std::unordered_map<State, std::uint32_t, StateHash> index;
};

StateSpace build_space(const Problem& pr, const State& start, std::uint32_t horizon,
                       const Limits& limits) {
  StateSpace sp;
  const std::uint64_t layers = static_cast<std::uint64_t>(horizon) + 1;
  auto add = [&](const State& s, std::uint32_t d) -> std::uint32_t {
    auto [it, inserted] = sp.index.emplace(s, static_cast<std::uint32_t>(sp.states.size()));
    if (inserted) {
      if ((sp.states.size() + 1) * layers > limits.dp_cells) {
        throw LimitError("state space exceeds limit: more than " +
                         std::to_string(limits.dp_cells / layers) + " reachable states at horizon " +
                         std::to_string(horizon));
      }
      sp.states.push_back(s);
      sp.dist.push_back(d);
      sp.succ.emplace_back();
    }
    return it->second;
  };

  add(start, 0);
  const auto& ops = pr.operators();
  for (std::size_t i = 0; i < sp.states.size(); ++i) {
    if (sp.dist[i] >= horizon) continue;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (std::uint32_t o = 0; o < ops.size(); ++o) {
      if (!applicable(ops[o], sp.states[i])) continue;
      const State next = apply(ops[o], sp.states[i]);
      out.emplace_back(o, add(next, sp.dist[i] + 1));
    }
    sp.succ[i] = std::move(out);
  }
  return sp;
}

// ---------------------------------------------------------------------------
// Dynamic programming tables.

struct DpTables {
  StateSpace space;
  std::uint32_t horizon = 0;
  bool maximize = true;
  // [remaining][state]
  std::vector<std::vector<Rational>> value;
  std::vector<std::vector<std::uint32_t>> length;
  std::vector<std::vector<char>> feasible;
  std::uint64_t cells = 0;

  bool in_table(std::uint32_t s, std::uint32_t d) const { return space.dist[s] + d <= horizon; }
};

// Backward induction over [remaining][state] with value type V. step(d, o) is
// the contribution of operator o taken with d steps remaining; cont maps the
// successor value into the current layer.
template <class V, class Step, class Cont>
void relax(DpTables& t, const std::vector<char>& at_goal, std::vector<std::vector<V>>& value,
           Step step, Cont cont) {
  const std::size_t n = t.space.states.size();
  for (std::uint32_t d = 1; d <= t.horizon; ++d) {
    const auto& prev_v = value[d - 1];
    const auto& prev_l = t.length[d - 1];
    const auto& prev_f = t.feasible[d - 1];
    for (std::uint32_t s = 0; s < n; ++s) {
      if (!t.in_table(s, d)) continue;
      ++t.cells;
      if (!t.maximize && at_goal[s]) {
        t.feasible[d][s] = 1;
        continue;
      }
      bool found = t.maximize;  // stopping is always allowed when maximizing
      V best{};
      std::uint32_t best_len = 0;
      for (const auto& [o, next] : t.space.succ[s]) {
        if (!t.maximize && !prev_f[next]) continue;
        V v = step(d, o) + cont(prev_v[next]);
        const std::uint32_t len = prev_l[next] + 1;
        const bool improves = t.maximize ? v > best : v < best;
        if (!found || improves || (v == best && len < best_len)) {
          best = std::move(v);
          best_len = len;
          found = true;
        }
      }
      if (found) {
        value[d][s] = std::move(best);
        t.length[d][s] = best_len;
        t.feasible[d][s] = 1;
      }
    }
  }
}

DpTables build_tables(const Problem& pr, const State& start, std::uint32_t horizon,
                      const Limits& limits) {
  DpTables t;
  t.space = build_space(pr, start, horizon, limits);
  t.horizon = horizon;
  const auto& obj = pr.objective();
  t.maximize = obj.maximizes();
  const std::size_t n = t.space.states.size();
  const auto& ops = pr.operators();
  const Rational gamma = obj.step_discount();

  std::vector<Rational> step_value;
  step_value.reserve(ops.size());
  for (const auto& o : ops) step_value.push_back(t.maximize ? o.net() : o.cost);

  std::vector<char> at_goal(n, 1);
  if (!t.maximize && has_goal(obj)) {
    for (std::size_t s = 0; s < n; ++s) at_goal[s] = consistent(*obj.goal, t.space.states[s]);
  }

  t.length.assign(horizon + 1, std::vector<std::uint32_t>(n, 0));
  t.feasible.assign(horizon + 1, std::vector<char>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    t.feasible[0][s] = at_goal[s];
    ++t.cells;
  }

  // Integer path: with gamma = p/q and L the lcm of step denominators, the
  // value with d steps remaining times L*q^(d-1) is an integer bounded by
  // d * max|step| * L * max(p,q)^(d-1).
  const mpz_class p = gamma.raw().get_num(), q = gamma.raw().get_den();
  mpz_class lcm = 1, max_abs = 0;
  for (const auto& v : step_value) {
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.raw().get_den_mpz_t());
    mpz_class a = abs(v.raw().get_num());
    if (a > max_abs) max_abs = a;
  }
  mpz_class base = p > q ? p : q, growth;
  mpz_pow_ui(growth.get_mpz_t(), base.get_mpz_t(), horizon > 0 ? horizon - 1 : 0);
  mpz_class bound = mpz_class(horizon) * max_abs * lcm * growth;
  const bool fits = bound < (mpz_class(1) << 62);

  if (fits) {
    std::vector<mpz_class> scale(horizon + 1);  // L * q^(d-1) for d >= 1
    std::vector<std::vector<std::int64_t>> steps(horizon + 1);
    for (std::uint32_t d = 1; d <= horizon; ++d) {
      scale[d] = d == 1 ? lcm : scale[d - 1] * q;
      for (const auto& v : step_value) {
        mpz_class x = v.raw().get_num() * (scale[d] / v.raw().get_den());
        steps[d].push_back(x.get_si());
      }
    }
    const std::int64_t mult = p.get_si();
    std::vector<std::vector<std::int64_t>> value(horizon + 1, std::vector<std::int64_t>(n, 0));
    relax(t, at_goal, value, [&](std::uint32_t d, std::uint32_t o) { return steps[d][o]; },
          [&](std::int64_t prev) { return mult * prev; });
    t.value.assign(horizon + 1, std::vector<Rational>(n));
    for (std::uint32_t d = 1; d <= horizon; ++d) {
      for (std::size_t s = 0; s < n; ++s) {
        if (value[d][s] != 0) t.value[d][s] = Rational(mpq_class(mpz_class(value[d][s]), scale[d]));
      }
    }
  } else {
    t.value.assign(horizon + 1, std::vector<Rational>(n));
    const bool discounted = gamma != Rational(1);
    relax(t, at_goal, t.value, [&](std::uint32_t, std::uint32_t o) -> const Rational& {
            return step_value[o];
          },
          [&](const Rational& prev) { return discounted ? gamma * prev : prev; });
  }
  return t;
}

OpSeq extract_plan(const Problem& pr, const DpTables& t) {
  const auto& ops = pr.operators();
  const Rational gamma = pr.objective().step_discount();
  OpSeq seq;
  std::uint32_t s = 0;
  std::uint32_t d = t.horizon;
  while (d > 0 && t.feasible[d][s] && t.length[d][s] > 0) {
    const Rational& target = t.value[d][s];
    const std::uint32_t target_len = t.length[d][s];
    bool moved = false;
    for (const auto& [o, next] : t.space.succ[s]) {
      if (!t.feasible[d - 1][next] || t.length[d - 1][next] + 1 != target_len) continue;
      const Rational v = t.maximize ? ops[o].net() + gamma * t.value[d - 1][next]
                                    : ops[o].cost + t.value[d - 1][next];
      if (v == target) {
        seq.push_back(o);
        s = next;
        --d;
        moved = true;
        break;
      }
    }
    if (!moved) throw std::logic_error("dp plan extraction found no consistent successor");
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Brute force.

struct Incumbent {
  bool found = false;
  Rational value;
  OpSeq plan;
};

class BruteSearch {
 public:
  BruteSearch(const Problem& pr, std::uint32_t horizon)
      : pr_(pr),
        horizon_(horizon),
        maximize_(pr.objective().maximizes()),
        gamma_(pr.objective().step_discount()) {}

  void run(const State& s, std::uint32_t depth, const Rational& acc, const Rational& weight) {
    ++nodes_;
    if (maximize_ || consistent(*pr_.objective().goal, s)) {
      // Enumeration is in lexicographic order, so an equal candidate found
      // later is never preferred unless it is shorter.
      if (!best_.found || better(maximize_, acc, prefix_, best_.value, best_.plan)) {
        best_ = {true, acc, prefix_};
      }
    }
    if (depth == horizon_) return;
    const auto& ops = pr_.operators();
    for (std::uint32_t o = 0; o < ops.size(); ++o) {
      if (!applicable(ops[o], s)) continue;
      prefix_.push_back(o);
      run(apply(ops[o], s), depth + 1,
          acc + (maximize_ ? weight * ops[o].net() : ops[o].cost), weight * gamma_);
      prefix_.pop_back();
    }
  }

  void set_prefix(OpSeq prefix) { prefix_ = std::move(prefix); }
  const Incumbent& best() const { return best_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  const Problem& pr_;
  std::uint32_t horizon_;
  bool maximize_;
  Rational gamma_;
  OpSeq prefix_;
  Incumbent best_;
  std::uint64_t nodes_ = 0;
};

std::uint64_t enumeration_size(std::uint64_t ops, std::uint32_t horizon, std::uint64_t cap) {
  std::uint64_t total = 1;
  std::uint64_t layer = 1;
  for (std::uint32_t d = 1; d <= horizon; ++d) {
    if (ops == 0) break;
    if (layer > cap / ops) return cap + 1;
    layer *= ops;
    total += layer;
    if (total > cap) return cap + 1;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Branch and bound.

class BranchAndBound {
 public:
  BranchAndBound(const Problem& pr, std::uint32_t horizon)
      : pr_(pr),
        horizon_(horizon),
        maximize_(pr.objective().maximizes()),
        memo_(horizon + 1) {
    const Rational gamma = pr.objective().step_discount();
    Rational best_net(0);
    for (const auto& o : pr.operators()) best_net = std::max(best_net, o.net());
    weight_.resize(horizon + 1);
    weight_[0] = 1;
    for (std::uint32_t d = 1; d <= horizon; ++d) weight_[d] = weight_[d - 1] * gamma;
    bound_.assign(horizon + 1, Rational(0));
    for (std::uint32_t d = horizon; d-- > 0;) bound_[d] = bound_[d + 1] + best_net * weight_[d];
  }

  void run(const State& start) {
    if (maximize_) best_ = {true, Rational(0), {}};
    visit(start, 0, Rational(0));
  }

  const Incumbent& best() const { return best_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  void visit(const State& s, std::uint32_t depth, const Rational& acc) {
    ++nodes_;
    // An earlier arrival at the same (state, depth) had a lexicographically
    // smaller prefix of the same length; with at least as good an
    // accumulated value it dominates every completion from here.
    auto& seen = memo_[depth];
    auto it = seen.find(s);
    if (it != seen.end()) {
      if (maximize_ ? it->second >= acc : it->second <= acc) return;
      it->second = acc;
    } else {
      seen.emplace(s, acc);
    }

    if (maximize_) {
      if (better(true, acc, prefix_, best_.value, best_.plan)) best_ = {true, acc, prefix_};
      if (depth == horizon_) return;
      const Rational optimistic = acc + bound_[depth];
      if (optimistic < best_.value || (optimistic == best_.value && depth + 1 >= best_.plan.size())) {
        return;
      }
    } else {
      if (consistent(*pr_.objective().goal, s)) {
        if (!best_.found || better(false, acc, prefix_, best_.value, best_.plan)) {
          best_ = {true, acc, prefix_};
        }
        return;
      }
      if (depth == horizon_) return;
      // Costs are non-negative, so no extension is cheaper than acc.
      if (best_.found &&
          (acc > best_.value || (acc == best_.value && depth + 1 >= best_.plan.size()))) {
        return;
      }
    }

    const auto& ops = pr_.operators();
    for (std::uint32_t o = 0; o < ops.size(); ++o) {
      if (!applicable(ops[o], s)) continue;
      prefix_.push_back(o);
      visit(apply(ops[o], s), depth + 1,
            maximize_ ? acc + weight_[depth] * ops[o].net() : acc + ops[o].cost);
      prefix_.pop_back();
    }
  }

  const Problem& pr_;
  std::uint32_t horizon_;
  bool maximize_;
  std::vector<Rational> weight_;
  std::vector<Rational> bound_;
  std::vector<std::unordered_map<State, Rational, StateHash>> memo_;
  OpSeq prefix_;
  Incumbent best_;
  std::uint64_t nodes_ = 0;
};

SolveResult finish(const Problem& pr, const Incumbent& best, std::uint64_t nodes,
                   std::string_view algo) {
  SolveResult r;
  r.algorithm = std::string(algo);
  r.nodes_expanded = nodes;
  r.feasible = best.found;
  if (best.found) {
    r.optimal_value = best.value;
    r.plan = to_plan(pr, best.plan);
  }
  return r;
}

}  // namespace

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::Brute: return "brute";
    case Algorithm::Dp: return "dp";
    case Algorithm::Bnb: return "bnb";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "brute") return Algorithm::Brute;
  if (name == "dp") return Algorithm::Dp;
  if (name == "bnb") return Algorithm::Bnb;
  return std::nullopt;
}

bool preferred(const Objective& objective, const Rational& value_a, const Plan& plan_a,
               const Rational& value_b, const Plan& plan_b) {
  if (value_a != value_b) return objective.maximizes() ? value_a > value_b : value_a < value_b;
  if (plan_a.size() != plan_b.size()) return plan_a.size() < plan_b.size();
  return plan_a.steps < plan_b.steps;
}

SolveResult solve_brute(const Problem& pr, const Limits& limits, bool parallel) {
  return solve_brute(pr, pr.initial(), pr.horizon(), limits, parallel);
}

SolveResult solve_brute(const Problem& pr, const State& start, std::uint32_t horizon,
                        const Limits& limits, bool parallel) {
  if (auto r = degenerate_result(pr, "brute")) return *r;
  const std::uint64_t size = enumeration_size(pr.operators().size(), horizon, limits.brute_plans);
  if (size > limits.brute_plans) {
    throw LimitError("brute-force enumeration exceeds limit of " +
                     std::to_string(limits.brute_plans) + " plans");
  }
  const bool maximize = pr.objective().maximizes();

  if (!parallel || horizon == 0) {
    BruteSearch search(pr, horizon);
    search.run(start, 0, Rational(0), Rational(1));
    return finish(pr, search.best(), search.nodes(), "brute");
  }

  // Root handled here; each applicable root operator gets its own search.
  Incumbent best;
  if (maximize || consistent(*pr.objective().goal, start)) best = {true, Rational(0), {}};
  std::uint64_t nodes = 1;
  const auto& ops = pr.operators();
  const Rational gamma = pr.objective().step_discount();
  std::vector<std::future<std::pair<Incumbent, std::uint64_t>>> branches;
  for (std::uint32_t o = 0; o < ops.size(); ++o) {
    if (!applicable(ops[o], start)) continue;
    branches.push_back(std::async(std::launch::async, [&, o] {
      BruteSearch search(pr, horizon);
      search.set_prefix({o});
      search.run(apply(ops[o], start), 1, maximize ? ops[o].net() : ops[o].cost, gamma);
      return std::make_pair(search.best(), search.nodes());
    }));
  }
  for (auto& f : branches) {
    auto [cand, n] = f.get();
    nodes += n;
    if (cand.found && (!best.found || better(maximize, cand.value, cand.plan, best.value, best.plan))) {
      best = std::move(cand);
    }
  }
  return finish(pr, best, nodes, "brute");
}

SolveResult solve_dp(const Problem& pr, const Limits& limits) {
  return solve_dp(pr, pr.initial(), pr.horizon(), limits);
}

SolveResult solve_dp(const Problem& pr, const State& start, std::uint32_t horizon,
                     const Limits& limits) {
  if (auto r = degenerate_result(pr, "dp")) return *r;
  const DpTables t = build_tables(pr, start, horizon, limits);
  SolveResult r;
  r.algorithm = "dp";
  r.nodes_expanded = t.cells;
  r.feasible = t.feasible[horizon][0];
  if (r.feasible) {
    r.optimal_value = t.value[horizon][0];
    r.plan = to_plan(pr, extract_plan(pr, t));
  }
  return r;
}

SolveResult solve_bnb(const Problem& pr) { return solve_bnb(pr, pr.initial(), pr.horizon()); }

SolveResult solve_bnb(const Problem& pr, const State& start, std::uint32_t horizon) {
  if (auto r = degenerate_result(pr, "bnb")) return *r;
  BranchAndBound bnb(pr, horizon);
  bnb.run(start);
  return finish(pr, bnb.best(), bnb.nodes(), "bnb");
}

SolveResult solve(const Problem& pr, Algorithm algo, const Limits& limits) {
  return solve(pr, pr.initial(), pr.horizon(), algo, limits);
}

SolveResult solve(const Problem& pr, const State& start, std::uint32_t horizon, Algorithm algo,
                  const Limits& limits) {
  switch (algo) {
    case Algorithm::Brute: return solve_brute(pr, start, horizon, limits);
    case Algorithm::Dp: return solve_dp(pr, start, horizon, limits);
    case Algorithm::Bnb: return solve_bnb(pr, start, horizon);
  }
  throw std::invalid_argument("unknown algorithm");
}

ParetoFront pareto_front(const Problem& pr, const Limits& limits) {
  struct Point {
    Rational cost;
    Rational utility;
    std::uint32_t length;
    std::int64_t op;     // -1: stop here
    std::uint32_t next;  // index into the successor cell
  };
  const std::uint32_t horizon = pr.horizon();
  const StateSpace sp = build_space(pr, pr.initial(), horizon, limits);
  const std::size_t n = sp.states.size();
  const auto& ops = pr.operators();

  std::vector<std::vector<std::vector<Point>>> cells(horizon + 1, std::vector<std::vector<Point>>(n));
  for (std::size_t s = 0; s < n; ++s) cells[0][s] = {{0, 0, 0, -1, 0}};

  for (std::uint32_t d = 1; d <= horizon; ++d) {
    for (std::uint32_t s = 0; s < n; ++s) {
      if (sp.dist[s] + d > horizon) continue;
      std::vector<Point> cand{{0, 0, 0, -1, 0}};
      for (const auto& [o, next] : sp.succ[s]) {
        const auto& sub = cells[d - 1][next];
        for (std::uint32_t j = 0; j < sub.size(); ++j) {
          cand.push_back({ops[o].cost + sub[j].cost, ops[o].utility + sub[j].utility,
                          sub[j].length + 1, o, j});
        }
      }
      std::sort(cand.begin(), cand.end(), [](const Point& a, const Point& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        if (a.utility != b.utility) return a.utility > b.utility;
        if (a.length != b.length) return a.length < b.length;
        return a.op < b.op;
      });
      std::vector<Point> kept;
      for (auto& p : cand) {
        if (kept.empty() || p.utility > kept.back().utility) kept.push_back(std::move(p));
      }
      cells[d][s] = std::move(kept);
    }
  }

  ParetoFront front;
  for (std::uint32_t i = 0; i < cells[horizon][0].size(); ++i) {
    const Point& root = cells[horizon][0][i];
    OpSeq seq;
    std::uint32_t s = 0;
    std::uint32_t d = horizon;
    const Point* p = &root;
    while (p->op >= 0) {
      seq.push_back(static_cast<std::uint32_t>(p->op));
      const std::uint32_t next_state = [&] {
        for (const auto& [o, next] : sp.succ[s]) {
          if (o == static_cast<std::uint32_t>(p->op)) return next;
        }
        throw std::logic_error("pareto witness references an inapplicable operator");
      }();
      p = &cells[d - 1][next_state][p->next];
      s = next_state;
      --d;
    }
    front.points.push_back({root.cost, root.utility, to_plan(pr, seq)});
  }
  return front;
}

struct ValueTable::Impl {
  DpTables tables;
};

ValueTable::ValueTable(const Problem& pr, const Limits& limits) {
  auto impl = std::make_shared<Impl>();
  impl->tables = build_tables(pr, pr.initial(), pr.horizon(), limits);
  impl_ = std::move(impl);
}

std::optional<Rational> ValueTable::value(const State& s, std::uint32_t remaining) const {
  const auto& t = impl_->tables;
  auto it = t.space.index.find(s);
  if (it == t.space.index.end() || remaining > t.horizon || !t.in_table(it->second, remaining)) {
    return std::nullopt;
  }
  if (!t.feasible[remaining][it->second]) return std::nullopt;
  return t.value[remaining][it->second];
}

bool ValueTable::covers(const State& s, std::uint32_t remaining) const {
  const auto& t = impl_->tables;
  auto it = t.space.index.find(s);
  return it != t.space.index.end() && remaining <= t.horizon && t.in_table(it->second, remaining);
}

std::size_t ValueTable::state_count() const { return impl_->tables.space.states.size(); }

const std::vector<State>& ValueTable::states() const { return impl_->tables.space.states; }

}  // namespace netbench
