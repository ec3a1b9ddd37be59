#pragma once

// Reference answers computed by plain enumeration of every valid plan.
// Deliberately shares nothing with the library solvers beyond the model types.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"

namespace oracle {

using netbench::Problem;
using netbench::Rational;
using netbench::State;

struct PlanRecord {
  std::vector<std::string> names;
  Rational cost;
  Rational utility;
  Rational discounted;
  State final_state;
};

inline bool holds(const netbench::PartialState& p, const State& s) {
  for (const auto& b : p.bindings()) {
    if (s[b.var] != b.value) return false;
  }
  return true;
}

// Every valid plan of length <= k from start, in no particular order.
inline std::vector<PlanRecord> all_plans(const Problem& pr, const State& start, std::uint32_t k) {
  const Rational gamma = pr.objective().kind == netbench::ObjectiveKind::DiscountedNetBenefit
                             ? pr.objective().gamma
                             : Rational(1);
  std::vector<PlanRecord> out;
  PlanRecord cur{{}, 0, 0, 0, start};
  Rational weight(1);
  std::function<void()> rec = [&] {
    out.push_back(cur);
    if (cur.names.size() == k) return;
    for (const auto& op : pr.operators()) {
      if (!holds(op.pre, cur.final_state)) continue;
      const PlanRecord saved = cur;
      const Rational saved_weight = weight;
      for (const auto& b : op.eff.bindings()) cur.final_state[b.var] = b.value;
      cur.names.push_back(op.name);
      cur.cost += op.cost;
      cur.utility += op.utility;
      cur.discounted += (op.utility - op.cost) * weight;
      weight *= gamma;
      rec();
      cur = saved;
      weight = saved_weight;
    }
  };
  rec();
  return out;
}

inline std::vector<PlanRecord> all_plans(const Problem& pr) {
  return all_plans(pr, pr.initial(), pr.horizon());
}

struct Optimum {
  bool feasible = false;
  Rational value;
  std::vector<std::string> plan;
};

inline std::optional<Rational> plan_value(const Problem& pr, const PlanRecord& r) {
  const auto& obj = pr.objective();
  switch (obj.kind) {
    case netbench::ObjectiveKind::MinCost:
      if (obj.goal && !holds(*obj.goal, r.final_state)) return std::nullopt;
      return r.cost;
    case netbench::ObjectiveKind::NetBenefit: return r.utility - r.cost;
    case netbench::ObjectiveKind::DiscountedNetBenefit: return r.discounted;
  }
  return std::nullopt;
}

// Best value, then shorter plan, then lexicographically smaller name sequence.
inline Optimum optimum(const Problem& pr, const State& start, std::uint32_t k) {
  Optimum best;
  const bool maximize = pr.objective().kind != netbench::ObjectiveKind::MinCost;
  if (!maximize && !pr.objective().goal) {
    best.feasible = true;
    best.value = 0;
    return best;
  }
  for (const auto& r : all_plans(pr, start, k)) {
    const auto v = plan_value(pr, r);
    if (!v) continue;
    bool take = !best.feasible;
    if (!take) {
      if (*v != best.value) {
        take = maximize ? *v > best.value : *v < best.value;
      } else if (r.names.size() != best.plan.size()) {
        take = r.names.size() < best.plan.size();
      } else {
        take = r.names < best.plan;
      }
    }
    if (take) best = {true, *v, r.names};
  }
  return best;
}

inline Optimum optimum(const Problem& pr) { return optimum(pr, pr.initial(), pr.horizon()); }

struct Point {
  Rational cost;
  Rational utility;
  friend bool operator==(const Point&, const Point&) = default;
};

// Nondominated (cost, utility) pairs over all valid plans, by ascending cost.
inline std::vector<Point> pareto(const Problem& pr) {
  std::vector<Point> pts;
  for (const auto& r : all_plans(pr)) pts.push_back({r.cost, r.utility});
  std::vector<Point> front;
  for (const auto& p : pts) {
    bool dominated = false;
    for (const auto& q : pts) {
      if (q.cost <= p.cost && q.utility >= p.utility &&
          (q.cost < p.cost || q.utility > p.utility)) {
        dominated = true;
        break;
      }
    }
    if (!dominated && std::find(front.begin(), front.end(), p) == front.end()) front.push_back(p);
  }
  std::sort(front.begin(), front.end(),
            [](const Point& a, const Point& b) { return a.cost < b.cost; });
  return front;
}

}  // namespace oracle
